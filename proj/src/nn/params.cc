// Copyright (c) 2026 The lip2speech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "l2s/nn/params.h"

#include <cmath>
#include <cstring>

#include "l2s/base/error.h"
#include "l2s/base/hash.h"

namespace l2s::nn {

Var ParamSet::Add(const std::string& name, Mat init, bool trainable) {
  Require(!Has(name), "duplicate parameter '", name, "'");
  Var v = trainable ? Var::Leaf(std::move(init)) : Var::Constant(std::move(init));
  entries_.push_back({name, v, trainable});
  return v;
}

Var ParamSet::Get(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e.var;
  }
  throw ShapeError("no parameter named '" + name + "'");
}

bool ParamSet::Has(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return true;
  }
  return false;
}

std::vector<Var> ParamSet::Trainable() const {
  std::vector<Var> out;
  for (const auto& e : entries_) {
    if (e.trainable) out.push_back(e.var);
  }
  return out;
}

size_t ParamSet::NumScalars() const {
  size_t n = 0;
  for (const auto& e : entries_) n += static_cast<size_t>(e.var.value().size());
  return n;
}

void ParamSet::Save(io::Checkpoint* ckpt, const std::string& prefix) const {
  for (const auto& e : entries_) ckpt->Put(prefix + e.name, e.var.value());
}

void ParamSet::Load(const io::Checkpoint& ckpt, const std::string& prefix) {
  for (auto& e : entries_) {
    const Mat& m = ckpt.Get(prefix + e.name);
    Require<IoError>(m.rows() == e.var.rows() && m.cols() == e.var.cols(),
                     "checkpoint tensor '", prefix, e.name, "' has shape [", m.rows(),
                     "x", m.cols(), "], model expects [", e.var.rows(), "x",
                     e.var.cols(), "]");
    e.var.mutable_value() = m;
  }
}

void ParamSet::ZeroGrad() {
  for (auto& e : entries_) e.var.ZeroGrad();
}

std::string ParamSet::Checksum() const {
  std::string bytes;
  for (const auto& e : entries_) {
    bytes += e.name;
    bytes.push_back('\0');
    const Mat& m = e.var.value();
    const Index shape[2] = {m.rows(), m.cols()};
    bytes.append(reinterpret_cast<const char*>(shape), sizeof(shape));
    bytes.append(reinterpret_cast<const char*>(m.data()),
                 sizeof(double) * static_cast<size_t>(m.size()));
  }
  return Sha256Hex(bytes);
}

Mat UniformInit(Index rows, Index cols, Index fan_in, double gain, Rng& rng) {
  const double bound = gain * std::sqrt(3.0 / static_cast<double>(fan_in));
  std::uniform_real_distribution<double> u(-bound, bound);
  Mat m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

Dense MakeDense(ParamSet& ps, const std::string& name, Index in, Index out, Rng& rng,
                double gain) {
  Dense d;
  d.w = ps.Add(name + ".w", UniformInit(in, out, in, gain, rng));
  d.b = ps.Add(name + ".b", Mat::Zero(1, out));
  return d;
}

Conv MakeConv(ParamSet& ps, const std::string& name, int taps, Index cin, Index cout,
              Rng& rng, double gain) {
  Conv c;
  c.w = ps.Add(name + ".w", UniformInit(taps * cin, cout, taps * cin, gain, rng));
  c.b = ps.Add(name + ".b", Mat::Zero(1, cout));
  return c;
}

LayerNorm MakeLayerNorm(ParamSet& ps, const std::string& name, Index dim) {
  LayerNorm n;
  n.gamma = ps.Add(name + ".gamma", Mat::Ones(1, dim));
  n.beta = ps.Add(name + ".beta", Mat::Zero(1, dim));
  return n;
}

Var BatchNorm::Forward(const Var& x, bool training) const {
  if (!training) {
    return BatchNormEval(x, gamma, beta, running_mean.value().row(0),
                         running_var.value().row(0), eps);
  }
  RowVec mean, var;
  Var y = BatchNormTrain(x, gamma, beta, eps, &mean, &var);
  Mat& rm = const_cast<Var&>(running_mean).mutable_value();
  Mat& rv = const_cast<Var&>(running_var).mutable_value();
  rm.row(0) = (1.0 - momentum) * rm.row(0) + momentum * mean;
  rv.row(0) = (1.0 - momentum) * rv.row(0) + momentum * var;
  return y;
}

BatchNorm MakeBatchNorm(ParamSet& ps, const std::string& name, Index dim) {
  BatchNorm bn;
  bn.gamma = ps.Add(name + ".gamma", Mat::Ones(1, dim));
  bn.beta = ps.Add(name + ".beta", Mat::Zero(1, dim));
  bn.running_mean = ps.Add(name + ".running_mean", Mat::Zero(1, dim), false);
  bn.running_var = ps.Add(name + ".running_var", Mat::Ones(1, dim), false);
  return bn;
}

}  // namespace l2s::nn
