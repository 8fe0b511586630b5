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

#ifndef L2S_NN_PARAMS_H_
#define L2S_NN_PARAMS_H_

#include <string>
#include <vector>

#include "l2s/base/random.h"
#include "l2s/io/checkpoint.h"
#include "l2s/nn/autograd.h"
#include "l2s/nn/ops.h"

namespace l2s::nn {

// Ordered, named collection of weights and buffers owned by one model.
// Layers hold Var handles that alias these entries, so loading a checkpoint
// updates every layer in place.
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Var var;
    bool trainable;
  };

  Var Add(const std::string& name, Mat init, bool trainable = true);
  Var Get(const std::string& name) const;
  bool Has(const std::string& name) const;

  std::vector<Var> Trainable() const;
  const std::vector<Entry>& entries() const { return entries_; }
  size_t NumScalars() const;

  void Save(io::Checkpoint* ckpt, const std::string& prefix) const;
  // Every entry must be present with a matching shape.
  void Load(const io::Checkpoint& ckpt, const std::string& prefix);
  void ZeroGrad();

  // SHA-256 over names, shapes and values; changes iff any value changes.
  std::string Checksum() const;

 private:
  std::vector<Entry> entries_;
};

// Uniform(-b, b) with b = gain * sqrt(3 / fan_in).
Mat UniformInit(Index rows, Index cols, Index fan_in, double gain, Rng& rng);

struct Dense {
  Var w, b;
  Var operator()(const Var& x) const { return Linear(x, w, b); }
};
Dense MakeDense(ParamSet& ps, const std::string& name, Index in, Index out, Rng& rng,
                double gain = 1.0);

struct Conv {
  Var w, b;
  Var operator()(const Var& x, const ConvIndex& index) const {
    return GatherConv(x, w, b, index);
  }
};
Conv MakeConv(ParamSet& ps, const std::string& name, int taps, Index cin, Index cout,
              Rng& rng, double gain = 1.4142135623730951);

struct LayerNorm {
  Var gamma, beta;
  Var operator()(const Var& x) const { return LayerNormRows(x, gamma, beta); }
};
LayerNorm MakeLayerNorm(ParamSet& ps, const std::string& name, Index dim);

// Training mode normalizes with batch statistics and folds them into the
// running estimates (momentum 0.1); eval mode uses the running estimates.
struct BatchNorm {
  Var gamma, beta;
  Var running_mean, running_var;  // buffers, not trained
  double momentum = 0.1;
  double eps = 1e-5;
  Var Forward(const Var& x, bool training) const;
};
BatchNorm MakeBatchNorm(ParamSet& ps, const std::string& name, Index dim);

}  // namespace l2s::nn

#endif  // L2S_NN_PARAMS_H_
