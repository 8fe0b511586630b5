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

#include "l2s/nn/adam.h"

#include <cmath>

namespace l2s::nn {

Adam::Adam(std::vector<Var> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  for (const Var& p : params_) {
    m_.push_back(Mat::Zero(p.rows(), p.cols()));
    v_.push_back(Mat::Zero(p.rows(), p.cols()));
  }
}

double Adam::Step() {
  double sq = 0.0;
  for (const Var& p : params_) {
    if (p.has_grad()) sq += p.grad().squaredNorm();
  }
  const double norm = std::sqrt(sq);
  const double scale =
      cfg_.clip_norm > 0 && norm > cfg_.clip_norm ? cfg_.clip_norm / norm : 1.0;
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Var& p = params_[i];
    if (!p.has_grad()) continue;
    const Mat g = p.grad() * scale;
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g.cwiseAbs2();
    p.mutable_value().array() -=
        cfg_.lr * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + cfg_.eps);
  }
  ZeroGrad();
  return norm;
}

void Adam::ZeroGrad() {
  for (Var& p : params_) p.ZeroGrad();
}

}  // namespace l2s::nn
