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

#ifndef L2S_NN_ADAM_H_
#define L2S_NN_ADAM_H_

#include <vector>

#include "l2s/nn/autograd.h"

namespace l2s::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 0.0;  // global gradient-norm clip; 0 disables
};

class Adam {
 public:
  Adam(std::vector<Var> params, AdamConfig cfg);

  // Applies one update from the accumulated gradients, then clears them.
  // Returns the pre-clip global gradient norm.
  double Step();
  void ZeroGrad();
  long step_count() const { return t_; }

 private:
  std::vector<Var> params_;
  std::vector<Mat> m_, v_;
  AdamConfig cfg_;
  long t_ = 0;
};

}  // namespace l2s::nn

#endif  // L2S_NN_ADAM_H_
