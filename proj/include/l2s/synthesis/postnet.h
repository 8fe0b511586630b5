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

#ifndef L2S_SYNTHESIS_POSTNET_H_
#define L2S_SYNTHESIS_POSTNET_H_

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "l2s/nn/conv_index.h"
#include "l2s/nn/params.h"

namespace l2s::synthesis {

struct PostnetConfig {
  int n_mels = 80;
  int n_linear = 321;
  int channels = 64;
  int num_layers = 5;
  int kernel = 5;
  double leaky_slope = 0.01;

  static PostnetConfig Toy();
  static PostnetConfig Paper();
  void Validate() const;
  nlohmann::json ToJson() const;
  static PostnetConfig FromJson(const nlohmann::json& j);
};

// "Same" 1-D convolution over rows that holds several sequences stacked
// back to back; taps never cross a sequence boundary.
nn::ConvIndex SegmentedConv1dIndex(const std::vector<Index>& lengths, int kernel);

// Mel to linear magnitudes: conv + batch norm + leaky ReLU layers, then a
// linear map to n_linear bins and softplus so magnitudes stay positive.
class Postnet {
 public:
  Postnet(const PostnetConfig& cfg, uint64_t seed);

  // mel rows hold the sequences in `lengths` stacked together. In training
  // mode batch statistics are used and the running averages updated.
  nn::Var Forward(const nn::Var& mel, const std::vector<Index>& lengths, bool training) const;
  Mat Convert(const Mat& mel) const;

  const PostnetConfig& config() const { return cfg_; }
  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }

 private:
  struct Layer {
    nn::Conv conv;
    nn::BatchNorm norm;
  };

  PostnetConfig cfg_;
  nn::ParamSet params_;
  std::vector<Layer> layers_;
  nn::Dense out_;
};

}  // namespace l2s::synthesis

#endif  // L2S_SYNTHESIS_POSTNET_H_
