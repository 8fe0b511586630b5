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

#ifndef L2S_SYNTHESIS_DECODER_H_
#define L2S_SYNTHESIS_DECODER_H_

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "l2s/nn/params.h"

namespace l2s::synthesis {

struct DecoderConfig {
  int latent_dim = 16;   // D_z
  int speaker_dim = 16;  // D_p
  int model_dim = 64;
  int num_blocks = 2;
  int num_heads = 2;
  int ffn_dim = 256;
  int conv_kernel = 7;
  int n_mels = 80;

  static DecoderConfig Toy();
  // 5 blocks, 256-dimensional attention, 4 heads, 31-tap convolution.
  static DecoderConfig Paper();
  void Validate() const;
  nlohmann::json ToJson() const;
  static DecoderConfig FromJson(const nlohmann::json& j);
};

// Sinusoidal absolute position table [length x dim].
Mat PositionalEncoding(Index length, Index dim);

// Non-autoregressive Conformer stack. Each block is pre-norm macaron style:
// half-step feed-forward, multi-head self-attention, convolution module,
// half-step feed-forward, final layer norm.
class ConformerDecoder {
 public:
  ConformerDecoder(const DecoderConfig& cfg, uint64_t seed);

  // up_latent [L x D_z], speaker [1 x D_p] -> mel [L x n_mels]; one pass.
  nn::Var Forward(const nn::Var& up_latent, const nn::Var& speaker) const;
  Mat Decode(const Mat& up_latent, const RowVec& speaker) const;

  const DecoderConfig& config() const { return cfg_; }
  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }

 private:
  struct FeedForward {
    nn::LayerNorm norm;
    nn::Dense up, down;
  };
  struct Block {
    FeedForward ff1, ff2;
    nn::LayerNorm attn_norm;
    nn::Dense q, k, v, o;
    nn::LayerNorm conv_norm;
    nn::Dense pointwise1;
    nn::Var depthwise_w, depthwise_b;
    nn::LayerNorm depthwise_norm;
    nn::Dense pointwise2;
    nn::LayerNorm out_norm;
  };

  nn::Var FeedForwardPass(const FeedForward& ff, const nn::Var& x) const;
  nn::Var Attention(const Block& b, const nn::Var& x) const;
  nn::Var ConvModule(const Block& b, const nn::Var& x) const;

  DecoderConfig cfg_;
  nn::ParamSet params_;
  nn::Dense input_;
  std::vector<Block> blocks_;
  nn::Dense head_;
};

}  // namespace l2s::synthesis

#endif  // L2S_SYNTHESIS_DECODER_H_
