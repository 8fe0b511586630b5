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

#ifndef L2S_CONTENT_CONTENT_ENCODER_H_
#define L2S_CONTENT_CONTENT_ENCODER_H_

#include <cstdint>
#include <map>
#include <mutex>
#include <vector>

#include "json.hpp"
#include "l2s/corpus/render.h"
#include "l2s/nn/conv_index.h"
#include "l2s/nn/params.h"

namespace l2s::content {

// Front: one 3-D convolution over [time x H x W]. Trunk: per-frame stages,
// each a stride-2 3x3 convolution followed by residual blocks. The flattened
// trunk output passes a linear layer, then two 1-D convolutions over time
// emit the posterior mean and log-variance.
struct ContentEncoderConfig {
  int image_size = 32;
  int front_channels = 8;
  int front_kernel_t = 3;
  int front_kernel_hw = 4;
  int front_stride_hw = 4;
  int front_pad_hw = 0;
  std::vector<int> stage_channels = {32};
  int blocks_per_stage = 1;
  int feature_dim = 32;
  int latent_dim = 16;
  int head_kernel = 3;
  double logvar_clip = 10.0;

  static ContentEncoderConfig Toy();
  // 112x112 input, ResNet-18 stage layout, 512-dimensional latents.
  static ContentEncoderConfig Paper();
  void Validate() const;
  nlohmann::json ToJson() const;
  static ContentEncoderConfig FromJson(const nlohmann::json& j);
};

struct ContentPosterior {
  Mat mu;      // [T x D_z]
  Mat logvar;  // [T x D_z], within +-logvar_clip
};

struct ContentLatent {
  Mat z;          // [T x D_z]
  Mat upsampled;  // [alpha*T x D_z], empty until UpsampleLatent
};

class ContentEncoder {
 public:
  ContentEncoder(const ContentEncoderConfig& cfg, uint64_t seed);

  struct Output {
    nn::Var mu;
    nn::Var logvar;
  };
  // Builds a graph through the trainable weights.
  Output Forward(const corpus::VideoClip& clip) const;
  ContentPosterior Encode(const corpus::VideoClip& clip) const;

  const ContentEncoderConfig& config() const { return cfg_; }
  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }

 private:
  struct ResBlock {
    nn::Conv a, b;
  };
  struct Stage {
    nn::Conv down;
    std::vector<ResBlock> blocks;
  };
  struct Indices {
    nn::ConvIndex front;
    std::vector<nn::ConvIndex> down, same;
    nn::ConvIndex head;
  };
  const Indices& IndicesFor(int frames) const;

  ContentEncoderConfig cfg_;
  nn::ParamSet params_;
  nn::Conv front_;
  std::vector<Stage> stages_;
  nn::Dense proj_;
  nn::Conv mu_head_, logvar_head_;
  int trunk_hw_ = 0;

  mutable std::mutex cache_mu_;
  mutable std::map<int, Indices> cache_;
};

// z = mu + exp(logvar / 2) * eps.
nn::Var Reparameterize(const nn::Var& mu, const nn::Var& logvar, const Mat& eps);
Mat StandardNormal(Index rows, Index cols, uint64_t seed);
ContentLatent SampleLatent(const ContentPosterior& post, uint64_t seed);

// Sum over dimensions of 0.5 (mu^2 + exp(logvar) - 1 - logvar), averaged
// over frames. This is the reduction the KL weight lambda multiplies.
nn::Var KlToStandardNormal(const nn::Var& mu, const nn::Var& logvar);
double KlToStandardNormal(const ContentPosterior& post);

// Nearest-neighbour repetition: row t becomes rows [alpha*t, alpha*t + alpha).
Mat UpsampleLatent(const Mat& z, int alpha);
ContentLatent& UpsampleLatent(ContentLatent& lat, int alpha);

}  // namespace l2s::content

#endif  // L2S_CONTENT_CONTENT_ENCODER_H_
