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

#include "l2s/content/content_encoder.h"

#include <cmath>

#include "l2s/base/error.h"
#include "l2s/base/random.h"
#include "l2s/nn/ops.h"

namespace l2s::content {

using nn::Var;
using nlohmann::json;

ContentEncoderConfig ContentEncoderConfig::Toy() { return ContentEncoderConfig{}; }

ContentEncoderConfig ContentEncoderConfig::Paper() {
  ContentEncoderConfig c;
  c.image_size = 112;
  c.front_channels = 64;
  c.front_kernel_t = 5;
  c.front_kernel_hw = 7;
  c.front_stride_hw = 2;
  c.front_pad_hw = 3;
  c.stage_channels = {64, 128, 256, 512};
  c.blocks_per_stage = 2;
  c.feature_dim = 512;
  c.latent_dim = 512;
  return c;
}

void ContentEncoderConfig::Validate() const {
  Require<ConfigError>(image_size > 0, "content.image_size must be positive");
  Require<ConfigError>(front_channels > 0, "content.front_channels must be positive");
  Require<ConfigError>(front_kernel_t % 2 == 1, "content.front_kernel_t must be odd");
  Require<ConfigError>(front_kernel_hw > 0 && front_stride_hw > 0 && front_pad_hw >= 0,
                       "content.front_kernel_hw/front_stride_hw/front_pad_hw invalid");
  Require<ConfigError>(!stage_channels.empty(), "content.stage_channels must be non-empty");
  for (int c : stage_channels) {
    Require<ConfigError>(c > 0, "content.stage_channels entries must be positive");
  }
  Require<ConfigError>(blocks_per_stage >= 0, "content.blocks_per_stage must be >= 0");
  Require<ConfigError>(feature_dim > 0, "content.feature_dim must be positive");
  Require<ConfigError>(latent_dim > 0, "content.latent_dim must be positive");
  Require<ConfigError>(head_kernel % 2 == 1, "content.head_kernel must be odd");
  Require<ConfigError>(logvar_clip > 0, "content.logvar_clip must be positive");
  const int front_out = (image_size + 2 * front_pad_hw - front_kernel_hw) / front_stride_hw + 1;
  Require<ConfigError>(front_out >= 1, "content.image_size too small for the front end");
}

json ContentEncoderConfig::ToJson() const {
  return json{{"image_size", image_size},         {"front_channels", front_channels},
              {"front_kernel_t", front_kernel_t}, {"front_kernel_hw", front_kernel_hw},
              {"front_stride_hw", front_stride_hw}, {"front_pad_hw", front_pad_hw},
              {"stage_channels", stage_channels}, {"blocks_per_stage", blocks_per_stage},
              {"feature_dim", feature_dim},       {"latent_dim", latent_dim},
              {"head_kernel", head_kernel},       {"logvar_clip", logvar_clip}};
}

ContentEncoderConfig ContentEncoderConfig::FromJson(const json& j) {
  ContentEncoderConfig c;
  c.image_size = j.at("image_size").get<int>();
  c.front_channels = j.at("front_channels").get<int>();
  c.front_kernel_t = j.at("front_kernel_t").get<int>();
  c.front_kernel_hw = j.at("front_kernel_hw").get<int>();
  c.front_stride_hw = j.at("front_stride_hw").get<int>();
  c.front_pad_hw = j.at("front_pad_hw").get<int>();
  c.stage_channels = j.at("stage_channels").get<std::vector<int>>();
  c.blocks_per_stage = j.at("blocks_per_stage").get<int>();
  c.feature_dim = j.at("feature_dim").get<int>();
  c.latent_dim = j.at("latent_dim").get<int>();
  c.head_kernel = j.at("head_kernel").get<int>();
  c.logvar_clip = j.at("logvar_clip").get<double>();
  return c;
}

namespace {

int DownSize(int n) { return (n + 2 - 3) / 2 + 1; }

nn::Conv2dGeometry Square3x3(int frames, int hw, int stride) {
  nn::Conv2dGeometry g;
  g.batch = frames;
  g.height = g.width = hw;
  g.kernel_h = g.kernel_w = 3;
  g.stride_h = g.stride_w = stride;
  g.pad_h = g.pad_w = 1;
  return g;
}

}  // namespace

ContentEncoder::ContentEncoder(const ContentEncoderConfig& cfg, uint64_t seed) : cfg_(cfg) {
  cfg_.Validate();
  Rng rng(HashSeeds({seed, 0xc0de}));
  const int kt = cfg_.front_kernel_t, khw = cfg_.front_kernel_hw;
  front_ = nn::MakeConv(params_, "front", kt * khw * khw, 1, cfg_.front_channels, rng);
  int hw = (cfg_.image_size + 2 * cfg_.front_pad_hw - khw) / cfg_.front_stride_hw + 1;
  int cin = cfg_.front_channels;
  for (size_t s = 0; s < cfg_.stage_channels.size(); ++s) {
    const int c = cfg_.stage_channels[s];
    const std::string name = "stage" + std::to_string(s);
    Stage st;
    st.down = nn::MakeConv(params_, name + ".down", 9, cin, c, rng);
    for (int b = 0; b < cfg_.blocks_per_stage; ++b) {
      const std::string bn = name + ".block" + std::to_string(b);
      ResBlock rb;
      rb.a = nn::MakeConv(params_, bn + ".a", 9, c, c, rng);
      rb.b = nn::MakeConv(params_, bn + ".b", 9, c, c, rng, 0.5);
      st.blocks.push_back(rb);
    }
    stages_.push_back(std::move(st));
    cin = c;
    hw = DownSize(hw);
  }
  trunk_hw_ = hw;
  proj_ = nn::MakeDense(params_, "proj", static_cast<Index>(hw) * hw * cin, cfg_.feature_dim,
                        rng, std::sqrt(2.0));
  mu_head_ = nn::MakeConv(params_, "head_mu", cfg_.head_kernel, cfg_.feature_dim,
                          cfg_.latent_dim, rng, 1.0);
  logvar_head_ = nn::MakeConv(params_, "head_logvar", cfg_.head_kernel, cfg_.feature_dim,
                              cfg_.latent_dim, rng, 0.1);
}

const ContentEncoder::Indices& ContentEncoder::IndicesFor(int frames) const {
  std::lock_guard<std::mutex> lock(cache_mu_);
  auto it = cache_.find(frames);
  if (it != cache_.end()) return it->second;
  Indices idx;
  nn::Conv3dGeometry g;
  g.time = frames;
  g.height = g.width = cfg_.image_size;
  g.kernel_t = cfg_.front_kernel_t;
  g.kernel_h = g.kernel_w = cfg_.front_kernel_hw;
  g.stride_h = g.stride_w = cfg_.front_stride_hw;
  g.pad_t = cfg_.front_kernel_t / 2;
  g.pad_h = g.pad_w = cfg_.front_pad_hw;
  idx.front = nn::Conv3dIndex(g);
  int hw = g.OutHeight();
  for (size_t s = 0; s < stages_.size(); ++s) {
    idx.down.push_back(nn::Conv2dIndex(Square3x3(frames, hw, 2)));
    hw = DownSize(hw);
    idx.same.push_back(nn::Conv2dIndex(Square3x3(frames, hw, 1)));
  }
  idx.head = nn::Conv1dSameIndex(frames, cfg_.head_kernel);
  return cache_.emplace(frames, std::move(idx)).first->second;
}

ContentEncoder::Output ContentEncoder::Forward(const corpus::VideoClip& clip) const {
  Require(clip.height == cfg_.image_size && clip.width == cfg_.image_size,
          "encode_video: expected ", cfg_.image_size, "x", cfg_.image_size, " frames, got ",
          clip.height, "x", clip.width);
  const int frames = static_cast<int>(clip.NumFrames());
  Require(frames >= 1, "encode_video: empty clip");
  const Indices& idx = IndicesFor(frames);

  Mat pixels(static_cast<Index>(frames) * clip.height * clip.width, 1);
  for (Index t = 0; t < frames; ++t) {
    for (Index i = 0; i < clip.frames.cols(); ++i) {
      pixels(t * clip.frames.cols() + i, 0) = 2.0 * clip.frames(t, i) - 1.0;
    }
  }
  Var h = nn::Relu(front_(Var::Constant(std::move(pixels)), idx.front));
  for (size_t s = 0; s < stages_.size(); ++s) {
    h = nn::Relu(stages_[s].down(h, idx.down[s]));
    for (const ResBlock& rb : stages_[s].blocks) {
      const Var inner = rb.b(nn::Relu(rb.a(h, idx.same[s])), idx.same[s]);
      h = nn::Relu(nn::Add(h, inner));
    }
  }
  const Index per_frame = static_cast<Index>(trunk_hw_) * trunk_hw_ * h.cols();
  h = nn::Relu(proj_(nn::Reshape(h, frames, per_frame)));
  Output out;
  out.mu = mu_head_(h, idx.head);
  out.logvar = nn::Clamp(logvar_head_(h, idx.head), -cfg_.logvar_clip, cfg_.logvar_clip);
  return out;
}

ContentPosterior ContentEncoder::Encode(const corpus::VideoClip& clip) const {
  const Output o = Forward(clip);
  return ContentPosterior{o.mu.value(), o.logvar.value()};
}

Var Reparameterize(const Var& mu, const Var& logvar, const Mat& eps) {
  Require(mu.rows() == eps.rows() && mu.cols() == eps.cols() && logvar.rows() == mu.rows() &&
              logvar.cols() == mu.cols(),
          "reparameterize: shape mismatch");
  return nn::Add(mu, nn::Mul(nn::Exp(nn::Scale(logvar, 0.5)), Var::Constant(eps)));
}

Mat StandardNormal(Index rows, Index cols, uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Mat m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

ContentLatent SampleLatent(const ContentPosterior& post, uint64_t seed) {
  Require(post.mu.allFinite() && post.logvar.allFinite(), "sample_latent: non-finite posterior");
  const Mat eps = StandardNormal(post.mu.rows(), post.mu.cols(), seed);
  ContentLatent lat;
  lat.z = post.mu + ((0.5 * post.logvar.array()).exp() * eps.array()).matrix();
  return lat;
}

Var KlToStandardNormal(const Var& mu, const Var& logvar) {
  Require(mu.rows() == logvar.rows() && mu.cols() == logvar.cols() && mu.rows() > 0,
          "kl: shape mismatch");
  const Mat& m = mu.value();
  const Mat& lv = logvar.value();
  const double inv_t = 1.0 / static_cast<double>(m.rows());
  const double kl =
      0.5 * inv_t * (m.array().square() + lv.array().exp() - 1.0 - lv.array()).sum();
  Mat value(1, 1);
  value(0, 0) = kl;
  return nn::MakeOp(std::move(value), {mu, logvar}, [inv_t](nn::Node& self) {
    const double g = self.grad(0, 0);
    auto& pm = *self.parents[0];
    auto& pl = *self.parents[1];
    if (pm.requires_grad) pm.Grad() += (g * inv_t) * pm.value;
    if (pl.requires_grad) {
      pl.Grad().array() += (0.5 * g * inv_t) * (pl.value.array().exp() - 1.0);
    }
  });
}

double KlToStandardNormal(const ContentPosterior& post) {
  return KlToStandardNormal(Var::Constant(post.mu), Var::Constant(post.logvar)).scalar();
}

Mat UpsampleLatent(const Mat& z, int alpha) {
  Require(alpha >= 1, "upsample_latent: alpha must be >= 1");
  return nn::RepeatRows(Var::Constant(z), alpha).value();
}

ContentLatent& UpsampleLatent(ContentLatent& lat, int alpha) {
  lat.upsampled = UpsampleLatent(lat.z, alpha);
  return lat;
}

}  // namespace l2s::content
