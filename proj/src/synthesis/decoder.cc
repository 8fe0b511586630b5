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

#include "l2s/synthesis/decoder.h"

#include <cmath>

#include "l2s/base/error.h"
#include "l2s/base/random.h"
#include "l2s/nn/ops.h"

namespace l2s::synthesis {

using nlohmann::json;
using nn::Var;

DecoderConfig DecoderConfig::Toy() { return DecoderConfig{}; }

DecoderConfig DecoderConfig::Paper() {
  DecoderConfig c;
  c.latent_dim = 512;
  c.speaker_dim = 256;
  c.model_dim = 256;
  c.num_blocks = 5;
  c.num_heads = 4;
  c.ffn_dim = 1024;
  c.conv_kernel = 31;
  return c;
}

void DecoderConfig::Validate() const {
  Require<ConfigError>(latent_dim > 0, "decoder.latent_dim must be positive");
  Require<ConfigError>(speaker_dim > 0, "decoder.speaker_dim must be positive");
  Require<ConfigError>(model_dim > 0, "decoder.model_dim must be positive");
  Require<ConfigError>(num_blocks >= 1, "decoder.num_blocks must be >= 1");
  Require<ConfigError>(num_heads >= 1 && model_dim % num_heads == 0,
                       "decoder.num_heads must divide decoder.model_dim");
  Require<ConfigError>(ffn_dim > 0, "decoder.ffn_dim must be positive");
  Require<ConfigError>(conv_kernel % 2 == 1, "decoder.conv_kernel must be odd");
  Require<ConfigError>(n_mels > 0, "decoder.n_mels must be positive");
}

json DecoderConfig::ToJson() const {
  return json{{"latent_dim", latent_dim}, {"speaker_dim", speaker_dim},
              {"model_dim", model_dim},   {"num_blocks", num_blocks},
              {"num_heads", num_heads},   {"ffn_dim", ffn_dim},
              {"conv_kernel", conv_kernel}, {"n_mels", n_mels}};
}

DecoderConfig DecoderConfig::FromJson(const json& j) {
  DecoderConfig c;
  c.latent_dim = j.at("latent_dim").get<int>();
  c.speaker_dim = j.at("speaker_dim").get<int>();
  c.model_dim = j.at("model_dim").get<int>();
  c.num_blocks = j.at("num_blocks").get<int>();
  c.num_heads = j.at("num_heads").get<int>();
  c.ffn_dim = j.at("ffn_dim").get<int>();
  c.conv_kernel = j.at("conv_kernel").get<int>();
  c.n_mels = j.at("n_mels").get<int>();
  return c;
}

Mat PositionalEncoding(Index length, Index dim) {
  Mat pe(length, dim);
  for (Index t = 0; t < length; ++t) {
    for (Index i = 0; i < dim; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / dim);
      pe(t, i) = i % 2 == 0 ? std::sin(t * rate) : std::cos(t * rate);
    }
  }
  return pe;
}

ConformerDecoder::ConformerDecoder(const DecoderConfig& cfg, uint64_t seed) : cfg_(cfg) {
  cfg_.Validate();
  Rng rng(HashSeeds({seed, 0xdec0}));
  const Index d = cfg_.model_dim;
  input_ = nn::MakeDense(params_, "dec.input", cfg_.latent_dim + cfg_.speaker_dim, d, rng);
  auto make_ff = [&](const std::string& name) {
    FeedForward ff;
    ff.norm = nn::MakeLayerNorm(params_, name + ".norm", d);
    ff.up = nn::MakeDense(params_, name + ".up", d, cfg_.ffn_dim, rng, std::sqrt(2.0));
    ff.down = nn::MakeDense(params_, name + ".down", cfg_.ffn_dim, d, rng, 0.5);
    return ff;
  };
  for (int i = 0; i < cfg_.num_blocks; ++i) {
    const std::string p = "dec.block" + std::to_string(i);
    Block b;
    b.ff1 = make_ff(p + ".ff1");
    b.attn_norm = nn::MakeLayerNorm(params_, p + ".attn.norm", d);
    b.q = nn::MakeDense(params_, p + ".attn.q", d, d, rng);
    b.k = nn::MakeDense(params_, p + ".attn.k", d, d, rng);
    b.v = nn::MakeDense(params_, p + ".attn.v", d, d, rng);
    b.o = nn::MakeDense(params_, p + ".attn.o", d, d, rng, 0.5);
    b.conv_norm = nn::MakeLayerNorm(params_, p + ".conv.norm", d);
    b.pointwise1 = nn::MakeDense(params_, p + ".conv.pw1", d, 2 * d, rng);
    b.depthwise_w = params_.Add(p + ".conv.dw.w",
                                nn::UniformInit(cfg_.conv_kernel, d, cfg_.conv_kernel, 1.0, rng));
    b.depthwise_b = params_.Add(p + ".conv.dw.b", Mat::Zero(1, d));
    b.depthwise_norm = nn::MakeLayerNorm(params_, p + ".conv.dw_norm", d);
    b.pointwise2 = nn::MakeDense(params_, p + ".conv.pw2", d, d, rng, 0.5);
    b.ff2 = make_ff(p + ".ff2");
    b.out_norm = nn::MakeLayerNorm(params_, p + ".out_norm", d);
    blocks_.push_back(std::move(b));
  }
  head_ = nn::MakeDense(params_, "dec.head", d, cfg_.n_mels, rng);
}

Var ConformerDecoder::FeedForwardPass(const FeedForward& ff, const Var& x) const {
  return ff.down(nn::Silu(ff.up(ff.norm(x))));
}

Var ConformerDecoder::Attention(const Block& b, const Var& x) const {
  const Var h = b.attn_norm(x);
  const Var q = b.q(h), k = b.k(h), v = b.v(h);
  const Index dh = cfg_.model_dim / cfg_.num_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Var> heads;
  for (int i = 0; i < cfg_.num_heads; ++i) {
    const Var qi = nn::SliceCols(q, i * dh, dh);
    const Var ki = nn::SliceCols(k, i * dh, dh);
    const Var vi = nn::SliceCols(v, i * dh, dh);
    const Var weights = nn::SoftmaxRows(nn::Scale(nn::MatMulBT(qi, ki), scale));
    heads.push_back(nn::MatMul(weights, vi));
  }
  return b.o(heads.size() == 1 ? heads[0] : nn::ConcatCols(heads));
}

Var ConformerDecoder::ConvModule(const Block& b, const Var& x) const {
  Var h = nn::Glu(b.pointwise1(b.conv_norm(x)));
  h = nn::DepthwiseConv1d(h, b.depthwise_w, b.depthwise_b);
  h = nn::Silu(b.depthwise_norm(h));
  return b.pointwise2(h);
}

Var ConformerDecoder::Forward(const Var& up_latent, const Var& speaker) const {
  Require(up_latent.cols() == cfg_.latent_dim, "decode: expected latent dim ", cfg_.latent_dim,
          ", got ", up_latent.cols());
  Require(speaker.rows() == 1 && speaker.cols() == cfg_.speaker_dim,
          "decode: expected speaker vector [1 x ", cfg_.speaker_dim, "], got [", speaker.rows(),
          " x ", speaker.cols(), "]");
  const Index len = up_latent.rows();
  Require(len >= 1, "decode: empty latent sequence");
  Require(up_latent.value().allFinite() && speaker.value().allFinite(),
          "decode: non-finite input");
  Var x = input_(nn::ConcatCols({up_latent, nn::TileRows(speaker, len)}));
  x = nn::Add(x, Var::Constant(PositionalEncoding(len, cfg_.model_dim)));
  for (const Block& b : blocks_) {
    x = nn::Add(x, nn::Scale(FeedForwardPass(b.ff1, x), 0.5));
    x = nn::Add(x, Attention(b, x));
    x = nn::Add(x, ConvModule(b, x));
    x = nn::Add(x, nn::Scale(FeedForwardPass(b.ff2, x), 0.5));
    x = b.out_norm(x);
  }
  return head_(x);
}

Mat ConformerDecoder::Decode(const Mat& up_latent, const RowVec& speaker) const {
  return Forward(Var::Constant(up_latent), Var::Constant(speaker)).value();
}

}  // namespace l2s::synthesis
