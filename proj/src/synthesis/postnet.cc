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

#include "l2s/synthesis/postnet.h"

#include <numeric>

#include "l2s/base/error.h"
#include "l2s/base/random.h"
#include "l2s/nn/ops.h"

namespace l2s::synthesis {

using nlohmann::json;
using nn::Var;

PostnetConfig PostnetConfig::Toy() { return PostnetConfig{}; }

PostnetConfig PostnetConfig::Paper() {
  PostnetConfig c;
  c.channels = 512;
  return c;
}

void PostnetConfig::Validate() const {
  Require<ConfigError>(n_mels > 0, "postnet.n_mels must be positive");
  Require<ConfigError>(n_linear > 0, "postnet.n_linear must be positive");
  Require<ConfigError>(channels > 0, "postnet.channels must be positive");
  Require<ConfigError>(num_layers >= 1, "postnet.num_layers must be >= 1");
  Require<ConfigError>(kernel % 2 == 1, "postnet.kernel must be odd");
  Require<ConfigError>(leaky_slope >= 0 && leaky_slope < 1,
                       "postnet.leaky_slope must be in [0, 1)");
}

json PostnetConfig::ToJson() const {
  return json{{"n_mels", n_mels},         {"n_linear", n_linear}, {"channels", channels},
              {"num_layers", num_layers}, {"kernel", kernel},     {"leaky_slope", leaky_slope}};
}

PostnetConfig PostnetConfig::FromJson(const json& j) {
  PostnetConfig c;
  c.n_mels = j.at("n_mels").get<int>();
  c.n_linear = j.at("n_linear").get<int>();
  c.channels = j.at("channels").get<int>();
  c.num_layers = j.at("num_layers").get<int>();
  c.kernel = j.at("kernel").get<int>();
  c.leaky_slope = j.at("leaky_slope").get<double>();
  return c;
}

nn::ConvIndex SegmentedConv1dIndex(const std::vector<Index>& lengths, int kernel) {
  Require(kernel % 2 == 1, "conv1d: same padding needs an odd kernel");
  const int pad = kernel / 2;
  nn::ConvIndex idx;
  idx.taps = kernel;
  idx.out_rows = std::accumulate(lengths.begin(), lengths.end(), Index{0});
  idx.src.reserve(static_cast<size_t>(idx.out_rows) * kernel);
  Index start = 0;
  for (Index len : lengths) {
    Require(len >= 1, "conv1d: empty sequence in batch");
    for (Index t = 0; t < len; ++t) {
      for (int k = 0; k < kernel; ++k) {
        const Index s = t + k - pad;
        idx.src.push_back(s >= 0 && s < len ? static_cast<int>(start + s) : -1);
      }
    }
    start += len;
  }
  return idx;
}

Postnet::Postnet(const PostnetConfig& cfg, uint64_t seed) : cfg_(cfg) {
  cfg_.Validate();
  Rng rng(HashSeeds({seed, 0x9057}));
  Index cin = cfg_.n_mels;
  for (int i = 0; i < cfg_.num_layers; ++i) {
    const std::string p = "postnet.layer" + std::to_string(i);
    Layer l;
    l.conv = nn::MakeConv(params_, p + ".conv", cfg_.kernel, cin, cfg_.channels, rng);
    l.norm = nn::MakeBatchNorm(params_, p + ".bn", cfg_.channels);
    layers_.push_back(l);
    cin = cfg_.channels;
  }
  out_ = nn::MakeDense(params_, "postnet.out", cin, cfg_.n_linear, rng);
}

Var Postnet::Forward(const Var& mel, const std::vector<Index>& lengths, bool training) const {
  Require(mel.cols() == cfg_.n_mels, "postnet: expected ", cfg_.n_mels, " mel columns, got ",
          mel.cols());
  Require(std::accumulate(lengths.begin(), lengths.end(), Index{0}) == mel.rows(),
          "postnet: sequence lengths do not add up to ", mel.rows(), " rows");
  const nn::ConvIndex idx = SegmentedConv1dIndex(lengths, cfg_.kernel);
  Var h = mel;
  for (const Layer& l : layers_) {
    h = nn::LeakyRelu(l.norm.Forward(l.conv(h, idx), training), cfg_.leaky_slope);
  }
  return nn::Softplus(out_(h));
}

Mat Postnet::Convert(const Mat& mel) const {
  return Forward(Var::Constant(mel), {mel.rows()}, false).value();
}

}  // namespace l2s::synthesis
