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

#ifndef L2S_IDENTITY_IDENTITY_H_
#define L2S_IDENTITY_IDENTITY_H_

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "l2s/corpus/render.h"
#include "l2s/dsp/types.h"
#include "l2s/nn/conv_index.h"
#include "l2s/nn/params.h"

namespace l2s::identity {

enum class Source { kFace, kSpeech };
const char* SourceName(Source s);
Source ParseSource(const std::string& s);

struct SpeakerEmbedding {
  RowVec vec;
  Source source = Source::kFace;
};

struct ProjectedEmbedding {
  RowVec vec;  // nonnegative
};

struct IdentityConfig {
  int n_mels = 80;
  int face_size = 32;
  int embed_dim = 32;
  int proj_dim = 16;
  // Speech: 3x3 convolutions with frequency stride 2 and circular time
  // padding, a per-frame hidden layer, then mean pooling over time.
  std::vector<int> speech_channels = {8, 16};
  int speech_hidden = 64;
  // Log-mel input is mapped to (mel + mel_offset) * mel_scale.
  double mel_offset = 6.0;
  double mel_scale = 0.25;
  // Face: stride-2 3x3 convolutions, then a two-layer head.
  std::vector<int> face_channels = {16, 32, 32};
  int face_hidden = 64;
  int n_train_speakers = 20;

  static IdentityConfig Toy();
  static IdentityConfig Paper();
  void Validate() const;
  nlohmann::json ToJson() const;
  static IdentityConfig FromJson(const nlohmann::json& j);
};

class SpeechEncoder {
 public:
  SpeechEncoder(const IdentityConfig& cfg, uint64_t seed);

  // mel: [n x n_mels] -> [1 x embed_dim].
  nn::Var Forward(const dsp::MelSpectrogram& mel) const;
  SpeakerEmbedding Embed(const dsp::MelSpectrogram& mel) const;
  // Speaker logits used only for pretraining: [N x D_e] -> [N x n_train_speakers].
  nn::Var Classify(const nn::Var& embeddings) const;

  // Once frozen the encoder refuses to hand out trainable parameters.
  void Freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  std::vector<nn::Var> TrainableParams() const;

  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }
  const IdentityConfig& config() const { return cfg_; }

 private:
  const std::vector<nn::ConvIndex>& IndicesFor(int frames) const;

  IdentityConfig cfg_;
  nn::ParamSet params_;
  std::vector<nn::Conv> convs_;
  nn::Dense hidden_, out_, classifier_;
  int out_width_ = 0;
  bool frozen_ = false;

  mutable std::mutex cache_mu_;
  mutable std::map<int, std::vector<nn::ConvIndex>> cache_;
};

class FaceEncoder {
 public:
  FaceEncoder(const IdentityConfig& cfg, uint64_t seed);

  // A batch of faces -> [N x embed_dim].
  nn::Var Forward(const std::vector<const corpus::FaceImage*>& faces) const;
  SpeakerEmbedding Embed(const corpus::FaceImage& face) const;
  // [N x D_e] face embeddings -> [N x n_train_speakers] logits.
  nn::Var Classify(const nn::Var& embeddings) const;
  // Errors on embeddings that did not come from a face.
  RowVec Classify(const SpeakerEmbedding& e) const;

  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }
  const IdentityConfig& config() const { return cfg_; }

 private:
  const std::vector<nn::ConvIndex>& IndicesFor(int batch) const;

  IdentityConfig cfg_;
  nn::ParamSet params_;
  std::vector<nn::Conv> convs_;
  nn::Dense hidden_, out_, classifier_;
  int out_hw_ = 0;

  mutable std::mutex cache_mu_;
  mutable std::map<int, std::vector<nn::ConvIndex>> cache_;
};

// Linear layer and rectification adapting D_e embeddings to the decoder.
class EmbeddingProjection {
 public:
  EmbeddingProjection(const IdentityConfig& cfg, uint64_t seed);

  nn::Var Forward(const nn::Var& embeddings) const;
  ProjectedEmbedding Project(const SpeakerEmbedding& e) const;

  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }

 private:
  nn::ParamSet params_;
  nn::Dense dense_;
};

}  // namespace l2s::identity

#endif  // L2S_IDENTITY_IDENTITY_H_
