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

#include "l2s/identity/identity.h"

#include <cmath>

#include "l2s/base/error.h"
#include "l2s/base/random.h"
#include "l2s/nn/ops.h"

namespace l2s::identity {

using nlohmann::json;
using nn::Var;

const char* SourceName(Source s) { return s == Source::kFace ? "face" : "speech"; }

Source ParseSource(const std::string& s) {
  if (s == "face") return Source::kFace;
  if (s == "speech") return Source::kSpeech;
  throw ConfigError("unknown speaker source '" + s + "' (expected face or speech)");
}

IdentityConfig IdentityConfig::Toy() { return IdentityConfig{}; }

IdentityConfig IdentityConfig::Paper() {
  IdentityConfig c;
  c.face_size = 112;
  c.embed_dim = 512;
  c.proj_dim = 256;
  c.speech_channels = {32, 64};
  c.speech_hidden = 512;
  c.face_channels = {32, 64, 128};
  c.face_hidden = 512;
  return c;
}

void IdentityConfig::Validate() const {
  Require<ConfigError>(n_mels > 0, "identity.n_mels must be positive");
  Require<ConfigError>(face_size >= 8, "identity.face_size must be >= 8");
  Require<ConfigError>(embed_dim > 0, "identity.embed_dim must be positive");
  Require<ConfigError>(proj_dim > 0, "identity.proj_dim must be positive");
  Require<ConfigError>(!speech_channels.empty(), "identity.speech_channels must be non-empty");
  for (int c : speech_channels) {
    Require<ConfigError>(c > 0, "identity.speech_channels entries must be positive");
  }
  Require<ConfigError>(speech_hidden > 0, "identity.speech_hidden must be positive");
  Require<ConfigError>(mel_scale > 0, "identity.mel_scale must be positive");
  Require<ConfigError>(!face_channels.empty(), "identity.face_channels must be non-empty");
  for (int c : face_channels) {
    Require<ConfigError>(c > 0, "identity.face_channels entries must be positive");
  }
  Require<ConfigError>(face_hidden > 0, "identity.face_hidden must be positive");
  Require<ConfigError>(n_train_speakers >= 2, "identity.n_train_speakers must be >= 2");
}

json IdentityConfig::ToJson() const {
  return json{{"n_mels", n_mels},
              {"face_size", face_size},
              {"embed_dim", embed_dim},
              {"proj_dim", proj_dim},
              {"speech_channels", speech_channels},
              {"speech_hidden", speech_hidden},
              {"mel_offset", mel_offset},
              {"mel_scale", mel_scale},
              {"face_channels", face_channels},
              {"face_hidden", face_hidden},
              {"n_train_speakers", n_train_speakers}};
}

IdentityConfig IdentityConfig::FromJson(const json& j) {
  IdentityConfig c;
  c.n_mels = j.at("n_mels").get<int>();
  c.face_size = j.at("face_size").get<int>();
  c.embed_dim = j.at("embed_dim").get<int>();
  c.proj_dim = j.at("proj_dim").get<int>();
  c.speech_channels = j.at("speech_channels").get<std::vector<int>>();
  c.speech_hidden = j.at("speech_hidden").get<int>();
  c.mel_offset = j.at("mel_offset").get<double>();
  c.mel_scale = j.at("mel_scale").get<double>();
  c.face_channels = j.at("face_channels").get<std::vector<int>>();
  c.face_hidden = j.at("face_hidden").get<int>();
  c.n_train_speakers = j.at("n_train_speakers").get<int>();
  return c;
}

namespace {

int Halve(int n) { return (n + 2 - 3) / 2 + 1; }

}  // namespace

SpeechEncoder::SpeechEncoder(const IdentityConfig& cfg, uint64_t seed) : cfg_(cfg) {
  cfg_.Validate();
  Rng rng(HashSeeds({seed, 0x55e}));
  int cin = 1, width = cfg_.n_mels;
  for (size_t i = 0; i < cfg_.speech_channels.size(); ++i) {
    const int c = cfg_.speech_channels[i];
    convs_.push_back(nn::MakeConv(params_, "speech.conv" + std::to_string(i), 9, cin, c, rng));
    cin = c;
    width = Halve(width);
  }
  out_width_ = width;
  hidden_ = nn::MakeDense(params_, "speech.hidden", static_cast<Index>(width) * cin,
                          cfg_.speech_hidden, rng, std::sqrt(2.0));
  out_ = nn::MakeDense(params_, "speech.out", cfg_.speech_hidden, cfg_.embed_dim, rng);
  classifier_ = nn::MakeDense(params_, "speech.classifier", cfg_.embed_dim,
                              cfg_.n_train_speakers, rng);
}

const std::vector<nn::ConvIndex>& SpeechEncoder::IndicesFor(int frames) const {
  std::lock_guard<std::mutex> lock(cache_mu_);
  auto it = cache_.find(frames);
  if (it != cache_.end()) return it->second;
  std::vector<nn::ConvIndex> idx;
  int width = cfg_.n_mels;
  for (size_t i = 0; i < convs_.size(); ++i) {
    nn::Conv2dGeometry g;
    g.height = frames;
    g.width = width;
    g.kernel_h = g.kernel_w = 3;
    g.stride_w = 2;
    g.pad_h = g.pad_w = 1;
    g.circular_h = true;
    idx.push_back(nn::Conv2dIndex(g));
    width = g.OutWidth();
  }
  return cache_.emplace(frames, std::move(idx)).first->second;
}

Var SpeechEncoder::Forward(const dsp::MelSpectrogram& mel) const {
  Require(mel.frames.cols() == cfg_.n_mels, "embed_speech: expected ", cfg_.n_mels,
          " mel columns, got ", mel.frames.cols());
  const int frames = static_cast<int>(mel.NumFrames());
  Require(frames >= 1, "embed_speech: empty spectrogram");
  Require(mel.frames.allFinite(), "embed_speech: non-finite input");
  const auto& idx = IndicesFor(frames);
  Mat x(static_cast<Index>(frames) * cfg_.n_mels, 1);
  for (Index i = 0; i < mel.frames.size(); ++i) {
    x(i, 0) = (mel.frames.data()[i] + cfg_.mel_offset) * cfg_.mel_scale;
  }
  Var h = Var::Constant(std::move(x));
  for (size_t i = 0; i < convs_.size(); ++i) h = nn::Relu(convs_[i](h, idx[i]));
  h = nn::Reshape(h, frames, static_cast<Index>(out_width_) * h.cols());
  h = nn::Relu(hidden_(h));
  return out_(nn::MeanRows(h));
}

SpeakerEmbedding SpeechEncoder::Embed(const dsp::MelSpectrogram& mel) const {
  return SpeakerEmbedding{Forward(mel).value(), Source::kSpeech};
}

Var SpeechEncoder::Classify(const Var& embeddings) const { return classifier_(embeddings); }

std::vector<Var> SpeechEncoder::TrainableParams() const {
  Require(!frozen_, "speech encoder is frozen");
  return params_.Trainable();
}

FaceEncoder::FaceEncoder(const IdentityConfig& cfg, uint64_t seed) : cfg_(cfg) {
  cfg_.Validate();
  Rng rng(HashSeeds({seed, 0xface}));
  int cin = 1, hw = cfg_.face_size;
  for (size_t i = 0; i < cfg_.face_channels.size(); ++i) {
    const int c = cfg_.face_channels[i];
    convs_.push_back(nn::MakeConv(params_, "face.conv" + std::to_string(i), 9, cin, c, rng));
    cin = c;
    hw = Halve(hw);
  }
  out_hw_ = hw;
  hidden_ = nn::MakeDense(params_, "face.hidden", static_cast<Index>(hw) * hw * cin,
                          cfg_.face_hidden, rng, std::sqrt(2.0));
  out_ = nn::MakeDense(params_, "face.out", cfg_.face_hidden, cfg_.embed_dim, rng);
  classifier_ =
      nn::MakeDense(params_, "face.classifier", cfg_.embed_dim, cfg_.n_train_speakers, rng);
}

const std::vector<nn::ConvIndex>& FaceEncoder::IndicesFor(int batch) const {
  std::lock_guard<std::mutex> lock(cache_mu_);
  auto it = cache_.find(batch);
  if (it != cache_.end()) return it->second;
  std::vector<nn::ConvIndex> idx;
  int hw = cfg_.face_size;
  for (size_t i = 0; i < convs_.size(); ++i) {
    nn::Conv2dGeometry g;
    g.batch = batch;
    g.height = g.width = hw;
    g.kernel_h = g.kernel_w = 3;
    g.stride_h = g.stride_w = 2;
    g.pad_h = g.pad_w = 1;
    idx.push_back(nn::Conv2dIndex(g));
    hw = g.OutHeight();
  }
  return cache_.emplace(batch, std::move(idx)).first->second;
}

Var FaceEncoder::Forward(const std::vector<const corpus::FaceImage*>& faces) const {
  Require(!faces.empty(), "embed_face: empty batch");
  const Index n = static_cast<Index>(faces.size());
  const Index pixels = static_cast<Index>(cfg_.face_size) * cfg_.face_size;
  Mat x(n * pixels, 1);
  for (Index i = 0; i < n; ++i) {
    const Mat& p = faces[i]->pixels;
    Require(p.rows() == cfg_.face_size && p.cols() == cfg_.face_size, "embed_face: expected ",
            cfg_.face_size, "x", cfg_.face_size, " image, got ", p.rows(), "x", p.cols());
    for (Index k = 0; k < pixels; ++k) x(i * pixels + k, 0) = 2.0 * p.data()[k] - 1.0;
  }
  const auto& idx = IndicesFor(static_cast<int>(n));
  Var h = Var::Constant(std::move(x));
  for (size_t i = 0; i < convs_.size(); ++i) h = nn::Relu(convs_[i](h, idx[i]));
  h = nn::Reshape(h, n, static_cast<Index>(out_hw_) * out_hw_ * h.cols());
  return out_(nn::Relu(hidden_(h)));
}

SpeakerEmbedding FaceEncoder::Embed(const corpus::FaceImage& face) const {
  return SpeakerEmbedding{Forward({&face}).value(), Source::kFace};
}

Var FaceEncoder::Classify(const Var& embeddings) const { return classifier_(embeddings); }

RowVec FaceEncoder::Classify(const SpeakerEmbedding& e) const {
  Require(e.source == Source::kFace, "classify_face: embedding source is ",
          SourceName(e.source));
  return Classify(Var::Constant(e.vec)).value();
}

EmbeddingProjection::EmbeddingProjection(const IdentityConfig& cfg, uint64_t seed) {
  cfg.Validate();
  Rng rng(HashSeeds({seed, 0x9903}));
  dense_ = nn::MakeDense(params_, "proj", cfg.embed_dim, cfg.proj_dim, rng, std::sqrt(2.0));
}

Var EmbeddingProjection::Forward(const Var& embeddings) const {
  Require(embeddings.cols() == dense_.w.rows(), "project_embedding: expected dim ",
          dense_.w.rows(), ", got ", embeddings.cols());
  return nn::Relu(dense_(embeddings));
}

ProjectedEmbedding EmbeddingProjection::Project(const SpeakerEmbedding& e) const {
  return ProjectedEmbedding{Forward(Var::Constant(e.vec)).value()};
}

}  // namespace l2s::identity
