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

#ifndef L2S_SYNTHESIS_MODEL_H_
#define L2S_SYNTHESIS_MODEL_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "l2s/content/content_encoder.h"
#include "l2s/corpus/corpus.h"
#include "l2s/dsp/types.h"
#include "l2s/identity/identity.h"
#include "l2s/synthesis/decoder.h"
#include "l2s/synthesis/postnet.h"

namespace l2s::synthesis {

struct ModelConfig {
  content::ContentEncoderConfig content;
  identity::IdentityConfig identity;
  DecoderConfig decoder;
  PostnetConfig postnet;

  static ModelConfig Toy();
  static ModelConfig Paper();
  // Validates each part and the dimensions they share.
  void Validate() const;
  nlohmann::json ToJson() const;
  static ModelConfig FromJson(const nlohmann::json& j);
};

// Stage-0/1 weights: speech encoder (with its pretraining classifier) and
// face encoder (with its classifier).
class IdentityModel {
 public:
  IdentityModel(const identity::IdentityConfig& cfg, uint64_t seed);

  identity::SpeechEncoder speech;
  identity::FaceEncoder face;

  void Save(const std::string& path, const nlohmann::json& meta = {}) const;
  static std::unique_ptr<IdentityModel> Load(const std::string& path);
};

// Stage-2 weights: everything except the identity encoders and the vocoder.
class Lip2SpeechModel {
 public:
  Lip2SpeechModel(const ModelConfig& cfg, uint64_t seed);

  ModelConfig config;
  content::ContentEncoder content;
  identity::EmbeddingProjection projection;
  ConformerDecoder decoder;
  Postnet postnet;

  std::string Checksum() const;
  void Save(const std::string& path, const nlohmann::json& meta = {}) const;
  static std::unique_ptr<Lip2SpeechModel> Load(const std::string& path);
};

// Where the speaker identity comes from at inference.
struct SpeakerSource {
  identity::Source mode = identity::Source::kFace;
  std::optional<corpus::FaceImage> face;
  std::optional<dsp::Waveform> speech;

  static SpeakerSource Face(corpus::FaceImage img);
  static SpeakerSource Speech(dsp::Waveform wave);
  // Payload must match the mode.
  void Validate() const;
};

// The two channels of an audio-visual item, read on demand.
class MediaSource {
 public:
  virtual ~MediaSource() = default;
  virtual corpus::VideoClip Video() const = 0;
  virtual dsp::Waveform Audio() const = 0;
};

class CorpusMedia : public MediaSource {
 public:
  CorpusMedia(const corpus::Corpus& corpus, const corpus::CorpusItem& item)
      : corpus_(corpus), item_(item) {}
  corpus::VideoClip Video() const override;
  dsp::Waveform Audio() const override;

 private:
  const corpus::Corpus& corpus_;
  const corpus::CorpusItem& item_;
};

identity::SpeakerEmbedding EmbedSource(const SpeakerSource& source, const IdentityModel& ids,
                                       const dsp::DspConfig& dsp);

struct Prediction {
  Mat mel;     // [alpha*T x 80]
  Mat linear;  // [alpha*T x 321]
};

// Posterior mean -> upsample -> decode with the projected embedding -> postnet.
Prediction PredictSpectrograms(const corpus::VideoClip& clip,
                               const identity::SpeakerEmbedding& embedding,
                               const Lip2SpeechModel& model, const dsp::DspConfig& dsp);

dsp::Waveform Synthesize(const corpus::VideoClip& clip, const SpeakerSource& source,
                         const IdentityModel& ids, const Lip2SpeechModel& model,
                         const dsp::DspConfig& dsp, int gl_iters, uint64_t seed);

// Face mode takes the first video frame as the face and never touches the
// audio channel; speech mode reads audio from `reference`, or from the item
// itself when no reference is given.
dsp::Waveform SynthesizeItem(const MediaSource& item, identity::Source mode,
                             const MediaSource* reference, const IdentityModel& ids,
                             const Lip2SpeechModel& model, const dsp::DspConfig& dsp,
                             int gl_iters, uint64_t seed);

}  // namespace l2s::synthesis

#endif  // L2S_SYNTHESIS_MODEL_H_
