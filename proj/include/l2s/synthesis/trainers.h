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

#ifndef L2S_SYNTHESIS_TRAINERS_H_
#define L2S_SYNTHESIS_TRAINERS_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "l2s/corpus/corpus.h"
#include "l2s/crossmodal/crossmodal.h"
#include "l2s/synthesis/elbo.h"
#include "l2s/synthesis/model.h"

namespace l2s::synthesis {

// Receives one JSON object per optimizer step.
using StepLogger = std::function<void(const nlohmann::json&)>;

// Stage 0: speech encoder pretrained as a speaker classifier.
struct SpeakerPretrainConfig {
  int steps = 300;
  int batch_size = 16;
  double lr = 1e-3;
  double clip_norm = 5.0;

  void Validate() const;
  nlohmann::json ToJson() const;
  static SpeakerPretrainConfig FromJson(const nlohmann::json& j);
};

// Stage 1: face encoder against the frozen speech encoder.
struct CrossmodalTrainConfig {
  int steps = 400;
  int batch_size = 32;
  double lr = 1e-3;
  double clip_norm = 5.0;
  crossmodal::LossWeights weights;
  // Train on faces with fresh texture noise and a random lip pattern.
  bool augment_faces = true;

  void Validate() const;
  nlohmann::json ToJson() const;
  static CrossmodalTrainConfig FromJson(const nlohmann::json& j);
};

// Stage 2: content encoder, projection, decoder and postnet.
struct Lip2SpeechTrainConfig {
  int steps = 1500;
  int batch_size = 8;
  double lr = 5e-4;
  double clip_norm = 5.0;
  double kl_weight = kDefaultKlWeight;

  void Validate() const;
  nlohmann::json ToJson() const;
  static Lip2SpeechTrainConfig FromJson(const nlohmann::json& j);
};

struct SpeakerPretrainReport {
  std::vector<double> losses;
  double train_accuracy = 0;  // on the final pass over all training items
};

struct CrossmodalTrainReport {
  std::vector<crossmodal::StepLoss> steps;
  int gc_drops = 0;
  std::string speech_checksum_before, speech_checksum_after;
};

struct Lip2SpeechTrainReport {
  std::vector<LossBreakdown> steps;
  std::string face_checksum_before, face_checksum_after;
};

// Face used for stage-1 training: the speaker's face with fresh texture noise
// and the lip pattern of `token` (< 0 for neutral).
corpus::FaceImage AugmentedFace(const corpus::SyntheticSpeaker& spk, int token, uint64_t seed);

SpeakerPretrainReport PretrainSpeechEncoder(const corpus::Corpus& corpus,
                                            const std::vector<const corpus::CorpusItem*>& items,
                                            IdentityModel& model,
                                            const SpeakerPretrainConfig& cfg, uint64_t seed,
                                            const StepLogger& log = nullptr);

// Freezes the speech encoder, then trains the face encoder.
CrossmodalTrainReport TrainFaceEncoder(const corpus::Corpus& corpus,
                                       const std::vector<const corpus::CorpusItem*>& items,
                                       IdentityModel& model, const CrossmodalTrainConfig& cfg,
                                       uint64_t seed, const StepLogger& log = nullptr);

Lip2SpeechTrainReport TrainLip2Speech(const corpus::Corpus& corpus,
                                      const std::vector<const corpus::CorpusItem*>& items,
                                      const IdentityModel& ids, Lip2SpeechModel& model,
                                      const Lip2SpeechTrainConfig& cfg, uint64_t seed,
                                      const StepLogger& log = nullptr);

}  // namespace l2s::synthesis

#endif  // L2S_SYNTHESIS_TRAINERS_H_
