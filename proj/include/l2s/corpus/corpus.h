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

#ifndef L2S_CORPUS_CORPUS_H_
#define L2S_CORPUS_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "l2s/corpus/render.h"
#include "l2s/corpus/speaker.h"
#include "l2s/dsp/types.h"

namespace l2s::corpus {

struct CorpusConfig {
  int n_seen_speakers = 20;
  int n_unseen_speakers = 8;
  int utterances_per_speaker = 50;
  int vocab_size = 8;
  int min_tokens = 1;
  int max_tokens = 6;
  int frames_per_token = 8;
  int image_size = kBaseImageSize;
  double train_fraction = 0.90;
  double dev_fraction = 0.05;
  dsp::DspConfig dsp;

  void Validate() const;
  nlohmann::json ToJson() const;
  static CorpusConfig FromJson(const nlohmann::json& j);
};

enum class Split { kTrain, kDev, kTest, kUnseen };
const char* SplitName(Split s);
Split ParseSplit(const std::string& name);

struct SplitCounts {
  int train = 0;
  int dev = 0;
  int test = 0;
};
// train = round(train_fraction*n), dev = floor(dev_fraction*n), test = rest.
SplitCounts ComputeSplit(int n, const CorpusConfig& cfg);

struct CorpusItem {
  std::string id;
  int speaker_id = 0;
  Gender gender = Gender::kMale;
  int utterance_index = 0;
  Utterance utterance;
  Split split = Split::kTrain;
  std::string video_path;  // relative to the corpus root
  std::string audio_path;
};

struct Corpus {
  CorpusConfig cfg;
  uint64_t seed = 0;
  std::string root;
  std::vector<SyntheticSpeaker> seen_speakers;
  std::vector<SyntheticSpeaker> unseen_speakers;
  std::vector<CorpusItem> items;

  const SyntheticSpeaker& Speaker(int id) const;
  bool IsSeen(int speaker_id) const;
  std::vector<const CorpusItem*> ItemsIn(Split split) const;
  std::string FacePath(int speaker_id) const;  // relative
  nlohmann::json ManifestJson() const;
};

// Speakers, utterances and splits, without rendering anything. Seen speakers
// get ids [0, n_seen), unseen ones follow; genders alternate starting male.
Corpus PlanCorpus(const CorpusConfig& cfg, uint64_t seed);
Utterance DrawUtterance(const CorpusConfig& cfg, uint64_t item_seed);
uint64_t ItemSeed(uint64_t master_seed, int speaker_id, int utterance_index);

// Renders every item and writes manifest.json, per-item video.l2st
// ([T, H, W]) and audio.wav, and per-speaker face.l2st ([H, W]).
Corpus MakeCorpus(const CorpusConfig& cfg, uint64_t seed, const std::string& out_dir);
Corpus LoadCorpus(const std::string& dir);

VideoClip LoadVideo(const Corpus& corpus, const CorpusItem& item);
dsp::Waveform LoadAudio(const Corpus& corpus, const CorpusItem& item);
FaceImage LoadFace(const Corpus& corpus, int speaker_id);
// First video frame of an item, as the face the model sees during training.
FaceImage FirstFrame(const VideoClip& clip);

}  // namespace l2s::corpus

#endif  // L2S_CORPUS_CORPUS_H_
