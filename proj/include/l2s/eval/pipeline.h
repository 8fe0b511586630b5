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

#ifndef L2S_EVAL_PIPELINE_H_
#define L2S_EVAL_PIPELINE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "l2s/corpus/corpus.h"
#include "l2s/eval/metrics.h"
#include "l2s/synthesis/model.h"

namespace l2s::eval {

using ItemList = std::vector<const corpus::CorpusItem*>;

struct VerificationReport {
  double eer = 0;
  double mean_matched_cosine = 0;
  double mean_mismatched_cosine = 0;
  int n_genuine = 0;
  int n_impostor = 0;
  // One FSE per speaker (from the stored face) and one SSE per item.
  Mat fse, sse;
  std::vector<int> fse_speakers;

  nlohmann::json ToJson() const;
};

// Scores every item's SSE against every listed speaker's FSE: same speaker
// is genuine, any other speaker is impostor.
VerificationReport EvaluateVerification(const corpus::Corpus& corpus, const ItemList& items,
                                        const synthesis::IdentityModel& ids);

struct ProbeInputs {
  std::vector<Mat> latents;  // sampled z per item
  std::vector<int> speaker_ids;
  std::vector<corpus::Gender> genders;
};

// Content latents drawn from the posterior, one seeded sample per item.
ProbeInputs CollectLatents(const corpus::Corpus& corpus, const ItemList& items,
                           const synthesis::Lip2SpeechModel& model, uint64_t seed);

// Face-conditioned synthesis of each item, pitch-classified.
GenderMatchReport EvaluateGenderMatch(const corpus::Corpus& corpus, const ItemList& items,
                                      const synthesis::IdentityModel& ids,
                                      const synthesis::Lip2SpeechModel& model, int gl_iters,
                                      uint64_t seed);

// Mean absolute log-mel error of face-conditioned predictions.
double MeanL1Mel(const corpus::Corpus& corpus, const ItemList& items,
                 const synthesis::IdentityModel& ids, const synthesis::Lip2SpeechModel& model);

struct EvalOptions {
  int gl_iters = 60;
  uint64_t seed = 0;
  ProbeConfig probe;
  // Directory for scatter CSVs; empty skips the export.
  std::string scatter_dir;
};

struct EvalReport {
  VerificationReport verification;
  ProbeReport probe;
  GenderMatchReport gender;
  double l1_mel_seen_test = 0;

  nlohmann::json ToJson() const;
};

// Verification, probe and gender match on unseen speakers; l1_mel on seen
// speakers' test split.
EvalReport Evaluate(const corpus::Corpus& corpus, const synthesis::IdentityModel& ids,
                    const synthesis::Lip2SpeechModel& model, const EvalOptions& opts);

}  // namespace l2s::eval

#endif  // L2S_EVAL_PIPELINE_H_
