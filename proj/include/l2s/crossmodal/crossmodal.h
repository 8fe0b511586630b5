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

#ifndef L2S_CROSSMODAL_CROSSMODAL_H_
#define L2S_CROSSMODAL_CROSSMODAL_H_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "l2s/corpus/render.h"
#include "l2s/corpus/speaker.h"
#include "l2s/dsp/types.h"
#include "l2s/identity/identity.h"
#include "l2s/nn/adam.h"

namespace l2s::crossmodal {

// Raised when a batch has no same-gender or no cross-gender pair.
class DegenerateBatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LossWeights {
  double w_cs = 1.0;
  double w_gc = 1.0;
  double w_ce = 1.0;
  // Feed unit-length FSE rows to the gender term. On raw vectors the term is
  // unbounded below: scaling all embeddings up drives it to -infinity.
  bool gc_unit_norm = true;

  void Validate() const;
  nlohmann::json ToJson() const;
  static LossWeights FromJson(const nlohmann::json& j);
};

// Mean over rows of 1 - cos(fse_i, sse_i).
nn::Var CosineSimilarityLoss(const nn::Var& fse, const nn::Var& sse);
double CosineSimilarityLoss(const Mat& fse, const Mat& sse);

// Uniform permutation by Fisher-Yates on a 64-bit Mersenne twister, with
// rejection sampling so the draw is platform independent.
std::vector<int> ShufflePermutation(int n, uint64_t seed);

struct Shuffled {
  Mat u;
  std::vector<int> perm;  // u.row(i) = v.row(perm[i])
};
Shuffled ShuffleBatch(const Mat& v, uint64_t seed);

bool GcPairingDegenerate(const std::vector<corpus::Gender>& gv,
                         const std::vector<corpus::Gender>& gu);

// -log(sum_{same} exp(v_i.u_i) / sum_{cross} exp(v_i.u_i)) over paired rows,
// with raw dot products. Throws DegenerateBatchError if either set is empty.
nn::Var GenderContrastiveLoss(const nn::Var& v, const nn::Var& u,
                              const std::vector<corpus::Gender>& gv,
                              const std::vector<corpus::Gender>& gu);
double GenderContrastiveLoss(const Mat& v, const Mat& u, const std::vector<corpus::Gender>& gv,
                             const std::vector<corpus::Gender>& gu);

struct PairBatch {
  std::vector<corpus::FaceImage> faces;
  std::vector<dsp::MelSpectrogram> mels;
  std::vector<int> speaker_ids;  // classifier labels in [0, n_train_speakers)
  std::vector<corpus::Gender> genders;
  // Optional cached speech embeddings [N x D_e]; computed from `mels` if empty.
  Mat sse;

  size_t size() const { return faces.size(); }
  void Validate() const;
};

struct StepLoss {
  double cs = 0;
  double gc = 0;  // 0 when dropped
  double ce = 0;
  double total = 0;
  bool gc_dropped = false;
  int reshuffles = 0;  // extra shuffles drawn after the first
  double grad_norm = 0;
};

constexpr int kMaxReshuffles = 8;

// Computes the stage-1 objective on a batch. With `opt` set, backpropagates and
// updates the face encoder and its classifier; the speech encoder must be
// frozen and is never touched.
StepLoss CrossmodalStep(const PairBatch& batch, identity::FaceEncoder& face,
                        const identity::SpeechEncoder& speech, const LossWeights& weights,
                        nn::Adam* opt, uint64_t seed);

}  // namespace l2s::crossmodal

#endif  // L2S_CROSSMODAL_CROSSMODAL_H_
