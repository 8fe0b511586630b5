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

#ifndef L2S_EVAL_METRICS_H_
#define L2S_EVAL_METRICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "l2s/base/matrix.h"
#include "l2s/corpus/speaker.h"
#include "l2s/dsp/types.h"

namespace l2s::eval {

struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

// Sweeps every distinct score as threshold t with FAR(t) = P(impostor >= t)
// and FRR(t) = P(genuine < t); returns (FAR + FRR) / 2 at the threshold with
// the smallest |FAR - FRR|, ties resolved toward the lower threshold.
double ComputeEer(const ScoreSet& s);

struct F0Estimate {
  double hz = 0.0;
  double peak = 0.0;  // normalized autocorrelation at the chosen lag
  bool reliable = false;
};

inline constexpr double kF0MinHz = 80.0;
inline constexpr double kF0MaxHz = 300.0;
inline constexpr double kF0MinPeak = 0.3;
inline constexpr double kF0MinSeconds = 0.2;

// Normalized biased autocorrelation of the middle half of the signal over
// lags [sr/300, sr/80]. The chosen lag is the first local maximum reaching
// 0.9 of the in-range maximum, refined by parabolic interpolation.
F0Estimate EstimateF0(const dsp::Waveform& wave);

inline constexpr double kGenderThresholdHz = 165.0;
corpus::Gender GenderFromF0(double hz);

struct GenderItem {
  dsp::Waveform wave;
  corpus::Gender gender;
};
struct GenderMatchReport {
  double rate = 0.0;
  int n_reliable = 0;
  int n_items = 0;
};
// Throws if no item has a reliable F0.
GenderMatchReport GenderMatchRate(const std::vector<GenderItem>& items);

struct ProbeConfig {
  double train_fraction = 0.8;
  double l2 = 1e-3;
  double lr = 0.5;
  int iters = 500;
};

struct ProbeReport {
  double accuracy = 0.0;
  double chance = 0.0;
  int n_items = 0;
  int n_test = 0;
};

// Mean-pools each [T x D] latent over time, standardizes with training
// statistics, fits multinomial logistic regression on a per-speaker
// stratified split and reports held-out accuracy.
ProbeReport SpeakerProbe(const std::vector<Mat>& latents, const std::vector<int>& speaker_ids,
                         uint64_t split_seed, const ProbeConfig& cfg = {});

struct PcaResult {
  Mat projection;             // [n x 2]
  Eigen::Vector2d variances;  // leading eigenvalues, descending
  double total_variance = 0.0;
};
// Principal components of row vectors via covariance eigendecomposition.
// Component signs are fixed so the largest-magnitude loading is positive.
PcaResult Pca2(const Mat& rows);

// Writes "pc1,pc2,speaker_id,gender" rows.
void ExportScatter(const Mat& rows, const std::vector<int>& speaker_ids,
                   const std::vector<corpus::Gender>& genders, const std::string& path);

double CosineSimilarity(const RowVec& a, const RowVec& b);

}  // namespace l2s::eval

#endif  // L2S_EVAL_METRICS_H_
