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

#ifndef L2S_TESTS_ORACLES_H_
#define L2S_TESTS_ORACLES_H_

#include <cmath>
#include <random>
#include <vector>

#include "l2s/content/content_encoder.h"
#include "l2s/corpus/speaker.h"
#include "l2s/eval/metrics.h"

namespace l2s::testing {

// Evaluates every distinct threshold with a double loop over raw, unsorted
// scores; ties on the FAR/FRR gap go to the lowest threshold.
inline double BruteForceEer(const eval::ScoreSet& s) {
  std::vector<double> all = s.genuine;
  all.insert(all.end(), s.impostor.begin(), s.impostor.end());
  double best_gap = 2.0, best_t = 0, best = 0;
  bool have = false;
  for (double t : all) {
    int rej = 0, acc = 0;
    for (double g : s.genuine) rej += g < t;
    for (double i : s.impostor) acc += i >= t;
    const double frr = static_cast<double>(rej) / s.genuine.size();
    const double far = static_cast<double>(acc) / s.impostor.size();
    const double gap = std::abs(far - frr);
    if (!have || gap < best_gap || (gap == best_gap && t < best_t)) {
      have = true;
      best_gap = gap;
      best_t = t;
      best = 0.5 * (far + frr);
    }
  }
  return best;
}

// Gender contrastive loss by a direct double loop without log-sum-exp
// stabilization.
inline double BruteForceGc(const Mat& v, const Mat& u, const std::vector<corpus::Gender>& gv,
                           const std::vector<corpus::Gender>& gu) {
  double same = 0, cross = 0;
  for (Index i = 0; i < v.rows(); ++i) {
    double dot = 0;
    for (Index k = 0; k < v.cols(); ++k) dot += v(i, k) * u(i, k);
    (gv[i] == gu[i] ? same : cross) += std::exp(dot);
  }
  return -std::log(same / cross);
}

// Monte-Carlo estimate of E_q[log q(z) - log p(z)], reduced like the closed
// form (summed over dims, averaged over frames).
inline double MonteCarloKl(const content::ContentPosterior& p, int samples, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, 1);
  double acc = 0;
  for (int s = 0; s < samples; ++s) {
    for (Index i = 0; i < p.mu.size(); ++i) {
      const double e = n(rng);
      const double lv = p.logvar.data()[i];
      const double z = p.mu.data()[i] + std::exp(0.5 * lv) * e;
      acc += -0.5 * (lv + e * e) + 0.5 * z * z;
    }
  }
  return acc / samples / static_cast<double>(p.mu.rows());
}

}  // namespace l2s::testing

#endif  // L2S_TESTS_ORACLES_H_
