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

#ifndef L2S_SYNTHESIS_ELBO_H_
#define L2S_SYNTHESIS_ELBO_H_

#include "json.hpp"
#include "l2s/content/content_encoder.h"
#include "l2s/nn/autograd.h"

namespace l2s::synthesis {

inline constexpr double kDefaultKlWeight = 0.001;

// L1 terms are means over all cells; kl is the per-frame average from
// KlToStandardNormal. total = l1_mel + l1_linear + lambda * kl.
struct LossBreakdown {
  double l1_mel = 0;
  double l1_linear = 0;
  double kl = 0;
  double lambda = kDefaultKlWeight;
  double total = 0;

  nlohmann::json ToJson() const;
};

struct ElboTerms {
  nn::Var total;
  LossBreakdown breakdown;
};

// Negative ELBO to minimize. With lambda == 0 the posterior does not enter
// the graph, so the total is independent of it.
ElboTerms ElboLoss(const nn::Var& pred_mel, const nn::Var& pred_lin, const Mat& gt_mel,
                   const Mat& gt_lin, const nn::Var& mu, const nn::Var& logvar, double lambda);
LossBreakdown ElboLoss(const Mat& pred_mel, const Mat& pred_lin, const Mat& gt_mel,
                       const Mat& gt_lin, const content::ContentPosterior& post,
                       double lambda);

}  // namespace l2s::synthesis

#endif  // L2S_SYNTHESIS_ELBO_H_
