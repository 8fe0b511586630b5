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

#include "l2s/synthesis/elbo.h"

#include "l2s/base/error.h"
#include "l2s/nn/ops.h"

namespace l2s::synthesis {

using nn::Var;

nlohmann::json LossBreakdown::ToJson() const {
  return nlohmann::json{{"l1_mel", l1_mel},
                        {"l1_linear", l1_linear},
                        {"kl", kl},
                        {"lambda", lambda},
                        {"total", total}};
}

ElboTerms ElboLoss(const Var& pred_mel, const Var& pred_lin, const Mat& gt_mel,
                   const Mat& gt_lin, const Var& mu, const Var& logvar, double lambda) {
  Require(pred_mel.rows() == gt_mel.rows() && pred_mel.cols() == gt_mel.cols(),
          "elbo_loss: mel shape mismatch, predicted ", pred_mel.rows(), "x", pred_mel.cols(),
          " vs target ", gt_mel.rows(), "x", gt_mel.cols());
  Require(pred_lin.rows() == gt_lin.rows() && pred_lin.cols() == gt_lin.cols(),
          "elbo_loss: linear shape mismatch, predicted ", pred_lin.rows(), "x", pred_lin.cols(),
          " vs target ", gt_lin.rows(), "x", gt_lin.cols());
  Require(lambda >= 0, "elbo_loss: lambda must be nonnegative");
  const Var l1_mel =
      nn::Scale(nn::L1Sum(pred_mel, gt_mel), 1.0 / static_cast<double>(gt_mel.size()));
  const Var l1_lin =
      nn::Scale(nn::L1Sum(pred_lin, gt_lin), 1.0 / static_cast<double>(gt_lin.size()));
  const Var kl = content::KlToStandardNormal(mu, logvar);
  ElboTerms out;
  out.total = nn::Add(l1_mel, l1_lin);
  if (lambda != 0) out.total = nn::Add(out.total, nn::Scale(kl, lambda));
  out.breakdown.l1_mel = l1_mel.scalar();
  out.breakdown.l1_linear = l1_lin.scalar();
  out.breakdown.kl = kl.scalar();
  out.breakdown.lambda = lambda;
  out.breakdown.total = out.total.scalar();
  return out;
}

LossBreakdown ElboLoss(const Mat& pred_mel, const Mat& pred_lin, const Mat& gt_mel,
                       const Mat& gt_lin, const content::ContentPosterior& post,
                       double lambda) {
  return ElboLoss(Var::Constant(pred_mel), Var::Constant(pred_lin), gt_mel, gt_lin,
                  Var::Constant(post.mu), Var::Constant(post.logvar), lambda)
      .breakdown;
}

}  // namespace l2s::synthesis
