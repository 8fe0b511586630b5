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

#include "l2s/crossmodal/crossmodal.h"

#include <cmath>

#include "l2s/base/error.h"
#include "l2s/base/random.h"
#include "l2s/nn/ops.h"

namespace l2s::crossmodal {

using corpus::Gender;
using nlohmann::json;
using nn::Var;

void LossWeights::Validate() const {
  Require<ConfigError>(w_cs >= 0, "crossmodal.w_cs must be nonnegative");
  Require<ConfigError>(w_gc >= 0, "crossmodal.w_gc must be nonnegative");
  Require<ConfigError>(w_ce >= 0, "crossmodal.w_ce must be nonnegative");
}

json LossWeights::ToJson() const {
  return json{{"w_cs", w_cs}, {"w_gc", w_gc}, {"w_ce", w_ce}, {"gc_unit_norm", gc_unit_norm}};
}

LossWeights LossWeights::FromJson(const json& j) {
  LossWeights w;
  w.w_cs = j.at("w_cs").get<double>();
  w.w_gc = j.at("w_gc").get<double>();
  w.w_ce = j.at("w_ce").get<double>();
  w.gc_unit_norm = j.at("gc_unit_norm").get<bool>();
  return w;
}

namespace {

void RequirePaired(const Mat& a, const Mat& b, const char* what) {
  Require(a.rows() == b.rows() && a.cols() == b.cols() && a.rows() > 0, what,
          ": paired inputs must share a non-empty shape, got ", a.rows(), "x", a.cols(),
          " and ", b.rows(), "x", b.cols());
}

// Bounded draw in [0, n) without modulo bias.
uint64_t Below(Rng& rng, uint64_t n) {
  const uint64_t limit = (~uint64_t{0} / n) * n;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

double LogSumExp(const std::vector<double>& xs) {
  double m = -INFINITY;
  for (double x : xs) m = std::max(m, x);
  double s = 0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

Var CosineSimilarityLoss(const Var& fse, const Var& sse) {
  const Mat& a = fse.value();
  const Mat& b = sse.value();
  RequirePaired(a, b, "cosine_similarity_loss");
  const Index n = a.rows();
  RowVec na(n), nb(n), cosv(n);  // stored as rows for compactness
  for (Index i = 0; i < n; ++i) {
    na(i) = a.row(i).norm();
    nb(i) = b.row(i).norm();
    Require(na(i) > 0 && nb(i) > 0, "cosine_similarity_loss: zero-norm row ", i);
    cosv(i) = a.row(i).dot(b.row(i)) / (na(i) * nb(i));
  }
  Mat value(1, 1);
  value(0, 0) = (1.0 - cosv.array()).mean();
  return nn::MakeOp(std::move(value), {fse, sse}, [na, nb, cosv](nn::Node& self) {
    const double g = self.grad(0, 0) / static_cast<double>(na.size());
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    for (Index i = 0; i < na.size(); ++i) {
      const auto ar = pa.value.row(i);
      const auto br = pb.value.row(i);
      if (pa.requires_grad) {
        pa.Grad().row(i) -= g * (br / (na(i) * nb(i)) - cosv(i) * ar / (na(i) * na(i)));
      }
      if (pb.requires_grad) {
        pb.Grad().row(i) -= g * (ar / (na(i) * nb(i)) - cosv(i) * br / (nb(i) * nb(i)));
      }
    }
  });
}

double CosineSimilarityLoss(const Mat& fse, const Mat& sse) {
  return CosineSimilarityLoss(Var::Constant(fse), Var::Constant(sse)).scalar();
}

std::vector<int> ShufflePermutation(int n, uint64_t seed) {
  Require(n >= 2, "shuffle_batch: need at least 2 rows, got ", n);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(Below(rng, static_cast<uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

Shuffled ShuffleBatch(const Mat& v, uint64_t seed) {
  Shuffled s;
  s.perm = ShufflePermutation(static_cast<int>(v.rows()), seed);
  s.u.resize(v.rows(), v.cols());
  for (Index i = 0; i < v.rows(); ++i) s.u.row(i) = v.row(s.perm[i]);
  return s;
}

bool GcPairingDegenerate(const std::vector<Gender>& gv, const std::vector<Gender>& gu) {
  Require(gv.size() == gu.size(), "gender_contrastive_loss: gender list size mismatch");
  bool same = false, cross = false;
  for (size_t i = 0; i < gv.size(); ++i) (gv[i] == gu[i] ? same : cross) = true;
  return !(same && cross);
}

Var GenderContrastiveLoss(const Var& v, const Var& u, const std::vector<Gender>& gv,
                          const std::vector<Gender>& gu) {
  RequirePaired(v.value(), u.value(), "gender_contrastive_loss");
  Require(gv.size() == static_cast<size_t>(v.rows()) && gu.size() == gv.size(),
          "gender_contrastive_loss: expected ", v.rows(), " gender labels");
  if (GcPairingDegenerate(gv, gu)) {
    throw DegenerateBatchError("gender_contrastive_loss: batch has no same-gender or no "
                               "cross-gender pair");
  }
  const Index n = v.rows();
  std::vector<double> same, cross;
  std::vector<double> dots(n);
  for (Index i = 0; i < n; ++i) {
    dots[i] = v.value().row(i).dot(u.value().row(i));
    (gv[i] == gu[i] ? same : cross).push_back(dots[i]);
  }
  const double lse_same = LogSumExp(same), lse_cross = LogSumExp(cross);
  // dL/d(dot_i): softmax weight within the pair's set, negative for same-gender.
  std::vector<double> coef(n);
  for (Index i = 0; i < n; ++i) {
    coef[i] = gv[i] == gu[i] ? -std::exp(dots[i] - lse_same) : std::exp(dots[i] - lse_cross);
  }
  Mat value(1, 1);
  value(0, 0) = lse_cross - lse_same;
  return nn::MakeOp(std::move(value), {v, u}, [coef](nn::Node& self) {
    const double g = self.grad(0, 0);
    auto& pv = *self.parents[0];
    auto& pu = *self.parents[1];
    // Read both values before either gradient is written: v and u may alias.
    const Mat vv = pv.value, uu = pu.value;
    for (size_t i = 0; i < coef.size(); ++i) {
      const Index r = static_cast<Index>(i);
      if (pv.requires_grad) pv.Grad().row(r) += (g * coef[i]) * uu.row(r);
      if (pu.requires_grad) pu.Grad().row(r) += (g * coef[i]) * vv.row(r);
    }
  });
}

double GenderContrastiveLoss(const Mat& v, const Mat& u, const std::vector<Gender>& gv,
                             const std::vector<Gender>& gu) {
  return GenderContrastiveLoss(Var::Constant(v), Var::Constant(u), gv, gu).scalar();
}

void PairBatch::Validate() const {
  const size_t n = faces.size();
  Require(n >= 2, "pair batch: need at least 2 pairs, got ", n);
  Require(speaker_ids.size() == n && genders.size() == n,
          "pair batch: faces, speaker ids and genders must have equal length");
  if (sse.size() == 0) {
    Require(mels.size() == n, "pair batch: expected ", n, " mel spectrograms");
  } else {
    Require(sse.rows() == static_cast<Index>(n), "pair batch: expected ", n,
            " cached speech embeddings");
  }
}

StepLoss CrossmodalStep(const PairBatch& batch, identity::FaceEncoder& face,
                        const identity::SpeechEncoder& speech, const LossWeights& weights,
                        nn::Adam* opt, uint64_t seed) {
  batch.Validate();
  weights.Validate();
  Require(speech.frozen(), "crossmodal_step: speech encoder must be frozen");
  const int n = static_cast<int>(batch.size());

  Mat sse = batch.sse;
  if (sse.size() == 0) {
    sse.resize(n, speech.config().embed_dim);
    for (int i = 0; i < n; ++i) sse.row(i) = speech.Embed(batch.mels[i]).vec;
  }
  std::vector<const corpus::FaceImage*> faces;
  for (const auto& f : batch.faces) faces.push_back(&f);
  const Var v = face.Forward(faces);

  StepLoss out;
  const Var cs = CosineSimilarityLoss(v, Var::Constant(sse));
  const Var ce = nn::CrossEntropy(face.Classify(v), batch.speaker_ids);
  Var total = nn::Add(nn::Scale(cs, weights.w_cs), nn::Scale(ce, weights.w_ce));
  out.cs = cs.scalar();
  out.ce = ce.scalar();

  if (weights.w_gc > 0) {
    const Var g = weights.gc_unit_norm ? nn::NormalizeRows(v) : v;
    out.gc_dropped = true;
    for (int attempt = 0; attempt <= kMaxReshuffles; ++attempt) {
      const std::vector<int> perm =
          ShufflePermutation(n, HashSeeds({seed, 0x6c, static_cast<uint64_t>(attempt)}));
      std::vector<Gender> gu(n);
      for (int i = 0; i < n; ++i) gu[i] = batch.genders[perm[i]];
      if (GcPairingDegenerate(batch.genders, gu)) continue;
      const Var gc = GenderContrastiveLoss(g, nn::GatherRows(g, perm), batch.genders, gu);
      total = nn::Add(total, nn::Scale(gc, weights.w_gc));
      out.gc = gc.scalar();
      out.gc_dropped = false;
      out.reshuffles = attempt;
      break;
    }
    if (out.gc_dropped) out.reshuffles = kMaxReshuffles;
  }
  out.total = total.scalar();

  if (opt != nullptr) {
    nn::Backward(total);
    out.grad_norm = opt->Step();
  }
  return out;
}

}  // namespace l2s::crossmodal
