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

#include "l2s/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <Eigen/Eigenvalues>

#include "l2s/base/error.h"
#include "l2s/base/random.h"

namespace l2s::eval {

double ComputeEer(const ScoreSet& s) {
  Require(!s.genuine.empty() && !s.impostor.empty(),
          "compute_eer: genuine and impostor lists must be non-empty");
  std::vector<double> gen = s.genuine, imp = s.impostor;
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());
  std::vector<double> thresholds = gen;
  thresholds.insert(thresholds.end(), imp.begin(), imp.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const double ng = static_cast<double>(gen.size()), ni = static_cast<double>(imp.size());
  double best_gap = 2.0, best = 0.0;
  for (double t : thresholds) {
    const auto below_g = std::lower_bound(gen.begin(), gen.end(), t) - gen.begin();
    const auto below_i = std::lower_bound(imp.begin(), imp.end(), t) - imp.begin();
    const double frr = below_g / ng;
    const double far = (ni - below_i) / ni;
    const double gap = std::abs(far - frr);
    if (gap < best_gap) {  // strict: ties keep the lower threshold
      best_gap = gap;
      best = 0.5 * (far + frr);
    }
  }
  return best;
}

F0Estimate EstimateF0(const dsp::Waveform& wave) {
  const int sr = wave.sample_rate_hz;
  const size_t n = wave.samples.size();
  Require(static_cast<double>(n) >= kF0MinSeconds * sr, "estimate_f0: need at least ",
          kF0MinSeconds, " s of audio, got ", wave.DurationSec(), " s");
  const size_t begin = n / 4, len = n / 2;
  std::vector<double> x(wave.samples.begin() + begin, wave.samples.begin() + begin + len);
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(len);
  for (double& v : x) v -= mean;

  const int lo = static_cast<int>(std::ceil(static_cast<double>(sr) / kF0MaxHz));
  const int hi = static_cast<int>(std::floor(static_cast<double>(sr) / kF0MinHz));
  std::vector<double> r(hi + 2, 0.0);
  double r0 = 0;
  for (double v : x) r0 += v * v;
  F0Estimate out;
  if (r0 <= 0) return out;
  for (int lag = lo - 1; lag <= hi + 1; ++lag) {
    double acc = 0;
    for (size_t i = 0; i + lag < len; ++i) acc += x[i] * x[i + lag];
    r[lag] = acc / r0;
  }
  double best = -1;
  for (int lag = lo; lag <= hi; ++lag) best = std::max(best, r[lag]);
  int chosen = -1;
  for (int lag = lo; lag <= hi; ++lag) {
    if (r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] >= 0.9 * best) {
      chosen = lag;
      break;
    }
  }
  if (chosen < 0) {
    chosen = static_cast<int>(std::max_element(r.begin() + lo, r.begin() + hi + 1) - r.begin());
  }
  double offset = 0;
  const double a = r[chosen - 1], b = r[chosen], c = r[chosen + 1];
  const double denom = a - 2 * b + c;
  if (denom < 0) offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  out.hz = sr / (chosen + offset);
  out.peak = b;
  out.reliable = b >= kF0MinPeak;
  return out;
}

corpus::Gender GenderFromF0(double hz) {
  return hz < kGenderThresholdHz ? corpus::Gender::kMale : corpus::Gender::kFemale;
}

GenderMatchReport GenderMatchRate(const std::vector<GenderItem>& items) {
  GenderMatchReport rep;
  rep.n_items = static_cast<int>(items.size());
  int hits = 0;
  for (const auto& it : items) {
    const F0Estimate f = EstimateF0(it.wave);
    if (!f.reliable) continue;
    ++rep.n_reliable;
    hits += GenderFromF0(f.hz) == it.gender;
  }
  Require(rep.n_reliable > 0, "gender_match_rate: no item has a reliable F0");
  rep.rate = static_cast<double>(hits) / rep.n_reliable;
  return rep;
}

ProbeReport SpeakerProbe(const std::vector<Mat>& latents, const std::vector<int>& speaker_ids,
                         uint64_t split_seed, const ProbeConfig& cfg) {
  Require(latents.size() == speaker_ids.size() && !latents.empty(),
          "speaker_probe: need one speaker id per latent");
  std::map<int, std::vector<int>> by_speaker;
  for (int i = 0; i < static_cast<int>(speaker_ids.size()); ++i) {
    by_speaker[speaker_ids[i]].push_back(i);
  }
  Require(by_speaker.size() >= 2, "speaker_probe: need at least 2 speakers");
  for (const auto& [spk, idx] : by_speaker) {
    Require(idx.size() >= 4, "speaker_probe: speaker ", spk, " has ", idx.size(),
            " items, need at least 4");
  }
  const Index dim = latents[0].cols();
  Mat pooled(static_cast<Index>(latents.size()), dim);
  for (size_t i = 0; i < latents.size(); ++i) {
    Require(latents[i].cols() == dim && latents[i].rows() > 0,
            "speaker_probe: latent widths differ");
    pooled.row(static_cast<Index>(i)) = latents[i].colwise().mean();
  }

  Rng rng(split_seed);
  std::vector<int> train, test, label(latents.size());
  int cls = 0;
  for (auto& [spk, idx] : by_speaker) {
    for (int i : idx) label[i] = cls;
    ++cls;
    std::shuffle(idx.begin(), idx.end(), rng);
    const int n_train = std::clamp(static_cast<int>(std::lround(cfg.train_fraction * idx.size())),
                                   1, static_cast<int>(idx.size()) - 1);
    train.insert(train.end(), idx.begin(), idx.begin() + n_train);
    test.insert(test.end(), idx.begin() + n_train, idx.end());
  }
  const int k = cls;

  Mat xtr(static_cast<Index>(train.size()), dim);
  for (size_t i = 0; i < train.size(); ++i) xtr.row(static_cast<Index>(i)) = pooled.row(train[i]);
  const RowVec mu = xtr.colwise().mean();
  RowVec sd = ((xtr.rowwise() - mu).array().square().colwise().mean()).sqrt().matrix();
  for (Index j = 0; j < dim; ++j) sd(j) = sd(j) > 1e-12 ? sd(j) : 1.0;
  auto standardize = [&](const RowVec& v) -> RowVec {
    return ((v - mu).array() / sd.array()).matrix();
  };
  for (Index i = 0; i < xtr.rows(); ++i) xtr.row(i) = standardize(xtr.row(i));

  Mat y = Mat::Zero(xtr.rows(), k);
  for (size_t i = 0; i < train.size(); ++i) y(static_cast<Index>(i), label[train[i]]) = 1.0;
  Mat w = Mat::Zero(dim, k);
  RowVec b = RowVec::Zero(k);
  const double inv_n = 1.0 / static_cast<double>(xtr.rows());
  for (int it = 0; it < cfg.iters; ++it) {
    Mat logits = (xtr * w).rowwise() + b;
    for (Index r = 0; r < logits.rows(); ++r) {
      const double m = logits.row(r).maxCoeff();
      logits.row(r) = (logits.row(r).array() - m).exp().matrix();
      logits.row(r) /= logits.row(r).sum();
    }
    const Mat diff = (logits - y) * inv_n;
    w -= cfg.lr * (xtr.transpose() * diff + cfg.l2 * w);
    b -= cfg.lr * diff.colwise().sum();
  }

  int hits = 0;
  for (int i : test) {
    const RowVec logits = standardize(pooled.row(i)) * w + b;
    Index arg;
    logits.maxCoeff(&arg);
    hits += static_cast<int>(arg) == label[i];
  }
  ProbeReport rep;
  rep.n_items = static_cast<int>(latents.size());
  rep.n_test = static_cast<int>(test.size());
  rep.accuracy = static_cast<double>(hits) / rep.n_test;
  rep.chance = 1.0 / k;
  return rep;
}

PcaResult Pca2(const Mat& rows) {
  Require(rows.rows() >= 3, "pca: need at least 3 items, got ", rows.rows());
  Require(rows.cols() >= 2, "pca: need at least 2 dimensions");
  const Mat centered = rows.rowwise() - rows.colwise().mean();
  const Mat cov = centered.transpose() * centered / static_cast<double>(rows.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Require(es.info() == Eigen::Success, "pca: eigendecomposition failed");
  const Index d = cov.rows();
  Eigen::MatrixXd basis(d, 2);
  PcaResult res;
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd v = es.eigenvectors().col(d - 1 - c);
    Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    basis.col(c) = v;
    res.variances(c) = es.eigenvalues()(d - 1 - c);
  }
  res.total_variance = es.eigenvalues().sum();
  res.projection = centered * basis;
  return res;
}

void ExportScatter(const Mat& rows, const std::vector<int>& speaker_ids,
                   const std::vector<corpus::Gender>& genders, const std::string& path) {
  Require(static_cast<size_t>(rows.rows()) == speaker_ids.size() &&
              speaker_ids.size() == genders.size(),
          "export_scatter: label counts must match rows");
  const PcaResult pca = Pca2(rows);
  std::ofstream out(path);
  Require<IoError>(out.good(), "cannot write scatter file '", path, "'");
  out << "pc1,pc2,speaker_id,gender\n";
  out.precision(9);
  for (Index i = 0; i < rows.rows(); ++i) {
    out << pca.projection(i, 0) << "," << pca.projection(i, 1) << "," << speaker_ids[i] << ","
        << corpus::GenderName(genders[i]) << "\n";
  }
  Require<IoError>(out.good(), "failed writing scatter file '", path, "'");
}

double CosineSimilarity(const RowVec& a, const RowVec& b) {
  const double na = a.norm(), nb = b.norm();
  Require(na > 0 && nb > 0, "cosine similarity of a zero vector");
  return a.dot(b) / (na * nb);
}

}  // namespace l2s::eval
