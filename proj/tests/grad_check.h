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

#ifndef L2S_TESTS_GRAD_CHECK_H_
#define L2S_TESTS_GRAD_CHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "l2s/nn/autograd.h"

namespace l2s::testing {

inline Mat RandomMat(Index r, Index c, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Mat m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
};

// Compares reverse-mode gradients of a scalar function against central
// differences for every entry of every leaf. Relative error uses
// |a - n| / max(|a| + |n|, floor).
inline GradCheckResult CheckGradients(
    const std::function<nn::Var(const std::vector<nn::Var>&)>& f,
    std::vector<nn::Var> leaves, double step = 1e-5, double floor = 1e-6) {
  for (auto& l : leaves) l.ZeroGrad();
  nn::Var out = f(leaves);
  nn::Backward(out);
  std::vector<Mat> analytic;
  for (auto& l : leaves) {
    analytic.push_back(l.has_grad() ? l.grad() : Mat::Zero(l.rows(), l.cols()));
  }
  GradCheckResult res;
  for (size_t k = 0; k < leaves.size(); ++k) {
    Mat& v = leaves[k].mutable_value();
    for (Index i = 0; i < v.size(); ++i) {
      const double orig = v.data()[i];
      v.data()[i] = orig + step;
      const double fp = f(leaves).scalar();
      v.data()[i] = orig - step;
      const double fm = f(leaves).scalar();
      v.data()[i] = orig;
      const double num = (fp - fm) / (2.0 * step);
      const double a = analytic[k].data()[i];
      const double abs_err = std::abs(a - num);
      res.max_abs_error = std::max(res.max_abs_error, abs_err);
      res.max_rel_error =
          std::max(res.max_rel_error, abs_err / std::max(std::abs(a) + std::abs(num), floor));
    }
  }
  return res;
}


// Central-difference check of `count` randomly chosen entries across the
// given leaves, for graphs too large to sweep exhaustively.
inline GradCheckResult CheckSampledGradients(
    const std::function<nn::Var()>& f, std::vector<nn::Var> leaves, int count, uint64_t seed,
    double step = 1e-5, double floor = 1e-6) {
  for (auto& l : leaves) l.ZeroGrad();
  nn::Backward(f());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick_leaf(0, leaves.size() - 1);
  GradCheckResult res;
  for (int n = 0; n < count; ++n) {
    nn::Var& l = leaves[pick_leaf(rng)];
    std::uniform_int_distribution<Index> pick(0, l.value().size() - 1);
    const Index i = pick(rng);
    const double a = l.has_grad() ? l.grad().data()[i] : 0.0;
    Mat& v = l.mutable_value();
    const double orig = v.data()[i];
    v.data()[i] = orig + step;
    const double fp = f().scalar();
    v.data()[i] = orig - step;
    const double fm = f().scalar();
    v.data()[i] = orig;
    const double num = (fp - fm) / (2.0 * step);
    const double abs_err = std::abs(a - num);
    res.max_abs_error = std::max(res.max_abs_error, abs_err);
    res.max_rel_error =
        std::max(res.max_rel_error, abs_err / std::max(std::abs(a) + std::abs(num), floor));
  }
  return res;
}

}  // namespace l2s::testing

#endif  // L2S_TESTS_GRAD_CHECK_H_
