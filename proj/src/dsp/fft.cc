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

#include "l2s/dsp/fft.h"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "l2s/base/error.h"

namespace l2s::dsp {

namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan inverse;
};

std::mutex& PlanMutex() {
  static std::mutex m;
  return m;
}

PlanPair GetPlans(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(PlanMutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> re(n);
  std::vector<fftw_complex> cx(n / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_1d(n, re.data(), cx.data(), flags);
  p.inverse = fftw_plan_dft_c2r_1d(n, cx.data(), re.data(), flags);
  Require<std::runtime_error>(p.forward && p.inverse, "fftw planning failed for n=", n);
  cache.emplace(n, p);
  return p;
}

}  // namespace

RealFft::RealFft(int n) : n_(n) {
  Require(n >= 2, "fft size must be >= 2");
  PlanPair p = GetPlans(n);
  forward_ = p.forward;
  inverse_ = p.inverse;
}

void RealFft::Forward(const double* in, std::complex<double>* out) const {
  // FFTW does not modify the input of an out-of-place r2c transform.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void RealFft::Inverse(const std::complex<double>* in, double* out) const {
  // c2r destroys its input.
  std::vector<std::complex<double>> scratch(in, in + n_ / 2 + 1);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_),
                       reinterpret_cast<fftw_complex*>(scratch.data()), out);
}

}  // namespace l2s::dsp
