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

#include "l2s/dsp/griffin_lim.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "l2s/base/error.h"
#include "l2s/base/random.h"
#include "l2s/dsp/stft.h"

namespace l2s::dsp {

double ConsistencyResidual(const CMat& stft, const Mat& target) {
  Require(stft.rows() == target.rows() && stft.cols() == target.cols(),
          "consistency residual: shape mismatch");
  const Index last = target.cols() - 1;
  double acc = 0.0;
  for (Index r = 0; r < target.rows(); ++r) {
    for (Index c = 0; c < target.cols(); ++c) {
      const double d = std::abs(stft(r, c)) - target(r, c);
      acc += (c == 0 || c == last ? 1.0 : 2.0) * d * d;
    }
  }
  return std::sqrt(acc);
}

Waveform GriffinLim(const LinearSpectrogram& spec, const DspConfig& cfg, int iters,
                    uint64_t seed, std::vector<double>* residuals) {
  Require(iters >= 1, "griffin_lim: iters must be >= 1");
  const Mat& mag = spec.frames;
  Require(mag.cols() == cfg.NumBins(), "griffin_lim: expected ", cfg.NumBins(),
          " bins, got ", mag.cols());
  Require(mag.rows() >= 1, "griffin_lim: empty spectrogram");
  Require((mag.array() >= 0).all(), "griffin_lim: magnitudes must be nonnegative");

  Rng rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  CMat y(mag.rows(), mag.cols());
  for (Index r = 0; r < mag.rows(); ++r) {
    for (Index c = 0; c < mag.cols(); ++c) y(r, c) = std::polar(mag(r, c), phase(rng));
  }

  if (residuals) residuals->clear();
  std::vector<double> x;
  for (int it = 0; it < iters; ++it) {
    x = InverseStftFrames(y, cfg);
    const CMat est = StftFrames(x, cfg);
    if (residuals) residuals->push_back(ConsistencyResidual(est, mag));
    for (Index r = 0; r < mag.rows(); ++r) {
      for (Index c = 0; c < mag.cols(); ++c) {
        const double a = std::abs(est(r, c));
        y(r, c) = a > 0 ? est(r, c) * (mag(r, c) / a) : Complex(mag(r, c), 0.0);
      }
    }
  }

  Waveform out;
  out.sample_rate_hz = cfg.sample_rate_hz;
  const size_t pad = cfg.fft_size / 2;
  const size_t len = std::min(static_cast<size_t>(mag.rows()) * cfg.hop_length, x.size() - pad);
  out.samples.assign(x.begin() + pad, x.begin() + pad + len);
  return out;
}

}  // namespace l2s::dsp
