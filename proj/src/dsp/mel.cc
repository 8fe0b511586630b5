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

#include "l2s/dsp/mel.h"

#include <algorithm>
#include <cmath>

#include "l2s/base/error.h"

namespace l2s::dsp {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Mat MelFilterbank(const DspConfig& cfg) {
  const int n_bins = cfg.NumBins();
  const double bin_hz = static_cast<double>(cfg.sample_rate_hz) / cfg.fft_size;
  const double mel_lo = HzToMel(cfg.fmin_hz);
  const double mel_hi = HzToMel(cfg.FmaxHz());
  std::vector<double> edges(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1));
  }
  Mat fb = Mat::Zero(cfg.n_mels, n_bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = k * bin_hz;
      double w = 0.0;
      if (f > lo && f <= mid) {
        w = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      fb(m, k) = w;
    }
    const double area = fb.row(m).sum();
    Require(area > 0, "mel filter ", m, " covers no fft bin; lower n_mels or raise fft_size");
    fb.row(m) /= area;
  }
  return fb;
}

MelSpectrogram LinearToMel(const LinearSpectrogram& spec, const DspConfig& cfg) {
  Require(spec.frames.cols() == cfg.NumBins(), "linear_to_mel: expected ",
          cfg.NumBins(), " bins, got ", spec.frames.cols());
  const Mat fb = MelFilterbank(cfg);
  Mat mel = spec.frames * fb.transpose();
  const double floor = cfg.log_floor;
  mel = mel.unaryExpr([floor](double v) { return std::log(std::max(v, floor)); });
  return MelSpectrogram{std::move(mel)};
}

}  // namespace l2s::dsp
