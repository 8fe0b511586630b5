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

#ifndef L2S_DSP_TYPES_H_
#define L2S_DSP_TYPES_H_

#include <complex>
#include <vector>

#include "l2s/base/matrix.h"

namespace l2s::dsp {

struct DspConfig {
  int sample_rate_hz = 16000;
  int fft_size = 640;
  int win_length = 640;  // Hamming
  int hop_length = 160;
  int n_mels = 80;
  double fmin_hz = 0.0;
  double fmax_hz = 0.0;  // <= 0 means sample_rate / 2
  double log_floor = 1e-5;
  int video_fps = 25;

  int NumBins() const { return fft_size / 2 + 1; }
  double FmaxHz() const { return fmax_hz > 0 ? fmax_hz : sample_rate_hz / 2.0; }
  int SamplesPerVideoFrame() const { return sample_rate_hz / video_fps; }
  // Spectrogram frames per video frame.
  int Alpha() const { return SamplesPerVideoFrame() / hop_length; }

  // Throws ConfigError naming the offending field.
  void Validate() const;
};

struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 16000;

  double DurationSec() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// [n_frames x (fft_size/2 + 1)] nonnegative magnitudes.
struct LinearSpectrogram {
  Mat frames;
  Index NumFrames() const { return frames.rows(); }
};

// [n_frames x n_mels] natural-log mel magnitudes, floored at log(log_floor).
struct MelSpectrogram {
  Mat frames;
  Index NumFrames() const { return frames.rows(); }
};

using Complex = std::complex<double>;
using CMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace l2s::dsp

#endif  // L2S_DSP_TYPES_H_
