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

#include "l2s/dsp/stft.h"

#include <cmath>
#include <numbers>

#include "l2s/base/error.h"
#include "l2s/dsp/fft.h"

namespace l2s::dsp {

void DspConfig::Validate() const {
  Require<ConfigError>(sample_rate_hz > 0, "dsp.sample_rate_hz must be positive");
  Require<ConfigError>(fft_size >= 2 && fft_size % 2 == 0,
                       "dsp.fft_size must be even and >= 2");
  Require<ConfigError>(win_length >= 1 && win_length <= fft_size,
                       "dsp.win_length must be in [1, fft_size]");
  Require<ConfigError>(hop_length >= 1, "dsp.hop_length must be positive");
  Require<ConfigError>(n_mels >= 1, "dsp.n_mels must be positive");
  Require<ConfigError>(video_fps >= 1 && sample_rate_hz % video_fps == 0,
                       "dsp.video_fps must divide dsp.sample_rate_hz");
  Require<ConfigError>(SamplesPerVideoFrame() % hop_length == 0,
                       "dsp.hop_length must divide sample_rate/video_fps");
  Require<ConfigError>(Alpha() >= 1, "dsp alpha must be a positive integer");
  Require<ConfigError>(fmin_hz >= 0 && FmaxHz() > fmin_hz &&
                           FmaxHz() <= sample_rate_hz / 2.0,
                       "dsp.fmin_hz/fmax_hz must satisfy 0 <= fmin < fmax <= sr/2");
  Require<ConfigError>(log_floor > 0, "dsp.log_floor must be positive");
}

std::vector<double> AnalysisWindow(const DspConfig& cfg) {
  std::vector<double> w(cfg.fft_size, 0.0);
  const int offset = (cfg.fft_size - cfg.win_length) / 2;
  for (int n = 0; n < cfg.win_length; ++n) {
    w[offset + n] =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / cfg.win_length);
  }
  return w;
}

std::vector<double> ReflectPad(const std::vector<double>& x, int pad) {
  const int n = static_cast<int>(x.size());
  Require(n > 0, "cannot pad an empty signal");
  std::vector<double> out(n + 2 * static_cast<size_t>(pad));
  const int period = n == 1 ? 1 : 2 * (n - 1);
  for (int i = 0; i < static_cast<int>(out.size()); ++i) {
    int j = i - pad;
    if (n > 1) {
      j = ((j % period) + period) % period;
      if (j >= n) j = period - j;
    } else {
      j = 0;
    }
    out[i] = x[j];
  }
  return out;
}

CMat StftFrames(const std::vector<double>& signal, const DspConfig& cfg) {
  const int n_fft = cfg.fft_size;
  Require(static_cast<int>(signal.size()) >= n_fft,
          "signal shorter than one fft frame");
  const Index n_frames = (static_cast<Index>(signal.size()) - n_fft) / cfg.hop_length + 1;
  const std::vector<double> window = AnalysisWindow(cfg);
  const RealFft fft(n_fft);
  CMat out(n_frames, cfg.NumBins());
  std::vector<double> buf(n_fft);
  for (Index f = 0; f < n_frames; ++f) {
    const size_t off = static_cast<size_t>(f) * cfg.hop_length;
    for (int n = 0; n < n_fft; ++n) buf[n] = signal[off + n] * window[n];
    fft.Forward(buf.data(), out.row(f).data());
  }
  return out;
}

std::vector<double> InverseStftFrames(const CMat& frames, const DspConfig& cfg) {
  const int n_fft = cfg.fft_size;
  Require(frames.cols() == cfg.NumBins(), "inverse stft: expected ", cfg.NumBins(),
          " bins, got ", frames.cols());
  const Index n_frames = frames.rows();
  if (n_frames == 0) return {};
  const size_t len = static_cast<size_t>(n_frames - 1) * cfg.hop_length + n_fft;
  const std::vector<double> window = AnalysisWindow(cfg);
  const RealFft fft(n_fft);
  std::vector<double> out(len, 0.0), wss(len, 0.0), buf(n_fft);
  for (Index f = 0; f < n_frames; ++f) {
    fft.Inverse(frames.row(f).data(), buf.data());
    const size_t off = static_cast<size_t>(f) * cfg.hop_length;
    for (int n = 0; n < n_fft; ++n) {
      out[off + n] += window[n] * buf[n] / n_fft;
      wss[off + n] += window[n] * window[n];
    }
  }
  for (size_t i = 0; i < len; ++i) out[i] = wss[i] > 1e-12 ? out[i] / wss[i] : 0.0;
  return out;
}

LinearSpectrogram StftMagnitude(const Waveform& wave, const DspConfig& cfg) {
  Require(!wave.samples.empty(), "stft_magnitude: empty waveform");
  Require(wave.sample_rate_hz == cfg.sample_rate_hz, "stft_magnitude: sample rate ",
          wave.sample_rate_hz, " does not match config ", cfg.sample_rate_hz);
  const CMat frames = StftFrames(ReflectPad(wave.samples, cfg.fft_size / 2), cfg);
  return LinearSpectrogram{frames.cwiseAbs()};
}

}  // namespace l2s::dsp
