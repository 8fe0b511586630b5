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

#ifndef L2S_DSP_STFT_H_
#define L2S_DSP_STFT_H_

#include <vector>

#include "l2s/dsp/types.h"

namespace l2s::dsp {

// Periodic Hamming window of `win_length` samples, zero-padded symmetrically
// to `fft_size`.
std::vector<double> AnalysisWindow(const DspConfig& cfg);

// Reflect-pads `pad` samples on both sides (mirror without repeating the
// edge sample; wraps for signals shorter than the pad).
std::vector<double> ReflectPad(const std::vector<double>& x, int pad);

// Frames taken at offsets i*hop over `signal` as-is (no padding). The signal
// length must be >= fft_size. Returns [n_frames x fft_size/2+1].
CMat StftFrames(const std::vector<double>& signal, const DspConfig& cfg);

// Least-squares inverse of StftFrames: windowed overlap-add divided by the
// window-sum-square. Output length is (n_frames-1)*hop + fft_size.
std::vector<double> InverseStftFrames(const CMat& frames, const DspConfig& cfg);

// Centered STFT magnitude: fft_size/2 reflect padding per side, so the frame
// count is floor(len/hop) + 1.
LinearSpectrogram StftMagnitude(const Waveform& wave, const DspConfig& cfg);

}  // namespace l2s::dsp

#endif  // L2S_DSP_STFT_H_
