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

#ifndef L2S_DSP_GRIFFIN_LIM_H_
#define L2S_DSP_GRIFFIN_LIM_H_

#include <cstdint>
#include <vector>

#include "l2s/dsp/types.h"

namespace l2s::dsp {

inline constexpr int kDefaultGriffinLimIters = 60;

// Frobenius distance between |X| and `target` over the full two-sided
// spectrum (bins other than DC and Nyquist count twice).
double ConsistencyResidual(const CMat& stft, const Mat& target);

// Plain alternating-projection Griffin-Lim. Initial phases are uniform on
// [0, 2pi) from `seed`. Iterates on the uncropped signal domain so each step
// is an exact least-squares projection; the returned waveform drops the
// fft_size/2 centering pad and has n_frames * hop samples, one hop per frame.
// If `residuals` is given it receives one entry per iteration.
Waveform GriffinLim(const LinearSpectrogram& spec, const DspConfig& cfg, int iters,
                    uint64_t seed, std::vector<double>* residuals = nullptr);

}  // namespace l2s::dsp

#endif  // L2S_DSP_GRIFFIN_LIM_H_
