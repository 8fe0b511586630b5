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

#ifndef L2S_DSP_MEL_H_
#define L2S_DSP_MEL_H_

#include "l2s/dsp/types.h"

namespace l2s::dsp {

double HzToMel(double hz);
double MelToHz(double mel);

// [n_mels x n_bins] triangular filters on the HTK mel scale, equally spaced
// between fmin and fmax. Each row sums to one.
Mat MelFilterbank(const DspConfig& cfg);

// log(max(M * frame, log_floor)) per frame.
MelSpectrogram LinearToMel(const LinearSpectrogram& spec, const DspConfig& cfg);

}  // namespace l2s::dsp

#endif  // L2S_DSP_MEL_H_
