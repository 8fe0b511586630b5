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

#ifndef L2S_IO_WAV_H_
#define L2S_IO_WAV_H_

#include <string>

#include "l2s/dsp/types.h"

namespace l2s::io {

// RIFF PCM16 mono. Samples are clipped to [-1, 1] and scaled by 32767.
void WriteWav(const std::string& path, const dsp::Waveform& wave);
dsp::Waveform ReadWav(const std::string& path);

}  // namespace l2s::io

#endif  // L2S_IO_WAV_H_
