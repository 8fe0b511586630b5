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

#include "l2s/dsp/align.h"

#include "l2s/dsp/mel.h"
#include "l2s/dsp/stft.h"

namespace l2s::dsp {

SpectrogramPair ExtractTargets(const Waveform& wave, int n_video_frames,
                               const DspConfig& cfg) {
  const LinearSpectrogram lin =
      AlignToVideo(StftMagnitude(wave, cfg), n_video_frames, cfg);
  return SpectrogramPair{LinearToMel(lin, cfg), lin};
}

}  // namespace l2s::dsp
