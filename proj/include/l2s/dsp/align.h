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

#ifndef L2S_DSP_ALIGN_H_
#define L2S_DSP_ALIGN_H_

#include <cstdlib>

#include "l2s/base/error.h"
#include "l2s/dsp/types.h"

namespace l2s::dsp {

// Forces exactly alpha * n_video_frames rows: truncates the tail or repeats
// the last row. A deviation of more than two frames means the audio and video
// clocks disagree and is rejected.
inline Mat AlignFrames(const Mat& frames, int n_video_frames, const DspConfig& cfg) {
  const Index target = static_cast<Index>(cfg.Alpha()) * n_video_frames;
  Require(std::llabs(static_cast<long long>(frames.rows() - target)) <= 2,
          "align_to_video: ", frames.rows(), " spectral frames cannot be aligned to ",
          target, " (", n_video_frames, " video frames)");
  Require(frames.rows() > 0, "align_to_video: empty spectrogram");
  Mat out(target, frames.cols());
  for (Index r = 0; r < target; ++r) {
    out.row(r) = frames.row(std::min(r, frames.rows() - 1));
  }
  return out;
}

template <typename Spectrogram>
Spectrogram AlignToVideo(const Spectrogram& spec, int n_video_frames,
                         const DspConfig& cfg) {
  return Spectrogram{AlignFrames(spec.frames, n_video_frames, cfg)};
}

// Mel and linear targets on the video-locked frame clock.
struct SpectrogramPair {
  MelSpectrogram mel;
  LinearSpectrogram linear;
};

SpectrogramPair ExtractTargets(const Waveform& wave, int n_video_frames,
                               const DspConfig& cfg);

}  // namespace l2s::dsp

#endif  // L2S_DSP_ALIGN_H_
