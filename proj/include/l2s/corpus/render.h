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

#ifndef L2S_CORPUS_RENDER_H_
#define L2S_CORPUS_RENDER_H_

#include <array>
#include <vector>

#include "l2s/base/matrix.h"
#include "l2s/corpus/speaker.h"
#include "l2s/dsp/types.h"

namespace l2s::corpus {

inline constexpr int kBaseImageSize = 32;

struct FaceImage {
  Mat pixels;  // [size x size], values in [0, 1]
};

// Frames are flattened row-major: frames.row(t) holds frame t's pixels.
struct VideoClip {
  Mat frames;  // [T x height*width]
  int height = kBaseImageSize;
  int width = kBaseImageSize;
  int fps = 25;
  Index NumFrames() const { return frames.rows(); }
  Mat Frame(Index t) const;
};

struct Utterance {
  std::vector<int> tokens;
  int frames_per_token = 8;
  int NumFrames() const { return static_cast<int>(tokens.size()) * frames_per_token; }
};

// Glyph values in [0, 1]: f0 normalized over the glyph band, then timbre.
using GlyphValues = std::array<double, 1 + kTimbreSize>;
GlyphValues SpeakerGlyphValues(const SyntheticSpeaker& spk);

// Top half: one anti-aliased bar per glyph value, height affine in the value,
// plus uniform texture noise of amplitude kFaceNoise seeded by face_seed.
// Bottom half: the neutral closed-lip pattern. `size` must be at least
// kBaseImageSize; larger sizes are nearest-neighbour upscales.
inline constexpr double kFaceNoise = 0.05;
FaceImage RenderFace(const SyntheticSpeaker& spk, int size = kBaseImageSize);

// Bar heights in pixels of the base grid for given glyph values.
double GlyphBarHeight(double value);
// Inverts the bar rendering of a base-size image.
GlyphValues DecodeGlyphValues(const FaceImage& face);
double DecodeF0(const FaceImage& face);

// 16 x 32 lip pattern of a token on the base grid; `token` < 0 selects the
// neutral closed-lip pattern.
Mat LipGlyph(int token);

// Consecutive tokens are crossfaded over the first two frames of the later
// token (weights 1/3 and 2/3 on the new glyph).
inline constexpr int kCrossfadeFrames = 2;
VideoClip RenderVideo(const SyntheticSpeaker& spk, const Utterance& utt, int fps = 25,
                      int size = kBaseImageSize);

// Harmonic excitation: timbre-weighted harmonics 1..4 plus a falling series
// of upper harmonics below kExcitationTopHz. Each token passes the excitation
// through a constant-peak bandpass at 400 + 300*token Hz (Q = 5); the RMS
// normalized band signal is mixed with the normalized excitation and the
// token signals are crossfaded with the video schedule. Peak is 0.7.
inline constexpr double kExcitationTopHz = 4000.0;
inline constexpr double kTokenQ = 5.0;
inline constexpr double kDryMix = 0.5;
inline constexpr double kPeakAmplitude = 0.7;
double TokenCenterHz(int token);
dsp::Waveform RenderAudio(const SyntheticSpeaker& spk, const Utterance& utt,
                          const dsp::DspConfig& cfg);

}  // namespace l2s::corpus

#endif  // L2S_CORPUS_RENDER_H_
