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

#include "l2s/corpus/render.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>

#include "l2s/base/error.h"
#include "l2s/base/random.h"

namespace l2s::corpus {
namespace {

constexpr int kHalf = kBaseImageSize / 2;
constexpr int kBarWidth = 4;
constexpr int kBarPitch = 6;
constexpr int kBarLeft = 2;
constexpr double kBackground = 0.1;
constexpr double kBarLevel = 0.8;
constexpr double kLipOn = 0.85;
constexpr double kLipOff = 0.1;
constexpr double kLipLine = 0.8;
constexpr int kLipBlock = 4;
constexpr int kLipGridRows = kHalf / kLipBlock;            // 4
constexpr int kLipGridCols = kBaseImageSize / kLipBlock;   // 8
constexpr int kLipBits = kLipGridRows * kLipGridCols;      // 32
constexpr int kMaxTokens = 64;
constexpr int kMinCodeDistance = 10;

// Fixed block codes, drawn once from a constant seed with a minimum pairwise
// Hamming distance.
const std::vector<uint32_t>& LipCodes() {
  static const std::vector<uint32_t> codes = [] {
    std::vector<uint32_t> out;
    Rng rng(0x11b5c0de);
    while (static_cast<int>(out.size()) < kMaxTokens) {
      const uint32_t c = static_cast<uint32_t>(rng());
      bool ok = true;
      for (uint32_t o : out) {
        if (std::popcount(c ^ o) < kMinCodeDistance) ok = false;
      }
      if (ok) out.push_back(c);
    }
    return out;
  }();
  return codes;
}

Mat Upscale(const Mat& base, int size) {
  Require(size >= kBaseImageSize, "image size ", size, " is below ", kBaseImageSize);
  if (size == kBaseImageSize) return base;
  Mat out(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      out(y, x) = base(y * kBaseImageSize / size, x * kBaseImageSize / size);
    }
  }
  return out;
}

// Base-grid image: noisy glyph top half, neutral bottom half.
Mat RenderFaceBase(const SyntheticSpeaker& spk) {
  Mat img = Mat::Constant(kBaseImageSize, kBaseImageSize, kBackground);
  const GlyphValues values = SpeakerGlyphValues(spk);
  for (int b = 0; b < static_cast<int>(values.size()); ++b) {
    const double top = kHalf - GlyphBarHeight(values[b]);
    for (int r = 0; r < kHalf; ++r) {
      const double cover = std::clamp(r + 1.0 - top, 0.0, 1.0);
      for (int c = 0; c < kBarWidth; ++c) {
        img(r, kBarLeft + b * kBarPitch + c) += (kBarLevel - kBackground) * cover;
      }
    }
  }
  Rng rng(spk.face_seed);
  std::uniform_real_distribution<double> noise(-kFaceNoise, kFaceNoise);
  for (int r = 0; r < kHalf; ++r) {
    for (int c = 0; c < kBaseImageSize; ++c) {
      img(r, c) = std::clamp(img(r, c) + noise(rng), 0.0, 1.0);
    }
  }
  img.bottomRows(kHalf) = LipGlyph(-1);
  return img;
}

void Biquad(const std::vector<double>& x, double b0, double b1, double b2, double a1,
            double a2, std::vector<double>* y) {
  y->assign(x.size(), 0.0);
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (size_t n = 0; n < x.size(); ++n) {
    const double v = b0 * x[n] + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x[n];
    y2 = y1;
    y1 = v;
    (*y)[n] = v;
  }
}

double Rms(const std::vector<double>& v) {
  double s = 0;
  for (double a : v) s += a * a;
  return v.empty() ? 0.0 : std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

Mat VideoClip::Frame(Index t) const {
  Mat f(height, width);
  for (Index i = 0; i < f.size(); ++i) f.data()[i] = frames(t, i);
  return f;
}

GlyphValues SpeakerGlyphValues(const SyntheticSpeaker& spk) {
  GlyphValues v;
  v[0] = std::clamp((spk.f0_hz - kGlyphF0Lo) / (kGlyphF0Hi - kGlyphF0Lo), 0.0, 1.0);
  for (int k = 0; k < kTimbreSize; ++k) v[1 + k] = std::clamp(spk.timbre[k], 0.0, 1.0);
  return v;
}

double GlyphBarHeight(double value) { return 2.0 + 12.0 * value; }

FaceImage RenderFace(const SyntheticSpeaker& spk, int size) {
  return FaceImage{Upscale(RenderFaceBase(spk), size)};
}

GlyphValues DecodeGlyphValues(const FaceImage& face) {
  Require(face.pixels.rows() == kBaseImageSize && face.pixels.cols() == kBaseImageSize,
          "glyph decoding expects a ", kBaseImageSize, "x", kBaseImageSize, " image");
  GlyphValues v;
  for (int b = 0; b < static_cast<int>(v.size()); ++b) {
    double height = 0;
    for (int c = 0; c < kBarWidth; ++c) {
      for (int r = 0; r < kHalf; ++r) {
        height += (face.pixels(r, kBarLeft + b * kBarPitch + c) - kBackground) /
                  (kBarLevel - kBackground);
      }
    }
    height /= kBarWidth;
    v[b] = (height - 2.0) / 12.0;
  }
  return v;
}

double DecodeF0(const FaceImage& face) {
  return kGlyphF0Lo + (kGlyphF0Hi - kGlyphF0Lo) * DecodeGlyphValues(face)[0];
}

Mat LipGlyph(int token) {
  Mat g = Mat::Constant(kHalf, kBaseImageSize, kLipOff);
  if (token < 0) {
    g.block(kHalf / 2 - 1, 4, 2, kBaseImageSize - 8).setConstant(kLipLine);
    return g;
  }
  Require(token < kMaxTokens, "token ", token, " exceeds the glyph table");
  const uint32_t code = LipCodes()[token];
  for (int bit = 0; bit < kLipBits; ++bit) {
    if ((code >> bit) & 1u) {
      const int br = bit / kLipGridCols, bc = bit % kLipGridCols;
      g.block(br * kLipBlock, bc * kLipBlock, kLipBlock, kLipBlock).setConstant(kLipOn);
    }
  }
  return g;
}

VideoClip RenderVideo(const SyntheticSpeaker& spk, const Utterance& utt, int fps,
                      int size) {
  Require(!utt.tokens.empty(), "render_video: empty utterance");
  Require(utt.frames_per_token > kCrossfadeFrames, "frames_per_token must exceed ",
          kCrossfadeFrames);
  const Mat face = RenderFaceBase(spk);
  const int n = utt.NumFrames();
  VideoClip clip;
  clip.height = clip.width = size;
  clip.fps = fps;
  clip.frames.resize(n, static_cast<Index>(size) * size);
  Mat frame = face;
  for (int t = 0; t < n; ++t) {
    const int j = t / utt.frames_per_token;
    const int local = t % utt.frames_per_token;
    Mat lip = LipGlyph(utt.tokens[j]);
    if (j > 0 && local < kCrossfadeFrames) {
      const double w = (local + 1.0) / (kCrossfadeFrames + 1.0);
      lip = (1.0 - w) * LipGlyph(utt.tokens[j - 1]) + w * lip;
    }
    frame.bottomRows(kHalf) = lip;
    const Mat up = Upscale(frame, size);
    for (Index i = 0; i < up.size(); ++i) clip.frames(t, i) = up.data()[i];
  }
  return clip;
}

double TokenCenterHz(int token) { return 400.0 + 300.0 * token; }

dsp::Waveform RenderAudio(const SyntheticSpeaker& spk, const Utterance& utt,
                          const dsp::DspConfig& cfg) {
  Require(!utt.tokens.empty(), "render_audio: empty utterance");
  const int sr = cfg.sample_rate_hz;
  const int spf = cfg.SamplesPerVideoFrame();
  const size_t n = static_cast<size_t>(utt.NumFrames()) * spf;
  const size_t seg = static_cast<size_t>(utt.frames_per_token) * spf;

  std::vector<double> x(n, 0.0);
  for (int h = 1; h * spk.f0_hz < kExcitationTopHz; ++h) {
    const double amp = h <= kTimbreSize ? spk.timbre[h - 1] : 0.5 * kTimbreSize / h;
    const double w = 2.0 * std::numbers::pi * h * spk.f0_hz / sr;
    for (size_t i = 0; i < n; ++i) x[i] += amp * std::sin(w * static_cast<double>(i));
  }
  const double x_rms = Rms(x);

  std::map<int, std::vector<double>> band;
  for (int tok : utt.tokens) {
    if (band.count(tok)) continue;
    const double w0 = 2.0 * std::numbers::pi * TokenCenterHz(tok) / sr;
    const double alpha = std::sin(w0) / (2.0 * kTokenQ);
    const double a0 = 1.0 + alpha;
    std::vector<double> y;
    Biquad(x, alpha / a0, 0.0, -alpha / a0, -2.0 * std::cos(w0) / a0,
           (1.0 - alpha) / a0, &y);
    const double r = Rms(y);
    for (double& v : y) v = r > 0 ? v / r : 0.0;
    band.emplace(tok, std::move(y));
  }

  dsp::Waveform wave;
  wave.sample_rate_hz = sr;
  wave.samples.resize(n);
  const size_t ramp = static_cast<size_t>(kCrossfadeFrames) * spf;
  for (size_t i = 0; i < n; ++i) {
    const size_t j = i / seg;
    const size_t local = i % seg;
    double v = band[utt.tokens[j]][i];
    if (j > 0 && local < ramp) {
      const double w = (static_cast<double>(local) + 0.5) / static_cast<double>(ramp);
      v = (1.0 - w) * band[utt.tokens[j - 1]][i] + w * v;
    }
    wave.samples[i] = v + (x_rms > 0 ? kDryMix * x[i] / x_rms : 0.0);
  }
  double peak = 0;
  for (double v : wave.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0) {
    for (double& v : wave.samples) v *= kPeakAmplitude / peak;
  }
  return wave;
}

}  // namespace l2s::corpus
