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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "l2s/base/error.h"
#include "l2s/dsp/align.h"
#include "l2s/dsp/griffin_lim.h"
#include "l2s/dsp/mel.h"
#include "l2s/dsp/stft.h"

namespace l2s::dsp {
namespace {

constexpr double kPi = std::numbers::pi;

Waveform Sine(double hz, size_t n, double amp = 1.0, int sr = 16000) {
  Waveform w;
  w.sample_rate_hz = sr;
  w.samples.resize(n);
  for (size_t i = 0; i < n; ++i) w.samples[i] = amp * std::sin(2 * kPi * hz * i / sr);
  return w;
}

TEST(StftTest, FrameWidthAndCountFollowCenteredFraming) {
  DspConfig cfg;
  const LinearSpectrogram s = StftMagnitude(Sine(300, 16000), cfg);
  EXPECT_EQ(s.frames.cols(), 321);
  EXPECT_EQ(s.frames.rows(), 16000 / 160 + 1);
}

TEST(StftTest, ZeroWaveGivesZeroSpectrogram) {
  DspConfig cfg;
  Waveform w;
  w.samples.assign(1600, 0.0);
  const LinearSpectrogram s = StftMagnitude(w, cfg);
  EXPECT_EQ(s.frames.rows(), 11);
  EXPECT_EQ(s.frames.cwiseAbs().maxCoeff(), 0.0);
}

TEST(StftTest, SinePeaksAtExpectedBin) {
  DspConfig cfg;
  const LinearSpectrogram s = StftMagnitude(Sine(440, 16000), cfg);
  const int expected = static_cast<int>(std::lround(440.0 * 640 / 16000));
  ASSERT_EQ(expected, 18);
  for (Index r = 4; r < s.frames.rows() - 4; ++r) {
    Index arg;
    s.frames.row(r).maxCoeff(&arg);
    EXPECT_EQ(arg, expected) << "frame " << r;
  }
}

TEST(StftTest, MatchesDirectDftOfOneFrame) {
  DspConfig cfg;
  const Waveform w = Sine(440, 4000, 0.8);
  const LinearSpectrogram s = StftMagnitude(w, cfg);
  const std::vector<double> win = AnalysisWindow(cfg);
  const std::vector<double> padded = ReflectPad(w.samples, cfg.fft_size / 2);
  const int frame = 7;
  for (int k : {0, 5, 18, 100, 320}) {
    std::complex<double> acc = 0;
    for (int n = 0; n < cfg.fft_size; ++n) {
      acc += padded[frame * cfg.hop_length + n] * win[n] *
             std::polar(1.0, -2 * kPi * k * n / cfg.fft_size);
    }
    EXPECT_NEAR(s.frames(frame, k), std::abs(acc), 1e-9);
  }
}

TEST(StftTest, PositivelyHomogeneous) {
  DspConfig cfg;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 0.3);
  Waveform w;
  w.samples.resize(3000);
  for (double& v : w.samples) v = n(rng);
  const Mat a = StftMagnitude(w, cfg).frames;
  for (double& v : w.samples) v *= 2.5;
  const Mat b = StftMagnitude(w, cfg).frames;
  EXPECT_LE((b - 2.5 * a).cwiseAbs().maxCoeff(), 1e-6 * b.cwiseAbs().maxCoeff());
}

TEST(StftTest, RejectsEmptyOrMismatchedRate) {
  DspConfig cfg;
  Waveform empty;
  EXPECT_THROW(StftMagnitude(empty, cfg), ShapeError);
  EXPECT_THROW(StftMagnitude(Sine(100, 1000, 1.0, 8000), cfg), ShapeError);
}

TEST(StftTest, InverseRecoversSignalInterior) {
  DspConfig cfg;
  const Waveform w = Sine(523, 6400, 0.5);
  const std::vector<double> padded = ReflectPad(w.samples, cfg.fft_size / 2);
  const std::vector<double> back = InverseStftFrames(StftFrames(padded, cfg), cfg);
  for (size_t i = cfg.fft_size; i + cfg.fft_size < back.size(); ++i) {
    ASSERT_NEAR(back[i], padded[i], 1e-9) << i;
  }
}

TEST(ConfigTest, DefaultsAndValidation) {
  DspConfig cfg;
  EXPECT_EQ(cfg.Alpha(), 4);
  EXPECT_EQ(cfg.NumBins(), 321);
  EXPECT_NO_THROW(cfg.Validate());
  DspConfig bad = cfg;
  bad.win_length = 800;
  EXPECT_THROW(bad.Validate(), ConfigError);
  bad = cfg;
  bad.hop_length = 150;
  EXPECT_THROW(bad.Validate(), ConfigError);
}

TEST(MelTest, ZeroSpectrogramHitsFloor) {
  DspConfig cfg;
  LinearSpectrogram s{Mat::Zero(3, 321)};
  const MelSpectrogram m = LinearToMel(s, cfg);
  EXPECT_EQ(m.frames.cols(), 80);
  EXPECT_NEAR(m.frames.maxCoeff(), std::log(1e-5), 1e-12);
  EXPECT_NEAR(m.frames.minCoeff(), std::log(1e-5), 1e-12);
}

TEST(MelTest, UnitAreaRowsSumToMelCount) {
  DspConfig cfg;
  const Mat fb = MelFilterbank(cfg);
  ASSERT_EQ(fb.rows(), 80);
  ASSERT_EQ(fb.cols(), 321);
  EXPECT_NEAR((fb * Mat::Ones(321, 1)).sum(), 80.0, 1e-9);
  EXPECT_GE(fb.minCoeff(), 0.0);
}

TEST(MelTest, ImpulseTouchesAtMostTwoFilters) {
  DspConfig cfg;
  const Mat fb = MelFilterbank(cfg);
  int nonzero = 0;
  for (Index m = 0; m < fb.rows(); ++m) nonzero += fb(m, 18) > 0;
  EXPECT_GE(nonzero, 1);
  EXPECT_LE(nonzero, 2);
}

TEST(MelTest, FiltersHaveContiguousSupportAndCoverTheBand) {
  DspConfig cfg;
  const Mat fb = MelFilterbank(cfg);
  for (Index m = 0; m < fb.rows(); ++m) {
    Index first = -1, last = -1;
    for (Index k = 0; k < fb.cols(); ++k) {
      if (fb(m, k) > 0) {
        if (first < 0) first = k;
        last = k;
      }
    }
    ASSERT_GE(first, 0) << "empty filter " << m;
    for (Index k = first; k <= last; ++k) EXPECT_GT(fb(m, k), 0) << m << "," << k;
  }
  // Bins strictly inside (fmin, fmax) belong to at least one filter.
  for (Index k = 1; k < fb.cols() - 1; ++k) EXPECT_GT(fb.col(k).sum(), 0) << k;
}

TEST(MelTest, RejectsWrongWidth) {
  DspConfig cfg;
  EXPECT_THROW(LinearToMel(LinearSpectrogram{Mat::Zero(2, 100)}, cfg), ShapeError);
}

TEST(AlignTest, TruncatesPadsAndPassesThrough) {
  DspConfig cfg;
  Mat m41 = Mat::Random(41, 3);
  EXPECT_EQ(AlignFrames(m41, 10, cfg).rows(), 40);
  Mat m40 = Mat::Random(40, 3);
  EXPECT_EQ(AlignFrames(m40, 10, cfg), m40);
  Mat m39 = Mat::Random(39, 3);
  const Mat a = AlignFrames(m39, 10, cfg);
  ASSERT_EQ(a.rows(), 40);
  EXPECT_EQ(a.row(39), m39.row(38));
  EXPECT_EQ(a.topRows(39), m39);
  EXPECT_THROW(AlignFrames(Mat::Random(43, 3), 10, cfg), ShapeError);
}

TEST(AlignTest, ClipDurationsYieldFourFramesPerVideoFrame) {
  DspConfig cfg;
  for (int t : {8, 16, 40}) {
    const Waveform w = Sine(200, static_cast<size_t>(t) * cfg.SamplesPerVideoFrame(), 0.5);
    const SpectrogramPair p = ExtractTargets(w, t, cfg);
    EXPECT_EQ(p.mel.frames.rows(), 4 * t);
    EXPECT_EQ(p.linear.frames.rows(), 4 * t);
    EXPECT_EQ(p.mel.frames.cols(), 80);
    EXPECT_EQ(p.linear.frames.cols(), 321);
  }
}

TEST(GriffinLimTest, SineReconstructionImprovesWithIterations) {
  DspConfig cfg;
  const Waveform w = Sine(440, 16000);
  const LinearSpectrogram s = StftMagnitude(w, cfg);
  double last = -1e9;
  for (int iters : {10, 30, 60}) {
    std::vector<double> res;
    const Waveform y = GriffinLim(s, cfg, iters, 1, &res);
    ASSERT_EQ(y.samples.size(), static_cast<size_t>(s.frames.rows()) * 160);
    const double snr = 20 * std::log10(s.frames.norm() * std::sqrt(2.0) / res.back());
    EXPECT_GE(snr, last - 1e-9);
    last = snr;
    double e = 0;
    for (double v : y.samples) e += v * v;
    EXPECT_NEAR(std::sqrt(e / y.samples.size()), std::sqrt(0.5), 0.05);
  }
}

TEST(GriffinLimTest, ZeroSpectrogramGivesSilence) {
  DspConfig cfg;
  const Waveform y = GriffinLim(LinearSpectrogram{Mat::Zero(5, 321)}, cfg, 3, 0);
  ASSERT_EQ(y.samples.size(), 5u * 160);
  for (double v : y.samples) EXPECT_EQ(v, 0.0);
}

TEST(GriffinLimTest, DeterministicGivenSeed) {
  DspConfig cfg;
  const LinearSpectrogram s = StftMagnitude(Sine(300, 3200), cfg);
  EXPECT_EQ(GriffinLim(s, cfg, 5, 9).samples, GriffinLim(s, cfg, 5, 9).samples);
  EXPECT_NE(GriffinLim(s, cfg, 5, 9).samples, GriffinLim(s, cfg, 5, 10).samples);
}

TEST(GriffinLimTest, ResidualNeverIncreasesOnRandomSpectra) {
  DspConfig cfg;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Mat mag(12, 321);
    for (Index i = 0; i < mag.size(); ++i) mag.data()[i] = u(rng);
    std::vector<double> res;
    GriffinLim(LinearSpectrogram{mag}, cfg, 30, seed, &res);
    for (size_t k = 1; k < res.size(); ++k) {
      EXPECT_LE(res[k], res[k - 1] * (1 + 1e-12)) << "seed " << seed << " iter " << k;
    }
  }
}

}  // namespace
}  // namespace l2s::dsp
