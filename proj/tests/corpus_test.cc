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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "l2s/base/error.h"
#include "l2s/base/hash.h"
#include "l2s/corpus/corpus.h"
#include "l2s/dsp/stft.h"
#include "l2s/eval/metrics.h"

namespace l2s::corpus {
namespace {

namespace fs = std::filesystem;

double SpectralCentroid(const dsp::Waveform& w) {
  dsp::DspConfig cfg;
  const Mat mag = dsp::StftMagnitude(w, cfg).frames;
  double num = 0, den = 0;
  for (Index r = 0; r < mag.rows(); ++r) {
    for (Index k = 0; k < mag.cols(); ++k) {
      const double p = mag(r, k) * mag(r, k);
      num += p * k * cfg.sample_rate_hz / cfg.fft_size;
      den += p;
    }
  }
  return num / den;
}

SyntheticSpeaker Speaker(uint64_t seed, Gender g) { return MakeSpeaker(seed, g, 0); }

TEST(SpeakerTest, DeterministicAndInBand) {
  const SyntheticSpeaker a = Speaker(1, Gender::kMale), b = Speaker(1, Gender::kMale);
  EXPECT_EQ(a.f0_hz, b.f0_hz);
  EXPECT_EQ(a.timbre, b.timbre);
  EXPECT_EQ(a.face_seed, b.face_seed);
  std::set<std::pair<double, double>> seen;
  for (uint64_t s = 0; s < 1000; ++s) {
    const SyntheticSpeaker m = Speaker(s, Gender::kMale), f = Speaker(s, Gender::kFemale);
    EXPECT_GE(m.f0_hz, 100);
    EXPECT_LE(m.f0_hz, 140);
    EXPECT_GE(f.f0_hz, 190);
    EXPECT_LE(f.f0_hz, 240);
    for (double t : m.timbre) {
      EXPECT_GE(t, 0.0);
      EXPECT_LE(t, 1.0);
    }
    EXPECT_TRUE(seen.insert({m.f0_hz, m.timbre[0]}).second) << "duplicate at seed " << s;
  }
}

TEST(FaceTest, NoiseOnlyDiffersAcrossFaceSeeds) {
  SyntheticSpeaker a = Speaker(3, Gender::kFemale), b = a;
  b.face_seed ^= 0xabcdef;
  const FaceImage fa = RenderFace(a), fb = RenderFace(b);
  EXPECT_GT((fa.pixels - fb.pixels).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((fa.pixels - fb.pixels).cwiseAbs().maxCoeff(), 2 * kFaceNoise + 1e-12);
  EXPECT_EQ(fa.pixels.bottomRows(16), fb.pixels.bottomRows(16));
  const GlyphValues va = SpeakerGlyphValues(a), vb = SpeakerGlyphValues(b);
  for (size_t i = 0; i < va.size(); ++i) EXPECT_NEAR(va[i], vb[i], 1e-6);
  EXPECT_GE(fa.pixels.minCoeff(), 0.0);
  EXPECT_LE(fa.pixels.maxCoeff(), 1.0);
}

TEST(FaceTest, BandMaximumGivesMaximumBar) {
  SyntheticSpeaker s = Speaker(5, Gender::kFemale);
  s.f0_hz = 240;
  EXPECT_DOUBLE_EQ(SpeakerGlyphValues(s)[0], 1.0);
  EXPECT_DOUBLE_EQ(GlyphBarHeight(1.0), 14.0);
}

TEST(FaceTest, DecodingRecoversF0) {
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const SyntheticSpeaker s = Speaker(seed, seed % 2 ? Gender::kFemale : Gender::kMale);
    EXPECT_NEAR(DecodeF0(RenderFace(s)), s.f0_hz, 5.0) << "seed " << seed;
  }
}

TEST(FaceTest, LargerSizesAreNearestNeighbourUpscales) {
  const SyntheticSpeaker s = Speaker(3, Gender::kMale);
  const Mat base = RenderFace(s).pixels;
  for (int size : {64, 112}) {
    const Mat big = RenderFace(s, size).pixels;
    ASSERT_EQ(big.rows(), size);
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        ASSERT_EQ(big(y, x), base(y * kBaseImageSize / size, x * kBaseImageSize / size));
      }
    }
  }
  EXPECT_THROW(RenderFace(s, 16), std::exception);
}

TEST(FaceTest, AffineDecoderGeneralizesToUnseenSpeakers) {
  const Corpus c = PlanCorpus(CorpusConfig{}, 17);
  // One feature per glyph bar: the summed pixels of its columns in the top
  // half of the image.
  auto bar_sums = [](const SyntheticSpeaker& s) {
    const Mat& p = RenderFace(s).pixels;
    RowVec f(6);
    f(0) = 1.0;
    for (int b = 0; b < 5; ++b) f(1 + b) = p.block(0, 2 + 6 * b, 16, 4).sum();
    return f;
  };
  Mat x(static_cast<Index>(c.seen_speakers.size()), 6), y(x.rows(), 5);
  for (Index i = 0; i < x.rows(); ++i) {
    const auto& s = c.seen_speakers[i];
    x.row(i) = bar_sums(s);
    y(i, 0) = s.f0_hz;
    for (int k = 0; k < 4; ++k) y(i, 1 + k) = s.timbre[k];
  }
  const Mat coef = x.colPivHouseholderQr().solve(y);
  for (const auto& s : c.unseen_speakers) {
    const RowVec pred = bar_sums(s) * coef;
    EXPECT_NEAR(pred(0), s.f0_hz, 5.0) << "unseen speaker " << s.id;
  }
}

TEST(VideoTest, FrameCountAndFactorization) {
  const SyntheticSpeaker a = Speaker(1, Gender::kMale), b = Speaker(2, Gender::kFemale);
  const Utterance u{{3, 1, 6}, 8};
  const VideoClip va = RenderVideo(a, u), vb = RenderVideo(b, u);
  ASSERT_EQ(va.NumFrames(), 24);
  const Mat face = RenderFace(a).pixels;
  for (Index t = 0; t < va.NumFrames(); ++t) {
    const Mat fa = va.Frame(t), fb = vb.Frame(t);
    EXPECT_EQ(fa.topRows(16), face.topRows(16));
    EXPECT_EQ(fa.bottomRows(16), fb.bottomRows(16));
    EXPECT_NE(fa.topRows(16), fb.topRows(16));
  }
  // Top half independent of tokens.
  const VideoClip vc = RenderVideo(a, Utterance{{0, 0, 0}, 8});
  EXPECT_EQ(vc.Frame(5).topRows(16), va.Frame(5).topRows(16));
  EXPECT_THROW(RenderVideo(a, Utterance{{}, 8}), ShapeError);
}

TEST(VideoTest, DistinctGlyphPerToken) {
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; ++j) EXPECT_NE(LipGlyph(i), LipGlyph(j));
    EXPECT_NE(LipGlyph(i), LipGlyph(-1));
  }
}

TEST(VideoTest, FrameDifferencesPeakOnlyAtTokenBoundaries) {
  const CorpusConfig cfg;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const SyntheticSpeaker s = Speaker(seed, Gender::kMale);
    Utterance u = DrawUtterance(cfg, seed);
    const VideoClip v = RenderVideo(s, u);
    for (Index t = 1; t < v.NumFrames(); ++t) {
      const double e = (v.frames.row(t) - v.frames.row(t - 1)).squaredNorm();
      const int local = static_cast<int>(t % u.frames_per_token);
      const bool boundary = t >= u.frames_per_token && local <= kCrossfadeFrames;
      if (!boundary) {
        EXPECT_EQ(e, 0.0) << "seed " << seed << " frame " << t;
      }
    }
  }
}

TEST(AudioTest, LengthMatchesVideoClock) {
  const dsp::DspConfig cfg;
  const dsp::Waveform w = RenderAudio(Speaker(1, Gender::kMale), Utterance{{1, 2, 3}, 8}, cfg);
  EXPECT_EQ(w.samples.size(), 15360u);
  double peak = 0;
  for (double v : w.samples) peak = std::max(peak, std::abs(v));
  EXPECT_NEAR(peak, 0.7, 1e-12);
}

TEST(AudioTest, PitchTracksSpeakerF0) {
  const dsp::DspConfig cfg;
  const CorpusConfig ccfg;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    for (Gender g : {Gender::kMale, Gender::kFemale}) {
      const SyntheticSpeaker s = Speaker(seed, g);
      const eval::F0Estimate f = eval::EstimateF0(RenderAudio(s, DrawUtterance(ccfg, seed + 99), cfg));
      ASSERT_TRUE(f.reliable);
      if (g == Gender::kMale) {
        EXPECT_GE(f.hz, 95);
        EXPECT_LE(f.hz, 145);
      }
      EXPECT_NEAR(f.hz, s.f0_hz, 3.0);
    }
  }
}

TEST(AudioTest, TokenCentroidsSeparateByAtLeast100Hz) {
  const dsp::DspConfig cfg;
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const SyntheticSpeaker s = Speaker(seed, seed % 2 ? Gender::kFemale : Gender::kMale);
    std::vector<double> c;
    for (int tok = 0; tok < 8; ++tok) c.push_back(SpectralCentroid(RenderAudio(s, Utterance{{tok}, 8}, cfg)));
    for (int i = 0; i < 8; ++i) {
      for (int j = i + 1; j < 8; ++j) {
        EXPECT_GE(std::abs(c[i] - c[j]), 100.0) << "seed " << seed << " tokens " << i << "," << j;
      }
    }
  }
}

TEST(CorpusTest, PlanCountsAndSplits) {
  const Corpus c = PlanCorpus(CorpusConfig{}, 3);
  EXPECT_EQ(c.seen_speakers.size(), 20u);
  EXPECT_EQ(c.unseen_speakers.size(), 8u);
  EXPECT_EQ(c.items.size(), 1400u);
  const SplitCounts sc = ComputeSplit(50, CorpusConfig{});
  EXPECT_EQ(sc.train, 45);
  EXPECT_EQ(sc.dev, 2);
  EXPECT_EQ(sc.test, 3);
  int males = 0;
  for (const auto& s : c.unseen_speakers) males += s.gender == Gender::kMale;
  EXPECT_EQ(males, 4);
  males = 0;
  for (const auto& s : c.seen_speakers) males += s.gender == Gender::kMale;
  EXPECT_EQ(males, 10);
  std::set<int> train_ids, unseen_ids;
  for (const auto* it : c.ItemsIn(Split::kTrain)) train_ids.insert(it->speaker_id);
  for (const auto* it : c.ItemsIn(Split::kUnseen)) unseen_ids.insert(it->speaker_id);
  for (int id : unseen_ids) EXPECT_EQ(train_ids.count(id), 0u);
  EXPECT_EQ(c.ItemsIn(Split::kTrain).size(), 900u);
  for (const auto& it : c.items) {
    EXPECT_GE(it.utterance.tokens.size(), 1u);
    EXPECT_LE(it.utterance.tokens.size(), 6u);
  }
}

TEST(CorpusTest, MaterializedCorpusIsDeterministicAndLoadable) {
  CorpusConfig cfg;
  cfg.n_seen_speakers = 4;
  cfg.n_unseen_speakers = 2;
  cfg.utterances_per_speaker = 5;
  const fs::path root = fs::temp_directory_path() / "l2s_corpus_test";
  fs::remove_all(root);
  MakeCorpus(cfg, 42, (root / "a").string());
  MakeCorpus(cfg, 42, (root / "b").string());
  EXPECT_EQ(Sha256File((root / "a" / "manifest.json").string()),
            Sha256File((root / "b" / "manifest.json").string()));
  const Corpus c = LoadCorpus((root / "a").string());
  ASSERT_EQ(c.items.size(), 30u);
  const CorpusItem& it = c.items[7];
  const VideoClip v = LoadVideo(c, it);
  EXPECT_EQ(v.NumFrames(), it.utterance.NumFrames());
  EXPECT_EQ(v.frames.cols(), 32 * 32);
  const dsp::Waveform w = LoadAudio(c, it);
  EXPECT_EQ(w.samples.size(), static_cast<size_t>(it.utterance.NumFrames()) * 640);
  const FaceImage f = LoadFace(c, it.speaker_id);
  EXPECT_NEAR((f.pixels - RenderFace(c.Speaker(it.speaker_id)).pixels).cwiseAbs().maxCoeff(), 0,
              1e-6);
  EXPECT_THROW(LoadCorpus((root / "missing").string()), IoError);
}

TEST(CorpusTest, GroundTruthAudioMatchesGender) {
  const Corpus c = PlanCorpus(CorpusConfig{}, 5);
  std::vector<eval::GenderItem> items;
  for (size_t i = 0; i < c.items.size(); i += 7) {
    const CorpusItem& it = c.items[i];
    items.push_back({RenderAudio(c.Speaker(it.speaker_id), it.utterance, c.cfg.dsp), it.gender});
  }
  const eval::GenderMatchReport r = eval::GenderMatchRate(items);
  EXPECT_EQ(r.n_reliable, r.n_items);
  EXPECT_DOUBLE_EQ(r.rate, 1.0);
}

TEST(CorpusTest, ConfigValidationNamesField) {
  CorpusConfig cfg;
  cfg.frames_per_token = 2;
  try {
    cfg.Validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("frames_per_token"), std::string::npos);
  }
}

}  // namespace
}  // namespace l2s::corpus
