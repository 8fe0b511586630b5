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
#include <filesystem>
#include <random>

#include "grad_check.h"
#include "l2s/base/error.h"
#include "l2s/corpus/render.h"
#include "l2s/nn/ops.h"
#include "l2s/synthesis/decoder.h"
#include "l2s/synthesis/elbo.h"
#include "l2s/synthesis/model.h"
#include "l2s/synthesis/postnet.h"

namespace l2s::synthesis {
namespace {

using nn::Var;
using testing::RandomMat;

TEST(DecoderTest, OutputShape) {
  const ConformerDecoder dec(DecoderConfig::Toy(), 1);
  std::mt19937_64 rng(1);
  const Mat mel = dec.Decode(RandomMat(96, 16, rng), RandomMat(1, 16, rng).cwiseAbs());
  EXPECT_EQ(mel.rows(), 96);
  EXPECT_EQ(mel.cols(), 80);
  EXPECT_TRUE(mel.allFinite());
}

TEST(DecoderTest, RejectsDimensionMismatch) {
  const ConformerDecoder dec(DecoderConfig::Toy(), 1);
  EXPECT_THROW(dec.Decode(Mat::Zero(8, 15), RowVec::Zero(16)), ShapeError);
  EXPECT_THROW(dec.Decode(Mat::Zero(8, 16), RowVec::Zero(8)), ShapeError);
}

TEST(DecoderTest, SpeakerConditioningIsLive) {
  const ConformerDecoder dec(DecoderConfig::Toy(), 2);
  std::mt19937_64 rng(2);
  const Mat z = RandomMat(32, 16, rng);
  const Mat a = dec.Decode(z, RandomMat(1, 16, rng).cwiseAbs());
  const Mat b = dec.Decode(z, RandomMat(1, 16, rng).cwiseAbs());
  EXPECT_GT((a - b).cwiseAbs().maxCoeff(), 0.0);
}

TEST(DecoderTest, NotShiftEquivariant) {
  const ConformerDecoder dec(DecoderConfig::Toy(), 3);
  std::mt19937_64 rng(3);
  const Mat z = RandomMat(24, 16, rng);
  const RowVec spk = RandomMat(1, 16, rng).cwiseAbs();
  Mat shifted(24, 16);
  shifted << z.bottomRows(4), z.topRows(20);
  const Mat y = dec.Decode(z, spk), ys = dec.Decode(shifted, spk);
  Mat y_shifted(24, 80);
  y_shifted << y.bottomRows(4), y.topRows(20);
  EXPECT_GT((ys - y_shifted).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(DecoderTest, OneFrameChangeReachesEveryFrame) {
  const ConformerDecoder dec(DecoderConfig::Toy(), 4);
  std::mt19937_64 rng(4);
  Mat z = RandomMat(40, 16, rng);
  const RowVec spk = RandomMat(1, 16, rng).cwiseAbs();
  const Mat before = dec.Decode(z, spk);
  z.row(5).array() += 1.0;
  const Mat after = dec.Decode(z, spk);
  for (Index t = 0; t < 40; ++t) {
    EXPECT_GT((after.row(t) - before.row(t)).cwiseAbs().maxCoeff(), 0.0) << t;
  }
}

TEST(DecoderTest, PaperPresetShapes) {
  const DecoderConfig cfg = DecoderConfig::Paper();
  const ConformerDecoder dec(cfg, 1);
  EXPECT_EQ(cfg.num_blocks, 5);
  EXPECT_EQ(cfg.model_dim, 256);
  EXPECT_EQ(cfg.num_heads, 4);
  EXPECT_EQ(cfg.conv_kernel, 31);
  const Mat mel = dec.Decode(Mat::Zero(12, 512), RowVec::Ones(256));
  EXPECT_EQ(mel.rows(), 12);
  EXPECT_EQ(mel.cols(), 80);
}

TEST(DecoderTest, ConfigValidationNamesField) {
  DecoderConfig c;
  c.num_heads = 3;
  try {
    c.Validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("decoder.num_heads"), std::string::npos);
  }
  EXPECT_EQ(DecoderConfig::FromJson(DecoderConfig::Paper().ToJson()).ToJson(),
            DecoderConfig::Paper().ToJson());
}

TEST(PostnetTest, ShapeAndNonnegativity) {
  const Postnet post(PostnetConfig::Toy(), 1);
  std::mt19937_64 rng(5);
  const Mat lin = post.Convert(RandomMat(96, 80, rng, 3.0));
  EXPECT_EQ(lin.rows(), 96);
  EXPECT_EQ(lin.cols(), 321);
  EXPECT_GE(lin.minCoeff(), 0.0);
  EXPECT_THROW(post.Convert(Mat::Zero(10, 79)), ShapeError);
}

TEST(PostnetTest, TrainAndEvalModesDiffer) {
  Postnet post(PostnetConfig::Toy(), 2);
  std::mt19937_64 rng(6);
  const Mat mel = (RandomMat(40, 80, rng).array() + 5.0).matrix();
  const Mat eval = post.Convert(mel);
  const Mat train = post.Forward(Var::Constant(mel), {40}, true).value();
  EXPECT_GT((train - eval).cwiseAbs().maxCoeff(), 1e-3);
  // The training pass moved the running mean toward the batch mean.
  EXPECT_GT(post.params().Get("postnet.layer0.bn.running_mean").value().cwiseAbs().maxCoeff(),
            0.0);
}

TEST(PostnetTest, StackedSequencesDoNotInteract) {
  const Postnet post(PostnetConfig::Toy(), 3);
  std::mt19937_64 rng(7);
  const Mat a = RandomMat(12, 80, rng), b = RandomMat(20, 80, rng);
  Mat ab(32, 80);
  ab << a, b;
  const Mat joint = post.Forward(Var::Constant(ab), {12, 20}, false).value();
  EXPECT_LE((joint.topRows(12) - post.Convert(a)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((joint.bottomRows(20) - post.Convert(b)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(post.Forward(Var::Constant(ab), {12, 19}, false), ShapeError);
}

TEST(PostnetTest, SegmentedIndexMatchesPerSequenceIndex) {
  const nn::ConvIndex joint = SegmentedConv1dIndex({3, 4}, 5);
  const nn::ConvIndex first = nn::Conv1dSameIndex(3, 5);
  const nn::ConvIndex second = nn::Conv1dSameIndex(4, 5);
  ASSERT_EQ(joint.out_rows, 7);
  for (size_t i = 0; i < first.src.size(); ++i) EXPECT_EQ(joint.src[i], first.src[i]);
  for (size_t i = 0; i < second.src.size(); ++i) {
    const int s = second.src[i];
    EXPECT_EQ(joint.src[first.src.size() + i], s < 0 ? -1 : s + 3);
  }
}

TEST(ElboTest, ExampleValues) {
  std::mt19937_64 rng(8);
  const Mat mel = RandomMat(8, 80, rng), lin = RandomMat(8, 321, rng).cwiseAbs();
  const content::ContentPosterior zero{Mat::Zero(2, 16), Mat::Zero(2, 16)};
  const LossBreakdown perfect = ElboLoss(mel, lin, mel, lin, zero, 0.001);
  EXPECT_EQ(perfect.total, 0.0);
  const Mat mel1 = (mel.array() + 1).matrix(), lin1 = (lin.array() + 1).matrix();
  const LossBreakdown off = ElboLoss(mel1, lin1, mel, lin, zero, 0.001);
  EXPECT_NEAR(off.l1_mel, 1.0, 1e-12);
  EXPECT_NEAR(off.l1_linear, 1.0, 1e-12);
  EXPECT_NEAR(off.total, 2.0, 1e-12);
}

TEST(ElboTest, TotalCombinesTermsAndLambdaZeroIgnoresPosterior) {
  std::mt19937_64 rng(9);
  const Mat pm = RandomMat(8, 80, rng), gm = RandomMat(8, 80, rng);
  const Mat pl = RandomMat(8, 321, rng).cwiseAbs(), gl = RandomMat(8, 321, rng).cwiseAbs();
  const content::ContentPosterior a{RandomMat(2, 16, rng), RandomMat(2, 16, rng)};
  const content::ContentPosterior b{RandomMat(2, 16, rng, 3.0), RandomMat(2, 16, rng)};
  const LossBreakdown la = ElboLoss(pm, pl, gm, gl, a, 0.001);
  EXPECT_NEAR(la.total, la.l1_mel + la.l1_linear + 0.001 * la.kl, 1e-12);
  EXPECT_NEAR(la.kl, content::KlToStandardNormal(a), 1e-12);
  EXPECT_EQ(ElboLoss(pm, pl, gm, gl, a, 0.0).total, ElboLoss(pm, pl, gm, gl, b, 0.0).total);
  EXPECT_NE(ElboLoss(pm, pl, gm, gl, a, 0.001).total, ElboLoss(pm, pl, gm, gl, b, 0.001).total);
  EXPECT_THROW(ElboLoss(pm, pl, gm.topRows(7), gl, a, 0.001), ShapeError);
}

TEST(ElboTest, GradientThroughDecoderAndPostnet) {
  const ConformerDecoder dec(DecoderConfig::Toy(), 11);
  const Postnet post(PostnetConfig::Toy(), 12);
  std::mt19937_64 rng(10);
  const Mat eps = RandomMat(6, 16, rng);
  const Mat gm = RandomMat(24, 80, rng), gl = RandomMat(24, 321, rng).cwiseAbs();
  const Var mu = Var::Leaf(RandomMat(6, 16, rng)), lv = Var::Leaf(RandomMat(6, 16, rng, 0.3));
  const Var spk = Var::Leaf(RandomMat(1, 16, rng).cwiseAbs());
  auto f = [&]() {
    const Var z = content::Reparameterize(mu, lv, eps);
    const Var mel = dec.Forward(nn::RepeatRows(z, 4), spk);
    // Eval-mode batch norm keeps the objective a fixed function of the weights.
    const Var lin = post.Forward(mel, {24}, false);
    return ElboLoss(mel, lin, gm, gl, mu, lv, 0.001).total;
  };
  // Ten decoder entries, then the posterior and speaker inputs.
  const auto dec_res = testing::CheckSampledGradients(f, dec.params().Trainable(), 10, 13, 1e-6);
  EXPECT_LT(dec_res.max_rel_error, 1e-3) << dec_res.max_abs_error;
  const auto in_res = testing::CheckSampledGradients(f, {mu, lv, spk}, 20, 14, 1e-6);
  EXPECT_LT(in_res.max_rel_error, 1e-3) << in_res.max_abs_error;
}

class CountingMedia : public MediaSource {
 public:
  CountingMedia(corpus::VideoClip clip, dsp::Waveform wave)
      : clip_(std::move(clip)), wave_(std::move(wave)) {}
  corpus::VideoClip Video() const override {
    ++video_reads;
    return clip_;
  }
  dsp::Waveform Audio() const override {
    ++audio_reads;
    return wave_;
  }
  mutable int video_reads = 0;
  mutable int audio_reads = 0;

 private:
  corpus::VideoClip clip_;
  dsp::Waveform wave_;
};

class SynthesizeTest : public ::testing::Test {
 protected:
  SynthesizeTest() : ids_(identity::IdentityConfig::Toy(), 1), model_(ModelConfig::Toy(), 2) {
    const corpus::SyntheticSpeaker spk = corpus::MakeSpeaker(3, corpus::Gender::kFemale);
    const corpus::Utterance utt{{1, 4, 2}, 8};
    media_ = std::make_unique<CountingMedia>(corpus::RenderVideo(spk, utt),
                                             corpus::RenderAudio(spk, utt, dsp_));
  }

  dsp::DspConfig dsp_;
  IdentityModel ids_;
  Lip2SpeechModel model_;
  std::unique_ptr<CountingMedia> media_;
};

TEST_F(SynthesizeTest, FaceModeNeverReadsAudio) {
  const dsp::Waveform w =
      SynthesizeItem(*media_, identity::Source::kFace, nullptr, ids_, model_, dsp_, 5, 0);
  EXPECT_EQ(media_->audio_reads, 0);
  EXPECT_EQ(media_->video_reads, 1);
  EXPECT_FALSE(w.samples.empty());
}

TEST_F(SynthesizeTest, SpeechModeReadsReferenceAudio) {
  CountingMedia reference(media_->Video(), media_->Audio());
  SynthesizeItem(*media_, identity::Source::kSpeech, &reference, ids_, model_, dsp_, 5, 0);
  EXPECT_EQ(reference.audio_reads, 1);
  EXPECT_EQ(media_->audio_reads, 1);  // the one read above, none during synthesis
  SynthesizeItem(*media_, identity::Source::kSpeech, nullptr, ids_, model_, dsp_, 5, 0);
  EXPECT_EQ(media_->audio_reads, 2);
}

TEST_F(SynthesizeTest, DurationFollowsFrameCount) {
  const dsp::Waveform w =
      SynthesizeItem(*media_, identity::Source::kFace, nullptr, ids_, model_, dsp_, 5, 0);
  EXPECT_NEAR(w.DurationSec(), 24.0 / 25.0, 0.010);
  EXPECT_EQ(w.samples.size(), 24u * 4 * dsp_.hop_length);
}

TEST_F(SynthesizeTest, PayloadMustMatchMode) {
  SpeakerSource s = SpeakerSource::Face(corpus::FirstFrame(media_->Video()));
  s.mode = identity::Source::kSpeech;
  EXPECT_THROW(Synthesize(media_->Video(), s, ids_, model_, dsp_, 5, 0), ShapeError);
}

TEST_F(SynthesizeTest, UsesPosteriorMeanDeterministically) {
  const corpus::VideoClip clip = media_->Video();
  const identity::SpeakerEmbedding e = ids_.face.Embed(corpus::FirstFrame(clip));
  const Prediction a = PredictSpectrograms(clip, e, model_, dsp_);
  const Prediction b = PredictSpectrograms(clip, e, model_, dsp_);
  EXPECT_EQ(a.mel, b.mel);
  EXPECT_EQ(a.linear.rows(), 96);
  EXPECT_EQ(a.linear.cols(), 321);
}

TEST_F(SynthesizeTest, CheckpointRoundTrip) {
  const std::string dir = ::testing::TempDir() + "/l2s_synth_ckpt";
  std::filesystem::create_directories(dir);
  model_.Save(dir + "/l2s.ckpt");
  ids_.Save(dir + "/ids.ckpt");
  const auto model = Lip2SpeechModel::Load(dir + "/l2s.ckpt");
  const auto ids = IdentityModel::Load(dir + "/ids.ckpt");
  EXPECT_TRUE(ids->speech.frozen());
  // Stored as float32: a second save/load cycle is exact.
  model->Save(dir + "/l2s2.ckpt");
  EXPECT_EQ(Lip2SpeechModel::Load(dir + "/l2s2.ckpt")->Checksum(), model->Checksum());
  const corpus::VideoClip clip = media_->Video();
  const Prediction a =
      PredictSpectrograms(clip, ids_.face.Embed(corpus::FirstFrame(clip)), model_, dsp_);
  const Prediction b =
      PredictSpectrograms(clip, ids->face.Embed(corpus::FirstFrame(clip)), *model, dsp_);
  EXPECT_LE((a.mel - b.mel).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_THROW(Lip2SpeechModel::Load(dir + "/ids.ckpt"), IoError);
  EXPECT_THROW(IdentityModel::Load(dir + "/missing.ckpt"), IoError);
}

TEST(ModelConfigTest, SharedDimensionsAreChecked) {
  ModelConfig c = ModelConfig::Toy();
  c.decoder.latent_dim = 8;
  EXPECT_THROW(c.Validate(), ConfigError);
  EXPECT_NO_THROW(ModelConfig::Paper().Validate());
  EXPECT_EQ(ModelConfig::FromJson(ModelConfig::Paper().ToJson()).ToJson(),
            ModelConfig::Paper().ToJson());
}

}  // namespace
}  // namespace l2s::synthesis
