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
#include <numeric>

#include "l2s/base/error.h"
#include "l2s/corpus/corpus.h"
#include "l2s/synthesis/trainers.h"

namespace l2s::synthesis {
namespace {

constexpr int kSpeakers = 4;

class TrainersTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    corpus::CorpusConfig cfg;
    cfg.n_seen_speakers = kSpeakers;
    cfg.n_unseen_speakers = 2;
    cfg.utterances_per_speaker = 6;
    cfg.max_tokens = 3;
    const std::string dir = ::testing::TempDir() + "/l2s_trainers_corpus";
    std::filesystem::remove_all(dir);
    corpus_ = new corpus::Corpus(corpus::MakeCorpus(cfg, 5, dir));
  }
  static void TearDownTestSuite() {
    delete corpus_;
    corpus_ = nullptr;
  }

  static identity::IdentityConfig SmallIdentity() {
    identity::IdentityConfig c = identity::IdentityConfig::Toy();
    c.n_train_speakers = kSpeakers;
    return c;
  }
  static ModelConfig SmallModel() {
    ModelConfig c = ModelConfig::Toy();
    c.identity = SmallIdentity();
    return c;
  }
  std::vector<const corpus::CorpusItem*> Train() const {
    return corpus_->ItemsIn(corpus::Split::kTrain);
  }

  static corpus::Corpus* corpus_;
};

corpus::Corpus* TrainersTest::corpus_ = nullptr;

double Mean(const std::vector<double>& v, size_t from, size_t to) {
  return std::accumulate(v.begin() + from, v.begin() + to, 0.0) / static_cast<double>(to - from);
}

TEST_F(TrainersTest, SpeakerPretrainingLowersLoss) {
  IdentityModel ids(SmallIdentity(), 1);
  SpeakerPretrainConfig cfg;
  cfg.steps = 40;
  cfg.batch_size = 8;
  int logged = 0;
  const SpeakerPretrainReport r =
      PretrainSpeechEncoder(*corpus_, Train(), ids, cfg, 2, [&](const nlohmann::json& j) {
        EXPECT_EQ(j.at("stage"), 0);
        ++logged;
      });
  EXPECT_EQ(logged, 40);
  EXPECT_LT(Mean(r.losses, 30, 40), Mean(r.losses, 0, 10));
  EXPECT_GT(r.train_accuracy, 1.0 / kSpeakers);
}

TEST_F(TrainersTest, SpeakerLabelsMustFitClassifier) {
  identity::IdentityConfig c = SmallIdentity();
  c.n_train_speakers = 2;
  IdentityModel ids(c, 1);
  SpeakerPretrainConfig cfg;
  cfg.steps = 1;
  EXPECT_THROW(PretrainSpeechEncoder(*corpus_, Train(), ids, cfg, 2), ShapeError);
}

TEST_F(TrainersTest, CrossmodalTrainingKeepsSpeechEncoderFixed) {
  IdentityModel ids(SmallIdentity(), 1);
  CrossmodalTrainConfig cfg;
  cfg.steps = 30;
  cfg.batch_size = 8;
  const std::string face_before = ids.face.params().Checksum();
  const CrossmodalTrainReport r = TrainFaceEncoder(*corpus_, Train(), ids, cfg, 3);
  EXPECT_TRUE(ids.speech.frozen());
  EXPECT_EQ(r.speech_checksum_before, r.speech_checksum_after);
  EXPECT_EQ(r.speech_checksum_after, ids.speech.params().Checksum());
  EXPECT_NE(face_before, ids.face.params().Checksum());
  ASSERT_EQ(r.steps.size(), 30u);
  EXPECT_LT(r.steps.back().cs, r.steps.front().cs);
}

TEST_F(TrainersTest, CrossmodalTrainingIsDeterministic) {
  CrossmodalTrainConfig cfg;
  cfg.steps = 5;
  cfg.batch_size = 8;
  IdentityModel a(SmallIdentity(), 1), b(SmallIdentity(), 1);
  const CrossmodalTrainReport ra = TrainFaceEncoder(*corpus_, Train(), a, cfg, 3);
  const CrossmodalTrainReport rb = TrainFaceEncoder(*corpus_, Train(), b, cfg, 3);
  for (size_t i = 0; i < ra.steps.size(); ++i) EXPECT_EQ(ra.steps[i].total, rb.steps[i].total);
  EXPECT_EQ(a.face.params().Checksum(), b.face.params().Checksum());
}

TEST_F(TrainersTest, Lip2SpeechTrainingKeepsIdentityFixed) {
  IdentityModel ids(SmallIdentity(), 1);
  ids.speech.Freeze();
  Lip2SpeechModel model(SmallModel(), 4);
  Lip2SpeechTrainConfig cfg;
  cfg.steps = 3;
  cfg.batch_size = 4;
  const std::string speech = ids.speech.params().Checksum();
  const std::string before = model.Checksum();
  const Lip2SpeechTrainReport r = TrainLip2Speech(*corpus_, Train(), ids, model, cfg, 5);
  EXPECT_EQ(r.face_checksum_before, r.face_checksum_after);
  EXPECT_EQ(r.face_checksum_after, ids.face.params().Checksum());
  EXPECT_EQ(speech, ids.speech.params().Checksum());
  EXPECT_NE(before, model.Checksum());
  for (const LossBreakdown& l : r.steps) {
    EXPECT_NEAR(l.total, l.l1_mel + l.l1_linear + 0.001 * l.kl, 1e-9);
  }
}

TEST_F(TrainersTest, Lip2SpeechOverfitsSmallSet) {
  IdentityModel ids(SmallIdentity(), 1);
  ids.speech.Freeze();
  Lip2SpeechModel model(SmallModel(), 4);
  std::vector<const corpus::CorpusItem*> items = Train();
  items.resize(8);
  Lip2SpeechTrainConfig cfg;
  cfg.steps = 200;
  cfg.batch_size = 8;
  const Lip2SpeechTrainReport r = TrainLip2Speech(*corpus_, items, ids, model, cfg, 6);
  EXPECT_LT(r.steps.back().total, 0.3 * r.steps.front().total)
      << r.steps.front().total << " -> " << r.steps.back().total;
}

TEST_F(TrainersTest, KlWeightZeroDropsKlFromTotal) {
  IdentityModel ids(SmallIdentity(), 1);
  ids.speech.Freeze();
  Lip2SpeechModel model(SmallModel(), 4);
  Lip2SpeechTrainConfig cfg;
  cfg.steps = 2;
  cfg.batch_size = 2;
  cfg.kl_weight = 0.0;
  const Lip2SpeechTrainReport r = TrainLip2Speech(*corpus_, Train(), ids, model, cfg, 5);
  for (const LossBreakdown& l : r.steps) {
    EXPECT_EQ(l.lambda, 0.0);
    EXPECT_NEAR(l.total, l.l1_mel + l.l1_linear, 1e-12);
  }
}

TEST(TrainConfigTest, ValidationNamesField) {
  Lip2SpeechTrainConfig c;
  c.kl_weight = -1;
  try {
    c.Validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("stage2.kl_weight"), std::string::npos);
  }
  CrossmodalTrainConfig x;
  x.weights.w_gc = 0.25;
  EXPECT_EQ(CrossmodalTrainConfig::FromJson(x.ToJson()).ToJson(), x.ToJson());
}

}  // namespace
}  // namespace l2s::synthesis
