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

#include "l2s/synthesis/trainers.h"

#include <cmath>
#include <numeric>

#include "l2s/base/error.h"
#include "l2s/base/random.h"
#include "l2s/dsp/align.h"
#include "l2s/nn/adam.h"
#include "l2s/nn/ops.h"

namespace l2s::synthesis {

using nlohmann::json;
using nn::Var;

void SpeakerPretrainConfig::Validate() const {
  Require<ConfigError>(steps >= 0, "stage0.steps must be >= 0");
  Require<ConfigError>(batch_size >= 1, "stage0.batch_size must be >= 1");
  Require<ConfigError>(lr > 0, "stage0.lr must be positive");
  Require<ConfigError>(clip_norm >= 0, "stage0.clip_norm must be >= 0");
}

json SpeakerPretrainConfig::ToJson() const {
  return json{{"steps", steps}, {"batch_size", batch_size}, {"lr", lr}, {"clip_norm", clip_norm}};
}

SpeakerPretrainConfig SpeakerPretrainConfig::FromJson(const json& j) {
  SpeakerPretrainConfig c;
  c.steps = j.at("steps").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.lr = j.at("lr").get<double>();
  c.clip_norm = j.at("clip_norm").get<double>();
  return c;
}

void CrossmodalTrainConfig::Validate() const {
  Require<ConfigError>(steps >= 0, "stage1.steps must be >= 0");
  Require<ConfigError>(batch_size >= 2, "stage1.batch_size must be >= 2");
  Require<ConfigError>(lr > 0, "stage1.lr must be positive");
  Require<ConfigError>(clip_norm >= 0, "stage1.clip_norm must be >= 0");
  weights.Validate();
}

json CrossmodalTrainConfig::ToJson() const {
  return json{{"steps", steps},         {"batch_size", batch_size},
              {"lr", lr},               {"clip_norm", clip_norm},
              {"w_cs", weights.w_cs},   {"w_gc", weights.w_gc},
              {"w_ce", weights.w_ce},   {"gc_unit_norm", weights.gc_unit_norm},
              {"augment_faces", augment_faces}};
}

CrossmodalTrainConfig CrossmodalTrainConfig::FromJson(const json& j) {
  CrossmodalTrainConfig c;
  c.steps = j.at("steps").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.lr = j.at("lr").get<double>();
  c.clip_norm = j.at("clip_norm").get<double>();
  c.weights.w_cs = j.at("w_cs").get<double>();
  c.weights.w_gc = j.at("w_gc").get<double>();
  c.weights.w_ce = j.at("w_ce").get<double>();
  c.weights.gc_unit_norm = j.at("gc_unit_norm").get<bool>();
  c.augment_faces = j.at("augment_faces").get<bool>();
  return c;
}

void Lip2SpeechTrainConfig::Validate() const {
  Require<ConfigError>(steps >= 0, "stage2.steps must be >= 0");
  Require<ConfigError>(batch_size >= 1, "stage2.batch_size must be >= 1");
  Require<ConfigError>(lr > 0, "stage2.lr must be positive");
  Require<ConfigError>(clip_norm >= 0, "stage2.clip_norm must be >= 0");
  Require<ConfigError>(kl_weight >= 0, "stage2.kl_weight must be >= 0");
}

json Lip2SpeechTrainConfig::ToJson() const {
  return json{{"steps", steps},
              {"batch_size", batch_size},
              {"lr", lr},
              {"clip_norm", clip_norm},
              {"kl_weight", kl_weight}};
}

Lip2SpeechTrainConfig Lip2SpeechTrainConfig::FromJson(const json& j) {
  Lip2SpeechTrainConfig c;
  c.steps = j.at("steps").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.lr = j.at("lr").get<double>();
  c.clip_norm = j.at("clip_norm").get<double>();
  c.kl_weight = j.at("kl_weight").get<double>();
  return c;
}

namespace {

// Epoch-wise shuffled minibatches.
class BatchSampler {
 public:
  BatchSampler(int n, uint64_t seed) : n_(n), seed_(seed) {
    Require(n >= 2, "training needs at least 2 items, got ", n);
  }

  std::vector<int> Next(int batch) {
    std::vector<int> out;
    while (static_cast<int>(out.size()) < batch) {
      if (pos_ == static_cast<int>(perm_.size())) {
        perm_ = crossmodal::ShufflePermutation(n_, HashSeeds({seed_, epoch_++}));
        pos_ = 0;
      }
      out.push_back(perm_[pos_++]);
    }
    return out;
  }

 private:
  int n_;
  uint64_t seed_;
  uint64_t epoch_ = 0;
  std::vector<int> perm_;
  int pos_ = 0;
};

dsp::MelSpectrogram ItemMel(const corpus::Corpus& corpus, const corpus::CorpusItem& item) {
  return dsp::ExtractTargets(corpus::LoadAudio(corpus, item), item.utterance.NumFrames(),
                             corpus.cfg.dsp)
      .mel;
}

void CheckLabels(const std::vector<const corpus::CorpusItem*>& items, int n_classes) {
  for (const auto* it : items) {
    Require(it->speaker_id >= 0 && it->speaker_id < n_classes, "item ", it->id,
            " has speaker id ", it->speaker_id, " outside the ", n_classes,
            " training classes");
  }
}

nn::AdamConfig MakeAdam(double lr, double clip) {
  nn::AdamConfig a;
  a.lr = lr;
  a.clip_norm = clip;
  return a;
}

}  // namespace

corpus::FaceImage AugmentedFace(const corpus::SyntheticSpeaker& spk, int token, uint64_t seed) {
  corpus::SyntheticSpeaker s = spk;
  s.face_seed = seed;
  corpus::FaceImage face = corpus::RenderFace(s);
  const Mat lips = corpus::LipGlyph(token);
  face.pixels.bottomRows(lips.rows()) = lips;
  return face;
}

SpeakerPretrainReport PretrainSpeechEncoder(const corpus::Corpus& corpus,
                                            const std::vector<const corpus::CorpusItem*>& items,
                                            IdentityModel& model,
                                            const SpeakerPretrainConfig& cfg, uint64_t seed,
                                            const StepLogger& log) {
  cfg.Validate();
  identity::SpeechEncoder& enc = model.speech;
  CheckLabels(items, enc.config().n_train_speakers);
  std::vector<dsp::MelSpectrogram> mels;
  for (const auto* it : items) mels.push_back(ItemMel(corpus, *it));

  nn::Adam opt(enc.TrainableParams(), MakeAdam(cfg.lr, cfg.clip_norm));
  BatchSampler sampler(static_cast<int>(items.size()), HashSeeds({seed, 0x50}));
  SpeakerPretrainReport report;
  for (int step = 0; step < cfg.steps; ++step) {
    std::vector<Var> emb;
    std::vector<int> labels;
    for (int i : sampler.Next(cfg.batch_size)) {
      emb.push_back(enc.Forward(mels[i]));
      labels.push_back(items[i]->speaker_id);
    }
    const Var loss = nn::CrossEntropy(enc.Classify(nn::ConcatRows(emb)), labels);
    nn::Backward(loss);
    const double gnorm = opt.Step();
    report.losses.push_back(loss.scalar());
    if (log) log(json{{"stage", 0}, {"step", step}, {"ce", loss.scalar()}, {"grad_norm", gnorm}});
  }
  int correct = 0;
  for (size_t i = 0; i < items.size(); ++i) {
    const RowVec logits = enc.Classify(Var::Constant(enc.Embed(mels[i]).vec)).value();
    Index best;
    logits.maxCoeff(&best);
    correct += best == items[i]->speaker_id;
  }
  report.train_accuracy = static_cast<double>(correct) / static_cast<double>(items.size());
  return report;
}

CrossmodalTrainReport TrainFaceEncoder(const corpus::Corpus& corpus,
                                       const std::vector<const corpus::CorpusItem*>& items,
                                       IdentityModel& model, const CrossmodalTrainConfig& cfg,
                                       uint64_t seed, const StepLogger& log) {
  cfg.Validate();
  model.speech.Freeze();
  CheckLabels(items, model.face.config().n_train_speakers);
  CrossmodalTrainReport report;
  report.speech_checksum_before = model.speech.params().Checksum();

  Mat sse(static_cast<Index>(items.size()), model.speech.config().embed_dim);
  std::vector<corpus::FaceImage> plain_faces;
  for (size_t i = 0; i < items.size(); ++i) {
    sse.row(static_cast<Index>(i)) = model.speech.Embed(ItemMel(corpus, *items[i])).vec;
    if (!cfg.augment_faces) plain_faces.push_back(corpus::LoadFace(corpus, items[i]->speaker_id));
  }

  nn::Adam opt(model.face.params().Trainable(), MakeAdam(cfg.lr, cfg.clip_norm));
  BatchSampler sampler(static_cast<int>(items.size()), HashSeeds({seed, 0x51}));
  const int vocab = corpus.cfg.vocab_size;
  for (int step = 0; step < cfg.steps; ++step) {
    crossmodal::PairBatch batch;
    const std::vector<int> idx = sampler.Next(cfg.batch_size);
    batch.sse.resize(static_cast<Index>(idx.size()), sse.cols());
    for (size_t b = 0; b < idx.size(); ++b) {
      const corpus::CorpusItem& it = *items[idx[b]];
      if (cfg.augment_faces) {
        Rng rng(HashSeeds({seed, 0xa6, static_cast<uint64_t>(step), b}));
        const int token = static_cast<int>(rng() % static_cast<uint64_t>(vocab + 1)) - 1;
        batch.faces.push_back(AugmentedFace(corpus.Speaker(it.speaker_id), token, rng()));
      } else {
        batch.faces.push_back(plain_faces[idx[b]]);
      }
      batch.sse.row(static_cast<Index>(b)) = sse.row(idx[b]);
      batch.speaker_ids.push_back(it.speaker_id);
      batch.genders.push_back(it.gender);
    }
    const crossmodal::StepLoss l =
        crossmodal::CrossmodalStep(batch, model.face, model.speech, cfg.weights, &opt,
                                   HashSeeds({seed, 0x52, static_cast<uint64_t>(step)}));
    report.steps.push_back(l);
    report.gc_drops += l.gc_dropped;
    if (log) {
      log(json{{"stage", 1},         {"step", step},
               {"cs", l.cs},         {"gc", l.gc},
               {"ce", l.ce},         {"total", l.total},
               {"gc_dropped", l.gc_dropped}, {"gc_drops", report.gc_drops},
               {"grad_norm", l.grad_norm}});
    }
  }
  report.speech_checksum_after = model.speech.params().Checksum();
  return report;
}

namespace {

struct Stage2Item {
  corpus::VideoClip clip;
  Mat mel, linear;
  RowVec fse;
};

}  // namespace

Lip2SpeechTrainReport TrainLip2Speech(const corpus::Corpus& corpus,
                                      const std::vector<const corpus::CorpusItem*>& items,
                                      const IdentityModel& ids, Lip2SpeechModel& model,
                                      const Lip2SpeechTrainConfig& cfg, uint64_t seed,
                                      const StepLogger& log) {
  cfg.Validate();
  const dsp::DspConfig& dsp = corpus.cfg.dsp;
  const int alpha = dsp.Alpha();
  Lip2SpeechTrainReport report;
  report.face_checksum_before = ids.face.params().Checksum();

  std::vector<Stage2Item> data;
  data.reserve(items.size());
  for (const auto* it : items) {
    Stage2Item d;
    d.clip = corpus::LoadVideo(corpus, *it);
    const dsp::SpectrogramPair t = dsp::ExtractTargets(corpus::LoadAudio(corpus, *it),
                                                       static_cast<int>(d.clip.NumFrames()), dsp);
    d.mel = t.mel.frames;
    d.linear = t.linear.frames;
    // The decoder only ever sees face-derived identity during training.
    const identity::SpeakerEmbedding e = ids.face.Embed(corpus::FirstFrame(d.clip));
    Require(e.source == identity::Source::kFace, "stage-2 speaker embedding must come from a face");
    d.fse = e.vec;
    data.push_back(std::move(d));
  }

  std::vector<Var> params = model.content.params().Trainable();
  for (const auto* ps : {&model.projection.params(), &model.decoder.params(),
                         &model.postnet.params()}) {
    for (const Var& v : ps->Trainable()) params.push_back(v);
  }
  nn::Adam opt(params, MakeAdam(cfg.lr, cfg.clip_norm));
  BatchSampler sampler(static_cast<int>(data.size()), HashSeeds({seed, 0x53}));

  for (int step = 0; step < cfg.steps; ++step) {
    const std::vector<int> idx = sampler.Next(cfg.batch_size);
    std::vector<Var> mels, mus, logvars;
    std::vector<Index> lengths;
    Mat gt_mel, gt_lin;
    std::vector<const Mat*> gm, gl;
    for (size_t b = 0; b < idx.size(); ++b) {
      const Stage2Item& d = data[idx[b]];
      const content::ContentEncoder::Output post = model.content.Forward(d.clip);
      const Mat eps = content::StandardNormal(
          post.mu.rows(), post.mu.cols(),
          HashSeeds({seed, 0xe5, static_cast<uint64_t>(step), b}));
      const Var z = content::Reparameterize(post.mu, post.logvar, eps);
      const Var spk = model.projection.Forward(Var::Constant(d.fse));
      mels.push_back(model.decoder.Forward(nn::RepeatRows(z, alpha), spk));
      mus.push_back(post.mu);
      logvars.push_back(post.logvar);
      lengths.push_back(mels.back().rows());
      gm.push_back(&d.mel);
      gl.push_back(&d.linear);
    }
    const Index total_rows = std::accumulate(lengths.begin(), lengths.end(), Index{0});
    gt_mel.resize(total_rows, gm[0]->cols());
    gt_lin.resize(total_rows, gl[0]->cols());
    Index r = 0;
    for (size_t b = 0; b < gm.size(); ++b) {
      gt_mel.middleRows(r, lengths[b]) = *gm[b];
      gt_lin.middleRows(r, lengths[b]) = *gl[b];
      r += lengths[b];
    }
    const Var mel = nn::ConcatRows(mels);
    const Var lin = model.postnet.Forward(mel, lengths, true);
    const ElboTerms loss = ElboLoss(mel, lin, gt_mel, gt_lin, nn::ConcatRows(mus),
                                    nn::ConcatRows(logvars), cfg.kl_weight);
    nn::Backward(loss.total);
    const double gnorm = opt.Step();
    report.steps.push_back(loss.breakdown);
    if (log) {
      json j = loss.breakdown.ToJson();
      j["stage"] = 2;
      j["step"] = step;
      j["grad_norm"] = gnorm;
      log(j);
    }
  }
  report.face_checksum_after = ids.face.params().Checksum();
  return report;
}

}  // namespace l2s::synthesis
