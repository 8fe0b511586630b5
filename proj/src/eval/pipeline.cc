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

#include "l2s/eval/pipeline.h"

#include <filesystem>

#include "l2s/base/error.h"
#include "l2s/base/random.h"
#include "l2s/dsp/align.h"

namespace l2s::eval {

using nlohmann::json;

json VerificationReport::ToJson() const {
  return json{{"eer", eer},
              {"mean_matched_cosine", mean_matched_cosine},
              {"mean_mismatched_cosine", mean_mismatched_cosine},
              {"n_genuine", n_genuine},
              {"n_impostor", n_impostor}};
}

VerificationReport EvaluateVerification(const corpus::Corpus& corpus, const ItemList& items,
                                        const synthesis::IdentityModel& ids) {
  Require(!items.empty(), "verification: no items");
  VerificationReport r;
  for (const auto* it : items) {
    if (std::find(r.fse_speakers.begin(), r.fse_speakers.end(), it->speaker_id) ==
        r.fse_speakers.end()) {
      r.fse_speakers.push_back(it->speaker_id);
    }
  }
  std::sort(r.fse_speakers.begin(), r.fse_speakers.end());
  Require(r.fse_speakers.size() >= 2, "verification: need at least 2 speakers");
  const Index d = ids.face.config().embed_dim;
  r.fse.resize(static_cast<Index>(r.fse_speakers.size()), d);
  for (size_t s = 0; s < r.fse_speakers.size(); ++s) {
    r.fse.row(static_cast<Index>(s)) =
        ids.face.Embed(corpus::LoadFace(corpus, r.fse_speakers[s])).vec;
  }
  r.sse.resize(static_cast<Index>(items.size()), d);
  ScoreSet scores;
  double matched = 0, mismatched = 0;
  for (size_t i = 0; i < items.size(); ++i) {
    const corpus::CorpusItem& it = *items[i];
    const dsp::MelSpectrogram mel =
        dsp::ExtractTargets(corpus::LoadAudio(corpus, it), it.utterance.NumFrames(),
                            corpus.cfg.dsp)
            .mel;
    const RowVec sse = ids.speech.Embed(mel).vec;
    r.sse.row(static_cast<Index>(i)) = sse;
    for (size_t s = 0; s < r.fse_speakers.size(); ++s) {
      const double c = CosineSimilarity(r.fse.row(static_cast<Index>(s)), sse);
      if (r.fse_speakers[s] == it.speaker_id) {
        scores.genuine.push_back(c);
        matched += c;
      } else {
        scores.impostor.push_back(c);
        mismatched += c;
      }
    }
  }
  r.eer = ComputeEer(scores);
  r.n_genuine = static_cast<int>(scores.genuine.size());
  r.n_impostor = static_cast<int>(scores.impostor.size());
  r.mean_matched_cosine = matched / r.n_genuine;
  r.mean_mismatched_cosine = mismatched / r.n_impostor;
  return r;
}

ProbeInputs CollectLatents(const corpus::Corpus& corpus, const ItemList& items,
                           const synthesis::Lip2SpeechModel& model, uint64_t seed) {
  ProbeInputs in;
  for (const auto* it : items) {
    const content::ContentPosterior post =
        model.content.Encode(corpus::LoadVideo(corpus, *it));
    in.latents.push_back(
        content::SampleLatent(post, HashSeeds({seed, 0x9b, corpus::ItemSeed(0, it->speaker_id,
                                                                           it->utterance_index)}))
            .z);
    in.speaker_ids.push_back(it->speaker_id);
    in.genders.push_back(it->gender);
  }
  return in;
}

GenderMatchReport EvaluateGenderMatch(const corpus::Corpus& corpus, const ItemList& items,
                                      const synthesis::IdentityModel& ids,
                                      const synthesis::Lip2SpeechModel& model, int gl_iters,
                                      uint64_t seed) {
  std::vector<GenderItem> synth;
  for (const auto* it : items) {
    const synthesis::CorpusMedia media(corpus, *it);
    synth.push_back(GenderItem{
        synthesis::SynthesizeItem(media, identity::Source::kFace, nullptr, ids, model,
                                  corpus.cfg.dsp, gl_iters, HashSeeds({seed, 0x61})),
        it->gender});
  }
  return GenderMatchRate(synth);
}

double MeanL1Mel(const corpus::Corpus& corpus, const ItemList& items,
                 const synthesis::IdentityModel& ids, const synthesis::Lip2SpeechModel& model) {
  Require(!items.empty(), "l1_mel: no items");
  double sum = 0;
  Index cells = 0;
  for (const auto* it : items) {
    const corpus::VideoClip clip = corpus::LoadVideo(corpus, *it);
    const Mat gt = dsp::ExtractTargets(corpus::LoadAudio(corpus, *it),
                                       static_cast<int>(clip.NumFrames()), corpus.cfg.dsp)
                       .mel.frames;
    const synthesis::Prediction p = synthesis::PredictSpectrograms(
        clip, ids.face.Embed(corpus::FirstFrame(clip)), model, corpus.cfg.dsp);
    sum += (p.mel - gt).cwiseAbs().sum();
    cells += gt.size();
  }
  return sum / static_cast<double>(cells);
}

json EvalReport::ToJson() const {
  return json{{"eer_unseen", verification.eer},
              {"verification", verification.ToJson()},
              {"probe_accuracy", probe.accuracy},
              {"probe_chance", probe.chance},
              {"probe_n_items", probe.n_items},
              {"probe_n_test", probe.n_test},
              {"gender_match_rate", gender.rate},
              {"gender_n_reliable", gender.n_reliable},
              {"gender_n_items", gender.n_items},
              {"l1_mel", l1_mel_seen_test}};
}

EvalReport Evaluate(const corpus::Corpus& corpus, const synthesis::IdentityModel& ids,
                    const synthesis::Lip2SpeechModel& model, const EvalOptions& opts) {
  const ItemList unseen = corpus.ItemsIn(corpus::Split::kUnseen);
  const ItemList seen_test = corpus.ItemsIn(corpus::Split::kTest);
  EvalReport r;
  r.verification = EvaluateVerification(corpus, unseen, ids);
  const ProbeInputs latents = CollectLatents(corpus, unseen, model, opts.seed);
  r.probe = SpeakerProbe(latents.latents, latents.speaker_ids, opts.seed, opts.probe);
  r.gender = EvaluateGenderMatch(corpus, unseen, ids, model, opts.gl_iters, opts.seed);
  r.l1_mel_seen_test = MeanL1Mel(corpus, seen_test, ids, model);

  if (!opts.scatter_dir.empty()) {
    std::filesystem::create_directories(opts.scatter_dir);
    Mat pooled(static_cast<Index>(latents.latents.size()), latents.latents[0].cols());
    for (size_t i = 0; i < latents.latents.size(); ++i) {
      pooled.row(static_cast<Index>(i)) = latents.latents[i].colwise().mean();
    }
    ExportScatter(pooled, latents.speaker_ids, latents.genders,
                  opts.scatter_dir + "/content_latents.csv");
    std::vector<int> sse_ids;
    for (const auto* it : unseen) sse_ids.push_back(it->speaker_id);
    ExportScatter(r.verification.sse, sse_ids, latents.genders,
                  opts.scatter_dir + "/speech_embeddings.csv");
  }
  return r;
}

}  // namespace l2s::eval
