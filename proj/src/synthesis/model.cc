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

#include "l2s/synthesis/model.h"

#include "l2s/base/error.h"
#include "l2s/base/hash.h"
#include "l2s/base/random.h"
#include "l2s/dsp/griffin_lim.h"
#include "l2s/dsp/mel.h"
#include "l2s/dsp/stft.h"
#include "l2s/io/checkpoint.h"
#include "l2s/nn/ops.h"

namespace l2s::synthesis {

using identity::Source;
using identity::SpeakerEmbedding;
using nlohmann::json;
using nn::Var;

ModelConfig ModelConfig::Toy() {
  ModelConfig c;
  c.content = content::ContentEncoderConfig::Toy();
  c.identity = identity::IdentityConfig::Toy();
  c.decoder = DecoderConfig::Toy();
  c.postnet = PostnetConfig::Toy();
  return c;
}

ModelConfig ModelConfig::Paper() {
  ModelConfig c;
  c.content = content::ContentEncoderConfig::Paper();
  c.identity = identity::IdentityConfig::Paper();
  c.decoder = DecoderConfig::Paper();
  c.postnet = PostnetConfig::Paper();
  return c;
}

void ModelConfig::Validate() const {
  content.Validate();
  identity.Validate();
  decoder.Validate();
  postnet.Validate();
  Require<ConfigError>(decoder.latent_dim == content.latent_dim,
                       "decoder.latent_dim must equal content.latent_dim");
  Require<ConfigError>(decoder.speaker_dim == identity.proj_dim,
                       "decoder.speaker_dim must equal identity.proj_dim");
  Require<ConfigError>(decoder.n_mels == postnet.n_mels && identity.n_mels == postnet.n_mels,
                       "decoder.n_mels, postnet.n_mels and identity.n_mels must agree");
}

json ModelConfig::ToJson() const {
  return json{{"content", content.ToJson()},
              {"identity", identity.ToJson()},
              {"decoder", decoder.ToJson()},
              {"postnet", postnet.ToJson()}};
}

ModelConfig ModelConfig::FromJson(const json& j) {
  ModelConfig c;
  c.content = content::ContentEncoderConfig::FromJson(j.at("content"));
  c.identity = identity::IdentityConfig::FromJson(j.at("identity"));
  c.decoder = DecoderConfig::FromJson(j.at("decoder"));
  c.postnet = PostnetConfig::FromJson(j.at("postnet"));
  return c;
}

namespace {

const ModelConfig& Checked(const ModelConfig& cfg) {
  cfg.Validate();
  return cfg;
}

}  // namespace

IdentityModel::IdentityModel(const identity::IdentityConfig& cfg, uint64_t seed)
    : speech(cfg, HashSeeds({seed, 1})), face(cfg, HashSeeds({seed, 2})) {}

void IdentityModel::Save(const std::string& path, const json& meta) const {
  io::Checkpoint ckpt;
  ckpt.meta() = meta.is_object() ? meta : json::object();
  ckpt.meta()["kind"] = "identity";
  ckpt.meta()["config"] = speech.config().ToJson();
  speech.params().Save(&ckpt, "");
  face.params().Save(&ckpt, "");
  ckpt.Save(path);
}

std::unique_ptr<IdentityModel> IdentityModel::Load(const std::string& path) {
  const io::Checkpoint ckpt = io::Checkpoint::Load(path);
  Require<IoError>(ckpt.meta().value("kind", "") == "identity", path,
                   ": not an identity checkpoint");
  auto model = std::make_unique<IdentityModel>(
      identity::IdentityConfig::FromJson(ckpt.meta().at("config")), 0);
  model->speech.params().Load(ckpt, "");
  model->face.params().Load(ckpt, "");
  model->speech.Freeze();
  return model;
}

Lip2SpeechModel::Lip2SpeechModel(const ModelConfig& cfg, uint64_t seed)
    : config(Checked(cfg)),
      content(cfg.content, HashSeeds({seed, 3})),
      projection(cfg.identity, HashSeeds({seed, 4})),
      decoder(cfg.decoder, HashSeeds({seed, 5})),
      postnet(cfg.postnet, HashSeeds({seed, 6})) {}

std::string Lip2SpeechModel::Checksum() const {
  return Sha256Hex(content.params().Checksum() + projection.params().Checksum() +
                   decoder.params().Checksum() + postnet.params().Checksum());
}

void Lip2SpeechModel::Save(const std::string& path, const json& meta) const {
  io::Checkpoint ckpt;
  ckpt.meta() = meta.is_object() ? meta : json::object();
  ckpt.meta()["kind"] = "lip2speech";
  ckpt.meta()["config"] = config.ToJson();
  content.params().Save(&ckpt, "content.");
  projection.params().Save(&ckpt, "");
  decoder.params().Save(&ckpt, "");
  postnet.params().Save(&ckpt, "");
  ckpt.Save(path);
}

std::unique_ptr<Lip2SpeechModel> Lip2SpeechModel::Load(const std::string& path) {
  const io::Checkpoint ckpt = io::Checkpoint::Load(path);
  Require<IoError>(ckpt.meta().value("kind", "") == "lip2speech", path,
                   ": not a lip2speech checkpoint");
  auto model =
      std::make_unique<Lip2SpeechModel>(ModelConfig::FromJson(ckpt.meta().at("config")), 0);
  model->content.params().Load(ckpt, "content.");
  model->projection.params().Load(ckpt, "");
  model->decoder.params().Load(ckpt, "");
  model->postnet.params().Load(ckpt, "");
  return model;
}

SpeakerSource SpeakerSource::Face(corpus::FaceImage img) {
  SpeakerSource s;
  s.mode = Source::kFace;
  s.face = std::move(img);
  return s;
}

SpeakerSource SpeakerSource::Speech(dsp::Waveform wave) {
  SpeakerSource s;
  s.mode = Source::kSpeech;
  s.speech = std::move(wave);
  return s;
}

void SpeakerSource::Validate() const {
  if (mode == Source::kFace) {
    Require(face.has_value() && !speech.has_value(),
            "speaker source: face mode needs a face image and no audio");
  } else {
    Require(speech.has_value() && !face.has_value(),
            "speaker source: speech mode needs a waveform and no face image");
  }
}

corpus::VideoClip CorpusMedia::Video() const { return corpus::LoadVideo(corpus_, item_); }
dsp::Waveform CorpusMedia::Audio() const { return corpus::LoadAudio(corpus_, item_); }

SpeakerEmbedding EmbedSource(const SpeakerSource& source, const IdentityModel& ids,
                             const dsp::DspConfig& dsp) {
  source.Validate();
  if (source.mode == Source::kFace) return ids.face.Embed(*source.face);
  return ids.speech.Embed(dsp::LinearToMel(dsp::StftMagnitude(*source.speech, dsp), dsp));
}

Prediction PredictSpectrograms(const corpus::VideoClip& clip, const SpeakerEmbedding& embedding,
                               const Lip2SpeechModel& model, const dsp::DspConfig& dsp) {
  const content::ContentPosterior post = model.content.Encode(clip);
  const Mat up = content::UpsampleLatent(post.mu, dsp.Alpha());
  const RowVec spk = model.projection.Project(embedding).vec;
  Prediction p;
  p.mel = model.decoder.Decode(up, spk);
  p.linear = model.postnet.Convert(p.mel);
  return p;
}

dsp::Waveform Synthesize(const corpus::VideoClip& clip, const SpeakerSource& source,
                         const IdentityModel& ids, const Lip2SpeechModel& model,
                         const dsp::DspConfig& dsp, int gl_iters, uint64_t seed) {
  const Prediction p = PredictSpectrograms(clip, EmbedSource(source, ids, dsp), model, dsp);
  return dsp::GriffinLim(dsp::LinearSpectrogram{p.linear}, dsp, gl_iters, seed);
}

dsp::Waveform SynthesizeItem(const MediaSource& item, Source mode, const MediaSource* reference,
                             const IdentityModel& ids, const Lip2SpeechModel& model,
                             const dsp::DspConfig& dsp, int gl_iters, uint64_t seed) {
  const corpus::VideoClip clip = item.Video();
  const SpeakerSource source =
      mode == Source::kFace
          ? SpeakerSource::Face(corpus::FirstFrame(clip))
          : SpeakerSource::Speech(reference != nullptr ? reference->Audio() : item.Audio());
  return Synthesize(clip, source, ids, model, dsp, gl_iters, seed);
}

}  // namespace l2s::synthesis
