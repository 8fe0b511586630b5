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

#include "l2s/cli/commands.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "l2s/base/error.h"
#include "l2s/base/random.h"
#include "l2s/cli/manifest.h"
#include "l2s/cli/run_config.h"
#include "l2s/dsp/griffin_lim.h"
#include "l2s/io/l2st.h"
#include "l2s/io/wav.h"

namespace l2s::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kIdentityCkpt = "identity.ckpt";
constexpr const char* kLip2SpeechCkpt = "lip2speech.ckpt";

struct CommonOptions {
  std::string config_path;
  std::optional<std::string> preset;
  std::optional<uint64_t> seed;
  std::vector<std::string> sets;
};

void AddCommon(CLI::App* sub, CommonOptions* o) {
  sub->add_option("--config", o->config_path, "Run config JSON (preset, seed, overrides)");
  sub->add_option("--preset", o->preset, "toy or paper; overrides the config file");
  sub->add_option("--seed", o->seed, "Master seed; overrides the config file");
  sub->add_option("--set", o->sets, "Dotted override key=value, repeatable");
}

RunConfig BuildRun(const CommonOptions& o) {
  RunConfig run = o.config_path.empty() ? RunConfig{} : RunConfig::FromFile(o.config_path);
  if (o.preset) run.preset = ParsePreset(*o.preset);
  if (o.seed) run.seed = *o.seed;
  for (const std::string& s : o.sets) run.AddOverride(s);
  return run;
}

// Line-delimited JSON training log.
class JsonlLog {
 public:
  explicit JsonlLog(const std::string& path) : out_(path) {
    Require<IoError>(out_.good(), "cannot open log ", path);
  }
  synthesis::StepLogger Logger() {
    return [this](const json& j) { out_ << j.dump() << "\n"; };
  }

 private:
  std::ofstream out_;
};

// Adopts the on-disk corpus config and re-validates against the model.
void BindCorpus(ResolvedConfig& cfg, const corpus::Corpus& c) {
  cfg.corpus = c.cfg;
  cfg.Validate();
}

void RequireIdentityMatches(const ResolvedConfig& cfg, const synthesis::IdentityModel& ids) {
  Require<ConfigError>(cfg.model.identity.ToJson() == ids.speech.config().ToJson(),
                       "model.identity does not match the identity checkpoint's config");
}

json CheckpointMeta(const std::string& path) {
  std::ifstream in(path + ".json");
  Require<IoError>(in.good(), "cannot open checkpoint index ", path, ".json");
  return json::parse(in).at("meta");
}

class FileMedia : public synthesis::MediaSource {
 public:
  FileMedia(std::string video, std::string audio, int fps)
      : video_(std::move(video)), audio_(std::move(audio)), fps_(fps) {}
  corpus::VideoClip Video() const override {
    Require<IoError>(!video_.empty(), "no video for this source");
    const io::FloatTensor t = io::ReadL2st(video_);
    Require<IoError>(t.dims.size() == 3, video_, ": video tensor must be [T, H, W]");
    corpus::VideoClip clip;
    clip.height = static_cast<int>(t.dims[1]);
    clip.width = static_cast<int>(t.dims[2]);
    clip.fps = fps_;
    clip.frames = io::ToMat(t);
    return clip;
  }
  dsp::Waveform Audio() const override {
    Require<IoError>(!audio_.empty(), "no audio for this source");
    return io::ReadWav(audio_);
  }

 private:
  std::string video_, audio_;
  int fps_;
};

int MakeData(const RunConfig& run, const std::string& out_dir, std::ostream& out) {
  const ResolvedConfig cfg = run.Resolve();
  const corpus::Corpus c = corpus::MakeCorpus(cfg.corpus, run.seed, out_dir);
  RunManifest m("make-data", run, cfg);
  m.AddOutput("corpus_manifest", (fs::path(out_dir) / "manifest.json").string());
  m.SetResult("n_items", c.items.size());
  m.Write((fs::path(out_dir) / "run_manifest.json").string());
  out << "wrote " << c.items.size() << " items to " << out_dir << "\n";
  return kExitOk;
}

int TrainIdentity(const RunConfig& run, const std::string& corpus_dir, const std::string& ckpt,
                  std::string log_path, std::ostream& out) {
  ResolvedConfig cfg = run.Resolve();
  const corpus::Corpus c = corpus::LoadCorpus(corpus_dir);
  BindCorpus(cfg, c);
  if (log_path.empty()) log_path = ckpt + ".log.jsonl";
  JsonlLog log(log_path);
  const auto train = c.ItemsIn(corpus::Split::kTrain);
  synthesis::IdentityModel ids(cfg.model.identity, HashSeeds({run.seed, 0x1d}));
  const synthesis::SpeakerPretrainReport r0 = synthesis::PretrainSpeechEncoder(
      c, train, ids, cfg.stage0, HashSeeds({run.seed, 0}), log.Logger());
  const synthesis::CrossmodalTrainReport r1 = synthesis::TrainFaceEncoder(
      c, train, ids, cfg.stage1, HashSeeds({run.seed, 1}), log.Logger());
  ids.Save(ckpt, json{{"config_hash", ConfigHash(cfg.ToJson())}, {"seed", run.seed}});

  RunManifest m("train-identity", run, cfg);
  m.AddInput("corpus_manifest", (fs::path(corpus_dir) / "manifest.json").string());
  m.AddOutput("identity", ckpt);
  m.AddOutput("log", log_path);
  m.SetResult("stage0_train_accuracy", r0.train_accuracy);
  m.SetResult("stage1_gc_drops", r1.gc_drops);
  m.SetResult("speech_checksum", r1.speech_checksum_after);
  m.Write(ckpt + ".manifest.json");
  out << "stage0 accuracy " << r0.train_accuracy << ", stage1 final loss "
      << r1.steps.back().total << "; wrote " << ckpt << "\n";
  return kExitOk;
}

int TrainLip2Speech(const RunConfig& run, const std::string& corpus_dir,
                    const std::string& face_ckpt, const std::string& ckpt, std::string log_path,
                    std::ostream& out) {
  ResolvedConfig cfg = run.Resolve();
  const corpus::Corpus c = corpus::LoadCorpus(corpus_dir);
  BindCorpus(cfg, c);
  const auto ids = synthesis::IdentityModel::Load(face_ckpt);
  RequireIdentityMatches(cfg, *ids);
  if (log_path.empty()) log_path = ckpt + ".log.jsonl";
  JsonlLog log(log_path);
  synthesis::Lip2SpeechModel model(cfg.model, HashSeeds({run.seed, 0x2d}));
  const synthesis::Lip2SpeechTrainReport r =
      synthesis::TrainLip2Speech(c, c.ItemsIn(corpus::Split::kTrain), *ids, model, cfg.stage2,
                                 HashSeeds({run.seed, 2}), log.Logger());
  model.Save(ckpt, json{{"config_hash", ConfigHash(cfg.ToJson())},
                        {"seed", run.seed},
                        {"corpus", c.cfg.ToJson()}});

  RunManifest m("train-lip2speech", run, cfg);
  m.AddInput("corpus_manifest", (fs::path(corpus_dir) / "manifest.json").string());
  m.AddInput("identity", face_ckpt);
  m.AddOutput("lip2speech", ckpt);
  m.AddOutput("log", log_path);
  m.SetResult("final_loss", r.steps.back().ToJson());
  m.SetResult("face_checksum", r.face_checksum_after);
  m.Write(ckpt + ".manifest.json");
  out << "stage2 final total " << r.steps.back().total << "; wrote " << ckpt << "\n";
  return kExitOk;
}

int Synthesize(const RunConfig& run, const std::string& ckpt_dir, const std::string& clip,
               const std::string& mode_name, const std::string& ref, const std::string& wav_out,
               std::ostream& out) {
  const ResolvedConfig cfg = run.Resolve();
  const identity::Source mode = identity::ParseSource(mode_name);
  const std::string model_path = (fs::path(ckpt_dir) / kLip2SpeechCkpt).string();
  const std::string ids_path = (fs::path(ckpt_dir) / kIdentityCkpt).string();
  const auto ids = synthesis::IdentityModel::Load(ids_path);
  const auto model = synthesis::Lip2SpeechModel::Load(model_path);
  const json meta = CheckpointMeta(model_path);
  const dsp::DspConfig dsp = meta.contains("corpus")
                                 ? corpus::CorpusConfig::FromJson(meta.at("corpus")).dsp
                                 : cfg.corpus.dsp;

  // An item directory holds video.l2st and audio.wav; otherwise --clip is the
  // video file itself.
  std::string video = clip, own_audio;
  if (fs::is_directory(clip)) {
    video = (fs::path(clip) / "video.l2st").string();
    const fs::path wav = fs::path(clip) / "audio.wav";
    if (fs::exists(wav)) own_audio = wav.string();
  }
  if (mode == identity::Source::kSpeech) {
    Require<ConfigError>(!ref.empty() || !own_audio.empty(),
                         "--mode speech needs --ref <wav> or an item directory with audio.wav");
  } else {
    Require<ConfigError>(ref.empty(), "--ref is only used with --mode speech");
  }
  const FileMedia item(video, own_audio, dsp.video_fps);
  const std::optional<FileMedia> reference =
      ref.empty() ? std::nullopt : std::optional<FileMedia>(FileMedia("", ref, dsp.video_fps));
  const dsp::Waveform w = synthesis::SynthesizeItem(
      item, mode, reference ? &*reference : nullptr, *ids, *model, dsp, cfg.synth_gl_iters,
      HashSeeds({run.seed, 3}));
  io::WriteWav(wav_out, w);

  RunManifest m("synthesize", run, cfg);
  m.AddInput("identity", ids_path);
  m.AddInput("lip2speech", model_path);
  m.AddInput("clip", video);
  if (!ref.empty()) m.AddInput("ref", ref);
  m.AddOutput("wav", wav_out);
  m.SetResult("mode", identity::SourceName(mode));
  m.SetResult("duration_sec", w.DurationSec());
  m.Write(wav_out + ".manifest.json");
  out << "wrote " << w.DurationSec() << " s to " << wav_out << "\n";
  return kExitOk;
}

int Vocode(const RunConfig& run, const std::string& spec, const std::string& wav_out,
           std::optional<int> iters, std::ostream& out) {
  const ResolvedConfig cfg = run.Resolve();
  const int n_iters = iters.value_or(cfg.synth_gl_iters);
  Require<ConfigError>(n_iters >= 1, "--iters must be >= 1");
  const io::FloatTensor t = io::ReadL2st(spec);
  Require<IoError>(t.dims.size() == 2, spec, ": spectrogram must be [frames, bins]");
  Require<IoError>(static_cast<int>(t.dims[1]) == cfg.corpus.dsp.NumBins(), spec, ": ",
                   t.dims[1], " bins, expected ", cfg.corpus.dsp.NumBins());
  const dsp::Waveform w = dsp::GriffinLim(dsp::LinearSpectrogram{io::ToMat(t)}, cfg.corpus.dsp,
                                          n_iters, HashSeeds({run.seed, 4}));
  io::WriteWav(wav_out, w);

  RunManifest m("vocode", run, cfg);
  m.AddInput("spec", spec);
  m.AddOutput("wav", wav_out);
  m.SetResult("iters", n_iters);
  m.Write(wav_out + ".manifest.json");
  out << "wrote " << w.samples.size() << " samples to " << wav_out << "\n";
  return kExitOk;
}

int Evaluate(const RunConfig& run, const std::string& corpus_dir, const std::string& ckpt_dir,
             const std::string& report_path, std::string scatter_dir, std::ostream& out) {
  ResolvedConfig cfg = run.Resolve();
  const corpus::Corpus c = corpus::LoadCorpus(corpus_dir);
  BindCorpus(cfg, c);
  const std::string ids_path = (fs::path(ckpt_dir) / kIdentityCkpt).string();
  const std::string model_path = (fs::path(ckpt_dir) / kLip2SpeechCkpt).string();
  const auto ids = synthesis::IdentityModel::Load(ids_path);
  const auto model = synthesis::Lip2SpeechModel::Load(model_path);
  if (scatter_dir.empty()) {
    scatter_dir = fs::absolute(report_path).parent_path().string();
  }
  cfg.eval.scatter_dir = scatter_dir;
  const eval::EvalReport r = eval::Evaluate(c, *ids, *model, cfg.eval);
  const json report = r.ToJson();
  {
    std::ofstream f(report_path);
    Require<IoError>(f.good(), "cannot write report ", report_path);
    f << report.dump(2) << "\n";
  }
  RunManifest m("evaluate", run, cfg);
  m.AddInput("corpus_manifest", (fs::path(corpus_dir) / "manifest.json").string());
  m.AddInput("identity", ids_path);
  m.AddInput("lip2speech", model_path);
  m.AddOutput("report", report_path);
  m.SetResult("report", report);
  m.Write(report_path + ".manifest.json");
  out << report.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-shot lip-to-speech synthesis on a synthetic audio-visual corpus",
               "lip2speech"};
  app.require_subcommand(1);

  CommonOptions md_o, ti_o, tl_o, sy_o, vo_o, ev_o;
  std::string out_dir, corpus_dir, ckpt_out, log_path, face_ckpt, ckpt_dir, clip, mode, ref,
      wav_out, spec, report, scatter_dir;
  std::optional<int> iters;

  CLI::App* md = app.add_subcommand("make-data", "Render the synthetic corpus");
  AddCommon(md, &md_o);
  md->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* ti = app.add_subcommand("train-identity",
                                    "Stage 0 speech encoder, then stage 1 face encoder");
  AddCommon(ti, &ti_o);
  ti->add_option("--corpus", corpus_dir, "Corpus directory from make-data")->required();
  ti->add_option("--out", ckpt_out, "Identity checkpoint path")->required();
  ti->add_option("--log", log_path, "JSONL log (default <out>.log.jsonl)");

  CLI::App* tl = app.add_subcommand("train-lip2speech", "Stage 2 VAE lip-to-speech model");
  AddCommon(tl, &tl_o);
  tl->add_option("--corpus", corpus_dir, "Corpus directory from make-data")->required();
  tl->add_option("--face-ckpt", face_ckpt, "Identity checkpoint from train-identity")
      ->required();
  tl->add_option("--out", ckpt_out, "Lip2speech checkpoint path")->required();
  tl->add_option("--log", log_path, "JSONL log (default <out>.log.jsonl)");

  CLI::App* sy = app.add_subcommand("synthesize", "Speech for a silent clip");
  AddCommon(sy, &sy_o);
  sy->add_option("--ckpts", ckpt_dir, "Directory with identity.ckpt and lip2speech.ckpt")
      ->required();
  sy->add_option("--clip", clip, "video.l2st file or corpus item directory")->required();
  sy->add_option("--mode", mode, "face or speech")->required();
  sy->add_option("--ref", ref, "Reference speech WAV for --mode speech");
  sy->add_option("--out", wav_out, "Output WAV")->required();

  CLI::App* vo = app.add_subcommand("vocode", "Griffin-Lim a stored linear spectrogram");
  AddCommon(vo, &vo_o);
  vo->add_option("--spec", spec, "[frames, bins] L2ST magnitudes")->required();
  vo->add_option("--out", wav_out, "Output WAV")->required();
  vo->add_option("--iters", iters, "Griffin-Lim iterations");

  CLI::App* ev = app.add_subcommand("evaluate", "Verification, probe, gender match, l1_mel");
  AddCommon(ev, &ev_o);
  ev->add_option("--corpus", corpus_dir, "Corpus directory from make-data")->required();
  ev->add_option("--ckpts", ckpt_dir, "Directory with identity.ckpt and lip2speech.ckpt")
      ->required();
  ev->add_option("--report", report, "Report JSON path")->required();
  ev->add_option("--scatter-dir", scatter_dir, "Scatter CSV directory (default: report's)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (md->parsed()) return MakeData(BuildRun(md_o), out_dir, out);
    if (ti->parsed()) return TrainIdentity(BuildRun(ti_o), corpus_dir, ckpt_out, log_path, out);
    if (tl->parsed()) {
      return TrainLip2Speech(BuildRun(tl_o), corpus_dir, face_ckpt, ckpt_out, log_path, out);
    }
    if (sy->parsed()) return Synthesize(BuildRun(sy_o), ckpt_dir, clip, mode, ref, wav_out, out);
    if (vo->parsed()) return Vocode(BuildRun(vo_o), spec, wav_out, iters, out);
    if (ev->parsed()) {
      return Evaluate(BuildRun(ev_o), corpus_dir, ckpt_dir, report, scatter_dir, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace l2s::cli
