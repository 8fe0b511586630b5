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

#include "l2s/corpus/corpus.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "l2s/base/error.h"
#include "l2s/base/random.h"
#include "l2s/io/l2st.h"
#include "l2s/io/wav.h"

namespace l2s::corpus {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr uint64_t kSpeakerTag = 0x5350454bULL;

json DspToJson(const dsp::DspConfig& c) {
  return json{{"sample_rate_hz", c.sample_rate_hz}, {"fft_size", c.fft_size},
              {"win_length", c.win_length},         {"hop_length", c.hop_length},
              {"n_mels", c.n_mels},                 {"fmin_hz", c.fmin_hz},
              {"fmax_hz", c.fmax_hz},               {"log_floor", c.log_floor},
              {"video_fps", c.video_fps}};
}

dsp::DspConfig DspFromJson(const json& j) {
  dsp::DspConfig c;
  c.sample_rate_hz = j.at("sample_rate_hz").get<int>();
  c.fft_size = j.at("fft_size").get<int>();
  c.win_length = j.at("win_length").get<int>();
  c.hop_length = j.at("hop_length").get<int>();
  c.n_mels = j.at("n_mels").get<int>();
  c.fmin_hz = j.at("fmin_hz").get<double>();
  c.fmax_hz = j.at("fmax_hz").get<double>();
  c.log_floor = j.at("log_floor").get<double>();
  c.video_fps = j.at("video_fps").get<int>();
  return c;
}

json SpeakerJson(const SyntheticSpeaker& s, bool seen) {
  return json{{"id", s.id},
              {"gender", GenderName(s.gender)},
              {"f0_hz", s.f0_hz},
              {"timbre", s.timbre},
              {"face_seed", s.face_seed},
              {"set", seen ? "seen" : "unseen"}};
}

SyntheticSpeaker SpeakerFromJson(const json& j) {
  SyntheticSpeaker s;
  s.id = j.at("id").get<int>();
  s.gender = ParseGender(j.at("gender").get<std::string>());
  s.f0_hz = j.at("f0_hz").get<double>();
  s.timbre = j.at("timbre").get<std::array<double, kTimbreSize>>();
  s.face_seed = j.at("face_seed").get<uint64_t>();
  return s;
}

std::string ItemId(int speaker, int utt) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%02d_u%03d", speaker, utt);
  return buf;
}

io::FloatTensor VideoTensor(const VideoClip& clip) {
  io::FloatTensor t = io::FromMat(clip.frames);
  t.dims = {static_cast<uint32_t>(clip.NumFrames()), static_cast<uint32_t>(clip.height),
            static_cast<uint32_t>(clip.width)};
  return t;
}

}  // namespace

void CorpusConfig::Validate() const {
  Require<ConfigError>(n_seen_speakers >= 2, "corpus.n_seen_speakers must be >= 2");
  Require<ConfigError>(n_unseen_speakers >= 0, "corpus.n_unseen_speakers must be >= 0");
  Require<ConfigError>(utterances_per_speaker >= 1,
                       "corpus.utterances_per_speaker must be >= 1");
  Require<ConfigError>(vocab_size >= 1 && vocab_size <= 8,
                       "corpus.vocab_size must be in [1, 8]");
  Require<ConfigError>(min_tokens >= 1 && max_tokens >= min_tokens,
                       "corpus.min_tokens/max_tokens must satisfy 1 <= min <= max");
  Require<ConfigError>(frames_per_token > kCrossfadeFrames,
                       "corpus.frames_per_token must exceed ", kCrossfadeFrames);
  Require<ConfigError>(image_size >= kBaseImageSize, "corpus.image_size must be >= ",
                       kBaseImageSize);
  Require<ConfigError>(train_fraction > 0 && dev_fraction >= 0 &&
                           train_fraction + dev_fraction <= 1.0,
                       "corpus.train_fraction/dev_fraction must be nonnegative and sum "
                       "to at most 1");
  dsp.Validate();
}

json CorpusConfig::ToJson() const {
  return json{{"n_seen_speakers", n_seen_speakers},
              {"n_unseen_speakers", n_unseen_speakers},
              {"utterances_per_speaker", utterances_per_speaker},
              {"vocab_size", vocab_size},
              {"min_tokens", min_tokens},
              {"max_tokens", max_tokens},
              {"frames_per_token", frames_per_token},
              {"image_size", image_size},
              {"train_fraction", train_fraction},
              {"dev_fraction", dev_fraction},
              {"dsp", DspToJson(dsp)}};
}

CorpusConfig CorpusConfig::FromJson(const json& j) {
  CorpusConfig c;
  c.n_seen_speakers = j.at("n_seen_speakers").get<int>();
  c.n_unseen_speakers = j.at("n_unseen_speakers").get<int>();
  c.utterances_per_speaker = j.at("utterances_per_speaker").get<int>();
  c.vocab_size = j.at("vocab_size").get<int>();
  c.min_tokens = j.at("min_tokens").get<int>();
  c.max_tokens = j.at("max_tokens").get<int>();
  c.frames_per_token = j.at("frames_per_token").get<int>();
  c.image_size = j.at("image_size").get<int>();
  c.train_fraction = j.at("train_fraction").get<double>();
  c.dev_fraction = j.at("dev_fraction").get<double>();
  c.dsp = DspFromJson(j.at("dsp"));
  return c;
}

const char* SplitName(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
    case Split::kUnseen: return "unseen";
  }
  return "?";
}

Split ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  if (name == "unseen") return Split::kUnseen;
  throw IoError("unknown split '" + name + "'");
}

SplitCounts ComputeSplit(int n, const CorpusConfig& cfg) {
  SplitCounts s;
  s.train = static_cast<int>(std::llround(cfg.train_fraction * n));
  s.dev = static_cast<int>(std::floor(cfg.dev_fraction * n + 1e-9));
  s.dev = std::min(s.dev, n - s.train);
  s.test = n - s.train - s.dev;
  return s;
}

const SyntheticSpeaker& Corpus::Speaker(int id) const {
  for (const auto& s : seen_speakers) {
    if (s.id == id) return s;
  }
  for (const auto& s : unseen_speakers) {
    if (s.id == id) return s;
  }
  throw ShapeError("no speaker with id " + std::to_string(id));
}

bool Corpus::IsSeen(int speaker_id) const {
  for (const auto& s : seen_speakers) {
    if (s.id == speaker_id) return true;
  }
  return false;
}

std::vector<const CorpusItem*> Corpus::ItemsIn(Split split) const {
  std::vector<const CorpusItem*> out;
  for (const auto& it : items) {
    if (it.split == split) out.push_back(&it);
  }
  return out;
}

std::string Corpus::FacePath(int speaker_id) const {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "speakers/s%02d/face.l2st", speaker_id);
  return buf;
}

json Corpus::ManifestJson() const {
  json speakers = json::array();
  for (const auto& s : seen_speakers) speakers.push_back(SpeakerJson(s, true));
  for (const auto& s : unseen_speakers) speakers.push_back(SpeakerJson(s, false));
  json list = json::array();
  for (const auto& it : items) {
    list.push_back(json{{"id", it.id},
                        {"speaker_id", it.speaker_id},
                        {"gender", GenderName(it.gender)},
                        {"utterance_index", it.utterance_index},
                        {"tokens", it.utterance.tokens},
                        {"split", SplitName(it.split)},
                        {"video", it.video_path},
                        {"audio", it.audio_path}});
  }
  return json{{"format", "l2s-corpus"}, {"version", 1},          {"seed", seed},
              {"config", cfg.ToJson()}, {"speakers", speakers},  {"items", list}};
}

uint64_t ItemSeed(uint64_t master_seed, int speaker_id, int utterance_index) {
  return HashSeeds({master_seed, static_cast<uint64_t>(speaker_id),
                    static_cast<uint64_t>(utterance_index)});
}

Utterance DrawUtterance(const CorpusConfig& cfg, uint64_t item_seed) {
  Rng rng(item_seed);
  std::uniform_int_distribution<int> len(cfg.min_tokens, cfg.max_tokens);
  std::uniform_int_distribution<int> tok(0, cfg.vocab_size - 1);
  Utterance u;
  u.frames_per_token = cfg.frames_per_token;
  u.tokens.resize(len(rng));
  for (int& t : u.tokens) t = tok(rng);
  return u;
}

Corpus PlanCorpus(const CorpusConfig& cfg, uint64_t seed) {
  cfg.Validate();
  Corpus c;
  c.cfg = cfg;
  c.seed = seed;
  const int total = cfg.n_seen_speakers + cfg.n_unseen_speakers;
  for (int id = 0; id < total; ++id) {
    const Gender g = id % 2 == 0 ? Gender::kMale : Gender::kFemale;
    SyntheticSpeaker s = MakeSpeaker(HashSeeds({seed, kSpeakerTag, uint64_t(id)}), g, id);
    (id < cfg.n_seen_speakers ? c.seen_speakers : c.unseen_speakers).push_back(s);
  }
  const SplitCounts counts = ComputeSplit(cfg.utterances_per_speaker, cfg);
  for (int id = 0; id < total; ++id) {
    const bool seen = id < cfg.n_seen_speakers;
    for (int u = 0; u < cfg.utterances_per_speaker; ++u) {
      CorpusItem it;
      it.id = ItemId(id, u);
      it.speaker_id = id;
      it.gender = id % 2 == 0 ? Gender::kMale : Gender::kFemale;
      it.utterance_index = u;
      it.utterance = DrawUtterance(cfg, ItemSeed(seed, id, u));
      if (!seen) {
        it.split = Split::kUnseen;
      } else if (u < counts.train) {
        it.split = Split::kTrain;
      } else if (u < counts.train + counts.dev) {
        it.split = Split::kDev;
      } else {
        it.split = Split::kTest;
      }
      it.video_path = "items/" + it.id + "/video.l2st";
      it.audio_path = "items/" + it.id + "/audio.wav";
      c.items.push_back(std::move(it));
    }
  }
  return c;
}

Corpus MakeCorpus(const CorpusConfig& cfg, uint64_t seed, const std::string& out_dir) {
  Corpus c = PlanCorpus(cfg, seed);
  c.root = out_dir;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  Require<IoError>(!ec && fs::is_directory(out_dir), "cannot create corpus directory '",
                   out_dir, "'");
  auto all = c.seen_speakers;
  all.insert(all.end(), c.unseen_speakers.begin(), c.unseen_speakers.end());
  for (const auto& s : all) {
    const fs::path p = fs::path(out_dir) / c.FacePath(s.id);
    fs::create_directories(p.parent_path());
    io::WriteL2st(p.string(), io::FromMat(RenderFace(s, cfg.image_size).pixels));
  }
  for (const auto& it : c.items) {
    const SyntheticSpeaker& s = c.Speaker(it.speaker_id);
    const fs::path dir = fs::path(out_dir) / "items" / it.id;
    fs::create_directories(dir);
    io::WriteL2st((fs::path(out_dir) / it.video_path).string(),
                  VideoTensor(RenderVideo(s, it.utterance, cfg.dsp.video_fps,
                                          cfg.image_size)));
    io::WriteWav((fs::path(out_dir) / it.audio_path).string(),
                 RenderAudio(s, it.utterance, cfg.dsp));
  }
  std::ofstream out(fs::path(out_dir) / "manifest.json");
  out << c.ManifestJson().dump(1) << "\n";
  Require<IoError>(static_cast<bool>(out), "cannot write manifest in '", out_dir, "'");
  return c;
}

Corpus LoadCorpus(const std::string& dir) {
  const fs::path p = fs::path(dir) / "manifest.json";
  std::ifstream in(p);
  Require<IoError>(static_cast<bool>(in), "cannot open corpus manifest '", p.string(),
                   "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("malformed corpus manifest '" + p.string() + "': " + e.what());
  }
  Require<IoError>(j.value("format", "") == "l2s-corpus", "'", p.string(),
                   "' is not a corpus manifest");
  Corpus c;
  c.root = dir;
  c.seed = j.at("seed").get<uint64_t>();
  c.cfg = CorpusConfig::FromJson(j.at("config"));
  for (const auto& s : j.at("speakers")) {
    (s.at("set") == "seen" ? c.seen_speakers : c.unseen_speakers)
        .push_back(SpeakerFromJson(s));
  }
  for (const auto& e : j.at("items")) {
    CorpusItem it;
    it.id = e.at("id").get<std::string>();
    it.speaker_id = e.at("speaker_id").get<int>();
    it.gender = ParseGender(e.at("gender").get<std::string>());
    it.utterance_index = e.at("utterance_index").get<int>();
    it.utterance.tokens = e.at("tokens").get<std::vector<int>>();
    it.utterance.frames_per_token = c.cfg.frames_per_token;
    it.split = ParseSplit(e.at("split").get<std::string>());
    it.video_path = e.at("video").get<std::string>();
    it.audio_path = e.at("audio").get<std::string>();
    c.items.push_back(std::move(it));
  }
  return c;
}

VideoClip LoadVideo(const Corpus& corpus, const CorpusItem& item) {
  const io::FloatTensor t =
      io::ReadL2st((fs::path(corpus.root) / item.video_path).string());
  Require<IoError>(t.dims.size() == 3, "video tensor for ", item.id, " must be 3-D");
  VideoClip clip;
  clip.height = static_cast<int>(t.dims[1]);
  clip.width = static_cast<int>(t.dims[2]);
  clip.fps = corpus.cfg.dsp.video_fps;
  clip.frames = io::ToMat(t);
  return clip;
}

dsp::Waveform LoadAudio(const Corpus& corpus, const CorpusItem& item) {
  return io::ReadWav((fs::path(corpus.root) / item.audio_path).string());
}

FaceImage LoadFace(const Corpus& corpus, int speaker_id) {
  return FaceImage{
      io::ToMat(io::ReadL2st((fs::path(corpus.root) / corpus.FacePath(speaker_id)).string()))};
}

FaceImage FirstFrame(const VideoClip& clip) { return FaceImage{clip.Frame(0)}; }

}  // namespace l2s::corpus
