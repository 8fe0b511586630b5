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

#include "l2s/cli/run_config.h"

#include <fstream>

#include "l2s/base/error.h"
#include "l2s/base/hash.h"

namespace l2s::cli {

using nlohmann::json;

const char* PresetName(Preset p) { return p == Preset::kToy ? "toy" : "paper"; }

Preset ParsePreset(const std::string& name) {
  if (name == "toy") return Preset::kToy;
  if (name == "paper") return Preset::kPaper;
  throw ConfigError("preset: unknown value \"" + name + "\" (expected toy or paper)");
}

namespace {

json ProbeToJson(const eval::ProbeConfig& p) {
  return json{{"train_fraction", p.train_fraction},
              {"l2", p.l2},
              {"lr", p.lr},
              {"iters", p.iters}};
}

eval::ProbeConfig ProbeFromJson(const json& j) {
  eval::ProbeConfig p;
  p.train_fraction = j.at("train_fraction").get<double>();
  p.l2 = j.at("l2").get<double>();
  p.lr = j.at("lr").get<double>();
  p.iters = j.at("iters").get<int>();
  return p;
}

// Same JSON kind, treating every number type as one kind.
bool SameKind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) {
    return !(a.is_number_integer() && b.is_number_float());
  }
  return a.type() == b.type();
}

}  // namespace

void ResolvedConfig::Validate() const {
  corpus.Validate();
  model.Validate();
  stage0.Validate();
  stage1.Validate();
  stage2.Validate();
  Require<ConfigError>(model.identity.n_train_speakers == corpus.n_seen_speakers,
                       "model.identity.n_train_speakers (", model.identity.n_train_speakers,
                       ") must equal corpus.n_seen_speakers (", corpus.n_seen_speakers, ")");
  Require<ConfigError>(model.identity.face_size == corpus.image_size &&
                           model.content.image_size == corpus.image_size,
                       "model.identity.face_size and model.content.image_size must equal "
                       "corpus.image_size (",
                       corpus.image_size, ")");
  Require<ConfigError>(model.decoder.n_mels == corpus.dsp.n_mels &&
                           model.postnet.n_linear == corpus.dsp.NumBins(),
                       "model.decoder.n_mels and model.postnet.n_linear must match corpus.dsp");
  Require<ConfigError>(eval.gl_iters >= 1, "eval.gl_iters must be >= 1");
  Require<ConfigError>(eval.probe.train_fraction > 0 && eval.probe.train_fraction < 1,
                       "eval.probe.train_fraction must be in (0, 1)");
  Require<ConfigError>(eval.probe.iters >= 1, "eval.probe.iters must be >= 1");
  Require<ConfigError>(synth_gl_iters >= 1, "synthesis.gl_iters must be >= 1");
}

json ResolvedConfig::ToJson() const {
  return json{{"corpus", corpus.ToJson()},
              {"model", model.ToJson()},
              {"stage0", stage0.ToJson()},
              {"stage1", stage1.ToJson()},
              {"stage2", stage2.ToJson()},
              {"eval", {{"gl_iters", eval.gl_iters}, {"probe", ProbeToJson(eval.probe)}}},
              {"synthesis", {{"gl_iters", synth_gl_iters}}}};
}

ResolvedConfig ResolvedConfig::FromJson(const json& j) {
  ResolvedConfig c;
  c.corpus = corpus::CorpusConfig::FromJson(j.at("corpus"));
  c.model = synthesis::ModelConfig::FromJson(j.at("model"));
  c.stage0 = synthesis::SpeakerPretrainConfig::FromJson(j.at("stage0"));
  c.stage1 = synthesis::CrossmodalTrainConfig::FromJson(j.at("stage1"));
  c.stage2 = synthesis::Lip2SpeechTrainConfig::FromJson(j.at("stage2"));
  c.eval.gl_iters = j.at("eval").at("gl_iters").get<int>();
  c.eval.probe = ProbeFromJson(j.at("eval").at("probe"));
  c.synth_gl_iters = j.at("synthesis").at("gl_iters").get<int>();
  return c;
}

ResolvedConfig ResolvedConfig::ForPreset(Preset p) {
  ResolvedConfig c;
  if (p == Preset::kToy) {
    c.model = synthesis::ModelConfig::Toy();
    // Calibrated on the default corpus; see calibration/.
    c.stage1.steps = 1500;
    c.stage1.weights.w_gc = 0.1;
    c.stage2.steps = 1000;
  } else {
    c.model = synthesis::ModelConfig::Paper();
    c.corpus.image_size = 112;
  }
  return c;
}

RunConfig RunConfig::FromJson(const json& j) {
  Require<ConfigError>(j.is_object(), "run config must be a JSON object");
  RunConfig r;
  for (const auto& [key, value] : j.items()) {
    if (key == "preset") {
      Require<ConfigError>(value.is_string(), "preset must be a string");
      r.preset = ParsePreset(value.get<std::string>());
    } else if (key == "seed") {
      Require<ConfigError>(value.is_number_unsigned(), "seed must be a nonnegative integer");
      r.seed = value.get<uint64_t>();
    } else if (key == "out_dir") {
      Require<ConfigError>(value.is_string(), "out_dir must be a string");
      r.out_dir = value.get<std::string>();
    } else if (key == "overrides") {
      Require<ConfigError>(value.is_object(), "overrides must be an object of dotted keys");
      for (const auto& [k, v] : value.items()) r.overrides[k] = v;
    } else {
      throw ConfigError("unknown run config key \"" + key + "\"");
    }
  }
  return r;
}

RunConfig RunConfig::FromFile(const std::string& path) {
  std::ifstream in(path);
  Require<IoError>(in.good(), "cannot open config ", path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return FromJson(j);
}

void RunConfig::AddOverride(const std::string& assignment) {
  const size_t eq = assignment.find('=');
  Require<ConfigError>(eq != std::string::npos && eq > 0,
                       "override \"", assignment, "\" is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  overrides[key] = value;
}

void ApplyOverride(json& tree, const std::string& key, const json& value) {
  json* node = &tree;
  size_t start = 0;
  while (true) {
    const size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    Require<ConfigError>(node->is_object() && node->contains(part), "unknown config key \"",
                         key, "\"");
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  Require<ConfigError>(!node->is_object(), "config key \"", key,
                       "\" names a section, not a field");
  Require<ConfigError>(SameKind(*node, value), "config key \"", key, "\" expects a ",
                       node->type_name(), ", got ", value.type_name());
  *node = value;
}

ResolvedConfig RunConfig::Resolve() const {
  json tree = ResolvedConfig::ForPreset(preset).ToJson();
  for (const auto& [key, value] : overrides) ApplyOverride(tree, key, value);
  ResolvedConfig c = ResolvedConfig::FromJson(tree);
  c.eval.seed = seed;
  c.Validate();
  return c;
}

json RunConfig::ToJson() const {
  json o = json::object();
  for (const auto& [k, v] : overrides) o[k] = v;
  return json{{"preset", PresetName(preset)}, {"seed", seed}, {"out_dir", out_dir},
              {"overrides", o}};
}

std::string ConfigHash(const json& resolved) { return Sha256Hex(resolved.dump()); }

}  // namespace l2s::cli
