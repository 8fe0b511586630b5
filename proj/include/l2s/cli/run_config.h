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

#ifndef L2S_CLI_RUN_CONFIG_H_
#define L2S_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"
#include "l2s/corpus/corpus.h"
#include "l2s/dsp/griffin_lim.h"
#include "l2s/eval/pipeline.h"
#include "l2s/synthesis/model.h"
#include "l2s/synthesis/trainers.h"

namespace l2s::cli {

enum class Preset { kToy, kPaper };
const char* PresetName(Preset p);
Preset ParsePreset(const std::string& name);

// Every module config, resolved from a preset plus overrides.
struct ResolvedConfig {
  corpus::CorpusConfig corpus;
  synthesis::ModelConfig model;
  synthesis::SpeakerPretrainConfig stage0;
  synthesis::CrossmodalTrainConfig stage1;
  synthesis::Lip2SpeechTrainConfig stage2;
  eval::EvalOptions eval;
  int synth_gl_iters = dsp::kDefaultGriffinLimIters;

  void Validate() const;
  // The tree that override keys address, e.g. "model.decoder.num_blocks".
  nlohmann::json ToJson() const;
  static ResolvedConfig FromJson(const nlohmann::json& j);
  static ResolvedConfig ForPreset(Preset p);
};

struct RunConfig {
  Preset preset = Preset::kToy;
  // Dotted key -> JSON value; applied in key order.
  std::map<std::string, nlohmann::json> overrides;
  uint64_t seed = 0;
  std::string out_dir;

  // {"preset": ..., "seed": ..., "overrides": {...}}; every field optional.
  static RunConfig FromJson(const nlohmann::json& j);
  static RunConfig FromFile(const std::string& path);
  // Parses "key=value"; the value is read as JSON, falling back to a string.
  void AddOverride(const std::string& assignment);

  // Applies overrides to the preset tree. Throws ConfigError naming the key
  // if it is unknown or its value has the wrong type, or naming the field
  // that fails validation.
  ResolvedConfig Resolve() const;
  nlohmann::json ToJson() const;
};

// Sets `key` (dotted) in `tree`, which must already contain it with a value
// of the same JSON kind.
void ApplyOverride(nlohmann::json& tree, const std::string& key, const nlohmann::json& value);

// SHA-256 of the canonical dump of a resolved tree.
std::string ConfigHash(const nlohmann::json& resolved);

}  // namespace l2s::cli

#endif  // L2S_CLI_RUN_CONFIG_H_
