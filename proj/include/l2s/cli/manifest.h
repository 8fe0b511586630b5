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

#ifndef L2S_CLI_MANIFEST_H_
#define L2S_CLI_MANIFEST_H_

#include <string>

#include "json.hpp"
#include "l2s/cli/run_config.h"

namespace l2s::cli {

// `git describe` of the source tree this binary was built from.
const char* GitDescribe();

// Record of one subcommand invocation: enough to re-run it exactly.
class RunManifest {
 public:
  RunManifest(const std::string& command, const RunConfig& run, const ResolvedConfig& resolved);

  // Hashes the file at `path` (and its .json index when present).
  void AddInput(const std::string& name, const std::string& path);
  void AddOutput(const std::string& name, const std::string& path);
  void SetResult(const std::string& name, nlohmann::json value);

  // Everything except the timestamp; "manifest_hash" is the SHA-256 of the
  // dump of this object.
  nlohmann::json Stable() const;
  nlohmann::json ToJson() const;
  void Write(const std::string& path) const;

 private:
  nlohmann::json body_;
};

}  // namespace l2s::cli

#endif  // L2S_CLI_MANIFEST_H_
