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

#include "l2s/cli/manifest.h"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "l2s/base/error.h"
#include "l2s/base/hash.h"

#ifndef L2S_GIT_DESCRIBE
#define L2S_GIT_DESCRIBE "unknown"
#endif

namespace l2s::cli {

namespace fs = std::filesystem;
using nlohmann::json;

const char* GitDescribe() { return L2S_GIT_DESCRIBE; }

namespace {

json FileEntry(const std::string& path) {
  json e{{"path", path}, {"sha256", Sha256File(path)}};
  const std::string index = path + ".json";
  if (fs::exists(index)) e["index_sha256"] = Sha256File(index);
  return e;
}

std::string UtcNow() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunManifest::RunManifest(const std::string& command, const RunConfig& run,
                         const ResolvedConfig& resolved) {
  const json tree = resolved.ToJson();
  body_ = json{{"tool", "lip2speech"},
               {"command", command},
               {"git_describe", GitDescribe()},
               {"run", run.ToJson()},
               {"config", tree},
               {"config_hash", ConfigHash(tree)},
               {"inputs", json::object()},
               {"outputs", json::object()},
               {"results", json::object()}};
}

void RunManifest::AddInput(const std::string& name, const std::string& path) {
  body_["inputs"][name] = FileEntry(path);
}

void RunManifest::AddOutput(const std::string& name, const std::string& path) {
  body_["outputs"][name] = FileEntry(path);
}

void RunManifest::SetResult(const std::string& name, json value) {
  body_["results"][name] = std::move(value);
}

json RunManifest::Stable() const {
  json j = body_;
  j["manifest_hash"] = Sha256Hex(body_.dump());
  return j;
}

json RunManifest::ToJson() const {
  json j = Stable();
  j["created_utc"] = UtcNow();
  return j;
}

void RunManifest::Write(const std::string& path) const {
  std::ofstream out(path);
  Require<IoError>(out.good(), "cannot write manifest ", path);
  out << ToJson().dump(2) << "\n";
  Require<IoError>(out.good(), "failed writing manifest ", path);
}

}  // namespace l2s::cli
