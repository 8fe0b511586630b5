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

#include "l2s/io/checkpoint.h"

#include <filesystem>
#include <fstream>

#include "l2s/base/error.h"
#include "l2s/io/l2st.h"

namespace l2s::io {

namespace {
constexpr char kFormat[] = "l2s-checkpoint";
constexpr int kVersion = 1;
}  // namespace

void Checkpoint::Put(const std::string& name, const Mat& value) {
  if (tensors_.find(name) == tensors_.end()) order_.push_back(name);
  // Round through float so in-memory and reloaded checkpoints agree.
  tensors_[name] = value.cast<float>().cast<double>();
}

bool Checkpoint::Has(const std::string& name) const {
  return tensors_.count(name) > 0;
}

const Mat& Checkpoint::Get(const std::string& name) const {
  auto it = tensors_.find(name);
  Require<IoError>(it != tensors_.end(), "checkpoint has no tensor '", name, "'");
  return it->second;
}

void Checkpoint::Save(const std::string& path) const {
  FloatTensor payload;
  nlohmann::json index;
  index["format"] = kFormat;
  index["version"] = kVersion;
  index["meta"] = meta_;
  index["tensors"] = nlohmann::json::array();
  size_t offset = 0;
  for (const auto& name : order_) {
    const Mat& m = tensors_.at(name);
    index["tensors"].push_back(
        {{"name", name}, {"offset", offset}, {"shape", {m.rows(), m.cols()}}});
    for (Index i = 0; i < m.size(); ++i) {
      payload.data.push_back(static_cast<float>(m.data()[i]));
    }
    offset += static_cast<size_t>(m.size());
  }
  payload.dims = {static_cast<uint32_t>(offset)};
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  WriteL2st(path, payload);
  std::ofstream out(path + ".json", std::ios::trunc);
  Require<IoError>(out.good(), "cannot write ", path, ".json");
  out << index.dump(1) << "\n";
}

Checkpoint Checkpoint::Load(const std::string& path) {
  std::ifstream in(path + ".json");
  Require<IoError>(in.good(), "missing checkpoint index ", path, ".json");
  nlohmann::json index;
  try {
    in >> index;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ".json: " + e.what());
  }
  Require<IoError>(index.value("format", "") == kFormat &&
                       index.value("version", 0) == kVersion,
                   path, ": not a version-1 l2s checkpoint");
  const FloatTensor payload = ReadL2st(path);
  Checkpoint ckpt;
  ckpt.meta_ = index.value("meta", nlohmann::json::object());
  for (const auto& entry : index.at("tensors")) {
    const auto name = entry.at("name").get<std::string>();
    const auto offset = entry.at("offset").get<size_t>();
    const auto rows = entry.at("shape").at(0).get<Index>();
    const auto cols = entry.at("shape").at(1).get<Index>();
    Require<IoError>(offset + static_cast<size_t>(rows * cols) <= payload.data.size(),
                     path, ": tensor '", name, "' overruns payload");
    Mat m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = payload.data[offset + i];
    ckpt.order_.push_back(name);
    ckpt.tensors_[name] = std::move(m);
  }
  return ckpt;
}

}  // namespace l2s::io
