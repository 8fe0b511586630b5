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

#ifndef L2S_IO_CHECKPOINT_H_
#define L2S_IO_CHECKPOINT_H_

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "l2s/base/matrix.h"

namespace l2s::io {

// Named-tensor container. `Save(path)` writes two files:
//   <path>       one 1-D L2ST tensor holding every value, concatenated in
//                insertion order;
//   <path>.json  the index: {"format", "version", "meta",
//                "tensors": [{"name", "offset", "shape"}]} where offset counts
//                float elements into the payload.
// Values are stored as float32; a loaded checkpoint is exactly what a later
// stage sees, so save/load is the only rounding point.
class Checkpoint {
 public:
  void Put(const std::string& name, const Mat& value);
  bool Has(const std::string& name) const;
  const Mat& Get(const std::string& name) const;
  const std::vector<std::string>& names() const { return order_; }

  nlohmann::json& meta() { return meta_; }
  const nlohmann::json& meta() const { return meta_; }

  void Save(const std::string& path) const;
  static Checkpoint Load(const std::string& path);

 private:
  std::vector<std::string> order_;
  std::map<std::string, Mat> tensors_;
  nlohmann::json meta_ = nlohmann::json::object();
};

}  // namespace l2s::io

#endif  // L2S_IO_CHECKPOINT_H_
