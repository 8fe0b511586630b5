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

#ifndef L2S_BASE_HASH_H_
#define L2S_BASE_HASH_H_

#include <string>
#include <string_view>

namespace l2s {

// Lowercase hex SHA-256 digest.
std::string Sha256Hex(std::string_view bytes);
std::string Sha256File(const std::string& path);

}  // namespace l2s

#endif  // L2S_BASE_HASH_H_
