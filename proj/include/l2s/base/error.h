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

#ifndef L2S_BASE_ERROR_H_
#define L2S_BASE_ERROR_H_

#include <sstream>
#include <stdexcept>
#include <string>

namespace l2s {

// Precondition or shape contract violated by the caller.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Configuration rejected during validation. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File could not be read, written or parsed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace internal {

template <typename... Args>
std::string StrCat(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace internal

template <typename E = ShapeError, typename... Args>
inline void Require(bool cond, const Args&... args) {
  if (!cond) throw E(internal::StrCat(args...));
}

}  // namespace l2s

#endif  // L2S_BASE_ERROR_H_
