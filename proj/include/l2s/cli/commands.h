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

#ifndef L2S_CLI_COMMANDS_H_
#define L2S_CLI_COMMANDS_H_

#include <iosfwd>

namespace l2s::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

// Entry point of the lip2speech tool. Subcommands: make-data,
// train-identity, train-lip2speech, synthesize, vocode, evaluate.
// Returns kExitConfig on usage or config validation errors and kExitRuntime on
// any other failure.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace l2s::cli

#endif  // L2S_CLI_COMMANDS_H_
