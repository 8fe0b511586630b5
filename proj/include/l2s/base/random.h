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

#ifndef L2S_BASE_RANDOM_H_
#define L2S_BASE_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace l2s {

// splitmix64 finalizer; used to derive independent per-item seeds.
inline uint64_t MixSeed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t HashSeeds(std::initializer_list<uint64_t> parts) {
  uint64_t h = 0x6a09e667f3bcc909ULL;
  for (uint64_t p : parts) h = MixSeed(h ^ MixSeed(p));
  return h;
}

using Rng = std::mt19937_64;

}  // namespace l2s

#endif  // L2S_BASE_RANDOM_H_
