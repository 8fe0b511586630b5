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

#ifndef L2S_CORPUS_SPEAKER_H_
#define L2S_CORPUS_SPEAKER_H_

#include <array>
#include <cstdint>
#include <string>

namespace l2s::corpus {

enum class Gender { kMale = 0, kFemale = 1 };

const char* GenderName(Gender g);
Gender ParseGender(const std::string& name);

inline constexpr int kTimbreSize = 4;
inline constexpr double kMaleF0Lo = 100.0, kMaleF0Hi = 140.0;
inline constexpr double kFemaleF0Lo = 190.0, kFemaleF0Hi = 240.0;
// Range the face glyph normalizes f0 against.
inline constexpr double kGlyphF0Lo = 100.0, kGlyphF0Hi = 240.0;
inline constexpr double kTimbreLo = 0.3, kTimbreHi = 1.0;

struct SyntheticSpeaker {
  int id = 0;
  Gender gender = Gender::kMale;
  double f0_hz = 120.0;
  std::array<double, kTimbreSize> timbre{};
  uint64_t face_seed = 0;
};

// Deterministic in (seed, gender). f0 is uniform in the gender's band and
// timbre entries are uniform in [kTimbreLo, kTimbreHi].
SyntheticSpeaker MakeSpeaker(uint64_t seed, Gender gender, int id = 0);

}  // namespace l2s::corpus

#endif  // L2S_CORPUS_SPEAKER_H_
