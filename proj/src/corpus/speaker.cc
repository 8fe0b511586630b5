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

#include "l2s/corpus/speaker.h"

#include "l2s/base/error.h"
#include "l2s/base/random.h"

namespace l2s::corpus {

const char* GenderName(Gender g) { return g == Gender::kMale ? "male" : "female"; }

Gender ParseGender(const std::string& name) {
  if (name == "male") return Gender::kMale;
  if (name == "female") return Gender::kFemale;
  throw IoError("unknown gender '" + name + "'");
}

SyntheticSpeaker MakeSpeaker(uint64_t seed, Gender gender, int id) {
  Rng rng(HashSeeds({seed, static_cast<uint64_t>(gender)}));
  SyntheticSpeaker spk;
  spk.id = id;
  spk.gender = gender;
  const bool male = gender == Gender::kMale;
  std::uniform_real_distribution<double> f0(male ? kMaleF0Lo : kFemaleF0Lo,
                                            male ? kMaleF0Hi : kFemaleF0Hi);
  spk.f0_hz = f0(rng);
  std::uniform_real_distribution<double> timbre(kTimbreLo, kTimbreHi);
  for (double& t : spk.timbre) t = timbre(rng);
  spk.face_seed = rng();
  return spk;
}

}  // namespace l2s::corpus
