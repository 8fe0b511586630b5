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

#include "l2s/io/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "l2s/base/error.h"

namespace l2s::io {

namespace {

void PutLe(std::string* out, uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t GetLe(const std::string& b, size_t pos, int bytes) {
  uint32_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= static_cast<uint32_t>(static_cast<uint8_t>(b[pos + i])) << (8 * i);
  }
  return v;
}

}  // namespace

void WriteWav(const std::string& path, const dsp::Waveform& wave) {
  const uint32_t n = static_cast<uint32_t>(wave.samples.size());
  const uint32_t sr = static_cast<uint32_t>(wave.sample_rate_hz);
  std::string b = "RIFF";
  PutLe(&b, 36 + 2 * n, 4);
  b += "WAVEfmt ";
  PutLe(&b, 16, 4);
  PutLe(&b, 1, 2);   // PCM
  PutLe(&b, 1, 2);   // mono
  PutLe(&b, sr, 4);
  PutLe(&b, 2 * sr, 4);
  PutLe(&b, 2, 2);
  PutLe(&b, 16, 2);
  b += "data";
  PutLe(&b, 2 * n, 4);
  for (double s : wave.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const auto q = static_cast<int16_t>(std::lround(c * 32767.0));
    PutLe(&b, static_cast<uint16_t>(q), 2);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require<IoError>(out.good(), "cannot write ", path);
  out.write(b.data(), static_cast<std::streamsize>(b.size()));
  Require<IoError>(out.good(), "write failed: ", path);
}

dsp::Waveform ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require<IoError>(in.good(), "cannot open ", path);
  std::string b((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Require<IoError>(b.size() >= 12 && b.compare(0, 4, "RIFF") == 0 &&
                       b.compare(8, 4, "WAVE") == 0,
                   path, ": not a RIFF/WAVE file");
  dsp::Waveform wave;
  bool have_fmt = false;
  size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::string id = b.substr(pos, 4);
    const uint32_t size = GetLe(b, pos + 4, 4);
    const size_t body = pos + 8;
    Require<IoError>(body + size <= b.size(), path, ": truncated chunk ", id);
    if (id == "fmt ") {
      Require<IoError>(size >= 16, path, ": short fmt chunk");
      const uint32_t format = GetLe(b, body, 2);
      const uint32_t channels = GetLe(b, body + 2, 2);
      const uint32_t bits = GetLe(b, body + 14, 2);
      Require<IoError>(format == 1 && channels == 1 && bits == 16, path,
                       ": only PCM16 mono is supported");
      wave.sample_rate_hz = static_cast<int>(GetLe(b, body + 4, 4));
      have_fmt = true;
    } else if (id == "data") {
      Require<IoError>(have_fmt, path, ": data chunk before fmt chunk");
      wave.samples.resize(size / 2);
      for (size_t i = 0; i < wave.samples.size(); ++i) {
        const auto q = static_cast<int16_t>(GetLe(b, body + 2 * i, 2));
        wave.samples[i] = q / 32767.0;
      }
      return wave;
    }
    pos = body + size + (size & 1);
  }
  throw IoError(path + ": no data chunk");
}

}  // namespace l2s::io
