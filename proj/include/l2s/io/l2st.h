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

#ifndef L2S_IO_L2ST_H_
#define L2S_IO_L2ST_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "l2s/base/matrix.h"

namespace l2s::io {

// In-memory form of an "L2ST" file: row-major float32 payload with up to 255
// dimensions. On disk: "L2ST", version 0x01, dtype 0x01 (f32), ndim, ndim x u32
// little-endian dims, then the little-endian f32 payload.
struct FloatTensor {
  std::vector<uint32_t> dims;
  std::vector<float> data;

  size_t NumElements() const;
};

inline constexpr uint8_t kL2stVersion = 0x01;
inline constexpr uint8_t kL2stDtypeF32 = 0x01;

std::string EncodeL2st(const FloatTensor& t);
FloatTensor DecodeL2st(std::string_view bytes);

void WriteL2st(const std::string& path, const FloatTensor& t);
FloatTensor ReadL2st(const std::string& path);

// A matrix is stored as a 2-D tensor [rows, cols].
FloatTensor FromMat(const Mat& m);
// Collapses all trailing dims into columns: [d0, d1*d2*...].
Mat ToMat(const FloatTensor& t);

}  // namespace l2s::io

#endif  // L2S_IO_L2ST_H_
