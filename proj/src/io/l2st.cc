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

#include "l2s/io/l2st.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "l2s/base/error.h"

namespace l2s::io {

namespace {

static_assert(std::endian::native == std::endian::little,
              "L2ST codec assumes a little-endian host");

constexpr char kMagic[4] = {'L', '2', 'S', 'T'};

void PutU32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t GetU32(std::string_view b, size_t pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<uint8_t>(b[pos + i])) << (8 * i);
  }
  return v;
}

}  // namespace

size_t FloatTensor::NumElements() const {
  if (dims.empty()) return 0;
  size_t n = 1;
  for (uint32_t d : dims) n *= d;
  return n;
}

std::string EncodeL2st(const FloatTensor& t) {
  Require(t.dims.size() <= 255, "L2ST supports at most 255 dims");
  Require(t.NumElements() == t.data.size(), "L2ST payload size ", t.data.size(),
          " does not match dims");
  std::string out(kMagic, 4);
  out.push_back(static_cast<char>(kL2stVersion));
  out.push_back(static_cast<char>(kL2stDtypeF32));
  out.push_back(static_cast<char>(t.dims.size()));
  for (uint32_t d : t.dims) PutU32(&out, d);
  const size_t header = out.size();
  out.resize(header + 4 * t.data.size());
  std::memcpy(out.data() + header, t.data.data(), 4 * t.data.size());
  return out;
}

FloatTensor DecodeL2st(std::string_view b) {
  Require<IoError>(b.size() >= 7 && std::memcmp(b.data(), kMagic, 4) == 0,
                   "not an L2ST stream");
  Require<IoError>(static_cast<uint8_t>(b[4]) == kL2stVersion,
                   "unsupported L2ST version ", static_cast<int>(b[4]));
  Require<IoError>(static_cast<uint8_t>(b[5]) == kL2stDtypeF32,
                   "unsupported L2ST dtype ", static_cast<int>(b[5]));
  const size_t ndim = static_cast<uint8_t>(b[6]);
  Require<IoError>(b.size() >= 7 + 4 * ndim, "truncated L2ST header");
  FloatTensor t;
  for (size_t i = 0; i < ndim; ++i) t.dims.push_back(GetU32(b, 7 + 4 * i));
  const size_t header = 7 + 4 * ndim;
  const size_t n = t.NumElements();
  Require<IoError>(b.size() == header + 4 * n, "L2ST payload length mismatch");
  t.data.resize(n);
  std::memcpy(t.data.data(), b.data() + header, 4 * n);
  return t;
}

void WriteL2st(const std::string& path, const FloatTensor& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require<IoError>(out.good(), "cannot write ", path);
  const std::string bytes = EncodeL2st(t);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  Require<IoError>(out.good(), "write failed: ", path);
}

FloatTensor ReadL2st(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require<IoError>(in.good(), "cannot open ", path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return DecodeL2st(bytes);
}

FloatTensor FromMat(const Mat& m) {
  FloatTensor t;
  t.dims = {static_cast<uint32_t>(m.rows()), static_cast<uint32_t>(m.cols())};
  t.data.resize(m.size());
  for (Index i = 0; i < m.size(); ++i) t.data[i] = static_cast<float>(m.data()[i]);
  return t;
}

Mat ToMat(const FloatTensor& t) {
  Require(!t.dims.empty(), "cannot view a 0-d tensor as a matrix");
  const Index rows = t.dims[0];
  const Index cols = rows == 0 ? 0 : static_cast<Index>(t.data.size()) / rows;
  Mat m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = t.data[i];
  return m;
}

}  // namespace l2s::io
