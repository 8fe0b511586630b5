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

#include "l2s/nn/conv_index.h"

#include "l2s/base/error.h"

namespace l2s::nn {

namespace {
int OutSize(int in, int k, int s, int p) { return (in + 2 * p - k) / s + 1; }
}  // namespace

int Conv2dGeometry::OutHeight() const { return OutSize(height, kernel_h, stride_h, pad_h); }
int Conv2dGeometry::OutWidth() const { return OutSize(width, kernel_w, stride_w, pad_w); }

ConvIndex Conv2dIndex(const Conv2dGeometry& g) {
  const int oh = g.OutHeight(), ow = g.OutWidth();
  Require(oh >= 1 && ow >= 1, "conv2d: kernel larger than padded input");
  ConvIndex idx;
  idx.taps = g.kernel_h * g.kernel_w;
  idx.out_rows = static_cast<Index>(g.batch) * oh * ow;
  idx.src.resize(static_cast<size_t>(idx.out_rows) * idx.taps);
  size_t k = 0;
  for (int n = 0; n < g.batch; ++n) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        for (int ky = 0; ky < g.kernel_h; ++ky) {
          for (int kx = 0; kx < g.kernel_w; ++kx) {
            int iy = y * g.stride_h + ky - g.pad_h;
            const int ix = x * g.stride_w + kx - g.pad_w;
            if (g.circular_h) iy = ((iy % g.height) + g.height) % g.height;
            const bool inside = iy >= 0 && iy < g.height && ix >= 0 && ix < g.width;
            idx.src[k++] = inside ? (n * g.height + iy) * g.width + ix : -1;
          }
        }
      }
    }
  }
  return idx;
}

int Conv3dGeometry::OutTime() const { return OutSize(time, kernel_t, stride_t, pad_t); }
int Conv3dGeometry::OutHeight() const { return OutSize(height, kernel_h, stride_h, pad_h); }
int Conv3dGeometry::OutWidth() const { return OutSize(width, kernel_w, stride_w, pad_w); }

ConvIndex Conv3dIndex(const Conv3dGeometry& g) {
  const int ot = g.OutTime(), oh = g.OutHeight(), ow = g.OutWidth();
  Require(ot >= 1 && oh >= 1 && ow >= 1, "conv3d: kernel larger than padded input");
  ConvIndex idx;
  idx.taps = g.kernel_t * g.kernel_h * g.kernel_w;
  idx.out_rows = static_cast<Index>(ot) * oh * ow;
  idx.src.resize(static_cast<size_t>(idx.out_rows) * idx.taps);
  size_t k = 0;
  for (int t = 0; t < ot; ++t) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        for (int kt = 0; kt < g.kernel_t; ++kt) {
          for (int ky = 0; ky < g.kernel_h; ++ky) {
            for (int kx = 0; kx < g.kernel_w; ++kx) {
              const int it = t * g.stride_t + kt - g.pad_t;
              const int iy = y * g.stride_h + ky - g.pad_h;
              const int ix = x * g.stride_w + kx - g.pad_w;
              const bool inside = it >= 0 && it < g.time && iy >= 0 && iy < g.height &&
                                  ix >= 0 && ix < g.width;
              idx.src[k++] = inside ? (it * g.height + iy) * g.width + ix : -1;
            }
          }
        }
      }
    }
  }
  return idx;
}

ConvIndex Conv1dSameIndex(int length, int kernel) {
  Require(kernel % 2 == 1, "conv1d: same padding needs an odd kernel");
  const int pad = kernel / 2;
  ConvIndex idx;
  idx.taps = kernel;
  idx.out_rows = length;
  idx.src.resize(static_cast<size_t>(length) * kernel);
  size_t k = 0;
  for (int t = 0; t < length; ++t) {
    for (int j = 0; j < kernel; ++j) {
      const int s = t + j - pad;
      idx.src[k++] = s >= 0 && s < length ? s : -1;
    }
  }
  return idx;
}

}  // namespace l2s::nn
