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

#ifndef L2S_NN_CONV_INDEX_H_
#define L2S_NN_CONV_INDEX_H_

#include "l2s/nn/ops.h"

namespace l2s::nn {

// Geometry of a convolution over row-major feature maps whose rows enumerate
// (item, [time,] y, x) positions and whose columns are channels.
struct Conv2dGeometry {
  int batch = 1;
  int height = 1, width = 1;
  int kernel_h = 1, kernel_w = 1;
  int stride_h = 1, stride_w = 1;
  int pad_h = 0, pad_w = 0;
  bool circular_h = false;  // wrap along the height axis instead of zero padding

  int OutHeight() const;
  int OutWidth() const;
};

ConvIndex Conv2dIndex(const Conv2dGeometry& g);

// Single-channel-input style 3-D convolution over [time x height x width].
struct Conv3dGeometry {
  int time = 1, height = 1, width = 1;
  int kernel_t = 1, kernel_h = 1, kernel_w = 1;
  int stride_t = 1, stride_h = 1, stride_w = 1;
  int pad_t = 0, pad_h = 0, pad_w = 0;

  int OutTime() const;
  int OutHeight() const;
  int OutWidth() const;
};

ConvIndex Conv3dIndex(const Conv3dGeometry& g);

// "Same" 1-D convolution along rows with zero padding (odd kernels).
ConvIndex Conv1dSameIndex(int length, int kernel);

}  // namespace l2s::nn

#endif  // L2S_NN_CONV_INDEX_H_
