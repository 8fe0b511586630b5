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

#ifndef L2S_BASE_MATRIX_H_
#define L2S_BASE_MATRIX_H_

#include <Eigen/Core>

namespace l2s {

// Row-major so that a [frames x features] matrix stores one frame contiguously.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVec = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using Index = Eigen::Index;

}  // namespace l2s

#endif  // L2S_BASE_MATRIX_H_
