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

#ifndef L2S_NN_OPS_H_
#define L2S_NN_OPS_H_

#include <vector>

#include "l2s/nn/autograd.h"

namespace l2s::nn {

// Elementwise and broadcasting arithmetic.
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
Var Scale(const Var& a, double s);
Var AddRow(const Var& x, const Var& row);  // row: [1 x cols]
Var MulRow(const Var& x, const Var& row);

Var MatMul(const Var& a, const Var& b);
Var MatMulBT(const Var& a, const Var& b);  // a * b^T
Var Linear(const Var& x, const Var& w, const Var& b);  // x * w + b

// Activations.
Var Relu(const Var& x);
Var LeakyRelu(const Var& x, double slope);
Var Sigmoid(const Var& x);
Var Silu(const Var& x);
Var Softplus(const Var& x);
Var Exp(const Var& x);
// Gradient passes only where lo < x < hi.
Var Clamp(const Var& x, double lo, double hi);
// First half of the columns gated by the sigmoid of the second half.
Var Glu(const Var& x);
Var SoftmaxRows(const Var& x);
Var NormalizeRows(const Var& x);  // unit L2 norm per row

// Normalization. Statistics are biased (divide by n).
Var LayerNormRows(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-5);
// Per-column statistics over rows. Writes the batch mean/variance if asked.
Var BatchNormTrain(const Var& x, const Var& gamma, const Var& beta, double eps,
                   RowVec* batch_mean, RowVec* batch_var);
Var BatchNormEval(const Var& x, const Var& gamma, const Var& beta, const RowVec& mean,
                  const RowVec& var, double eps);

// Shape manipulation.
Var Transpose(const Var& x);
Var ConcatCols(const std::vector<Var>& xs);
Var ConcatRows(const std::vector<Var>& xs);
Var SliceRows(const Var& x, Index begin, Index count);
Var SliceCols(const Var& x, Index begin, Index count);
Var Reshape(const Var& x, Index rows, Index cols);  // row-major reinterpretation
Var RepeatRows(const Var& x, int times);            // row i -> rows [i*t, i*t+t)
Var TileRows(const Var& row, Index n);
Var GatherRows(const Var& x, const std::vector<int>& index);

// Reductions.
Var MeanRows(const Var& x);  // -> [1 x cols]
Var SumAll(const Var& x);    // -> [1 x 1]
Var MeanAll(const Var& x);

// Convolution as gather + GEMM. `src[o * taps + t]` is the input row feeding
// tap t of output row o, or -1 for padding. Weights are [taps*cin x cout].
struct ConvIndex {
  Index out_rows = 0;
  int taps = 0;
  std::vector<int> src;
};
Var GatherConv(const Var& x, const Var& w, const Var& b, const ConvIndex& index);

// "Same" depthwise convolution along rows: x [L x C], w [k x C], b [1 x C].
Var DepthwiseConv1d(const Var& x, const Var& w, const Var& b);

// Sum of |pred - target| over all cells; target is constant.
Var L1Sum(const Var& pred, const Mat& target);
// Mean cross-entropy of row-wise logits against integer labels.
Var CrossEntropy(const Var& logits, const std::vector<int>& labels);

}  // namespace l2s::nn

#endif  // L2S_NN_OPS_H_
