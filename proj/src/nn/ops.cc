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

#include "l2s/nn/ops.h"

#include <algorithm>
#include <cmath>

#include "l2s/base/error.h"

namespace l2s::nn {

namespace {

void SameShape(const Var& a, const Var& b, const char* op) {
  Require(a.rows() == b.rows() && a.cols() == b.cols(), op, ": shape mismatch [",
          a.rows(), "x", a.cols(), "] vs [", b.rows(), "x", b.cols(), "]");
}

void IsRow(const Var& x, const Var& row, const char* op) {
  Require(row.rows() == 1 && row.cols() == x.cols(), op, ": expected a [1x", x.cols(),
          "] row, got [", row.rows(), "x", row.cols(), "]");
}

inline Mat& G(Node& self, size_t i) { return self.parents[i]->Grad(); }
inline bool NeedsGrad(const Node& self, size_t i) {
  return self.parents[i]->requires_grad;
}

template <typename F, typename D>
Var Unary(const Var& x, F f, D dfdx) {
  Mat y = x.value().unaryExpr(f);
  return MakeOp(std::move(y), {x}, [dfdx](Node& self) {
    const Mat& xv = self.parents[0]->value;
    G(self, 0).array() += self.grad.array() * xv.unaryExpr(dfdx).array();
  });
}

double SigmoidScalar(double v) {
  return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
}

}  // namespace

Var Add(const Var& a, const Var& b) {
  SameShape(a, b, "add");
  return MakeOp(a.value() + b.value(), {a, b}, [](Node& self) {
    if (NeedsGrad(self, 0)) G(self, 0) += self.grad;
    if (NeedsGrad(self, 1)) G(self, 1) += self.grad;
  });
}

Var Sub(const Var& a, const Var& b) {
  SameShape(a, b, "sub");
  return MakeOp(a.value() - b.value(), {a, b}, [](Node& self) {
    if (NeedsGrad(self, 0)) G(self, 0) += self.grad;
    if (NeedsGrad(self, 1)) G(self, 1) -= self.grad;
  });
}

Var Mul(const Var& a, const Var& b) {
  SameShape(a, b, "mul");
  return MakeOp(a.value().cwiseProduct(b.value()), {a, b}, [](Node& self) {
    const Mat& av = self.parents[0]->value;
    const Mat& bv = self.parents[1]->value;
    if (NeedsGrad(self, 0)) G(self, 0) += self.grad.cwiseProduct(bv);
    if (NeedsGrad(self, 1)) G(self, 1) += self.grad.cwiseProduct(av);
  });
}

Var Scale(const Var& a, double s) {
  return MakeOp(a.value() * s, {a}, [s](Node& self) { G(self, 0) += self.grad * s; });
}

Var AddRow(const Var& x, const Var& row) {
  IsRow(x, row, "add_row");
  Mat y = x.value().rowwise() + row.value().row(0);
  return MakeOp(std::move(y), {x, row}, [](Node& self) {
    if (NeedsGrad(self, 0)) G(self, 0) += self.grad;
    if (NeedsGrad(self, 1)) G(self, 1) += self.grad.colwise().sum();
  });
}

Var MulRow(const Var& x, const Var& row) {
  IsRow(x, row, "mul_row");
  Mat y = x.value().array().rowwise() * row.value().row(0).array();
  return MakeOp(std::move(y), {x, row}, [](Node& self) {
    const Mat& xv = self.parents[0]->value;
    const Mat& rv = self.parents[1]->value;
    if (NeedsGrad(self, 0)) {
      G(self, 0).array() += self.grad.array().rowwise() * rv.row(0).array();
    }
    if (NeedsGrad(self, 1)) G(self, 1) += self.grad.cwiseProduct(xv).colwise().sum();
  });
}

Var MatMul(const Var& a, const Var& b) {
  Require(a.cols() == b.rows(), "matmul: inner dims ", a.cols(), " vs ", b.rows());
  return MakeOp(a.value() * b.value(), {a, b}, [](Node& self) {
    const Mat& av = self.parents[0]->value;
    const Mat& bv = self.parents[1]->value;
    if (NeedsGrad(self, 0)) G(self, 0).noalias() += self.grad * bv.transpose();
    if (NeedsGrad(self, 1)) G(self, 1).noalias() += av.transpose() * self.grad;
  });
}

Var MatMulBT(const Var& a, const Var& b) {
  Require(a.cols() == b.cols(), "matmul_bt: inner dims ", a.cols(), " vs ", b.cols());
  return MakeOp(a.value() * b.value().transpose(), {a, b}, [](Node& self) {
    const Mat& av = self.parents[0]->value;
    const Mat& bv = self.parents[1]->value;
    if (NeedsGrad(self, 0)) G(self, 0).noalias() += self.grad * bv;
    if (NeedsGrad(self, 1)) G(self, 1).noalias() += self.grad.transpose() * av;
  });
}

Var Linear(const Var& x, const Var& w, const Var& b) {
  Require(x.cols() == w.rows(), "linear: input dim ", x.cols(), " vs weight ", w.rows());
  Require(b.rows() == 1 && b.cols() == w.cols(), "linear: bias shape");
  Mat y = x.value() * w.value();
  y.rowwise() += b.value().row(0);
  return MakeOp(std::move(y), {x, w, b}, [](Node& self) {
    const Mat& xv = self.parents[0]->value;
    const Mat& wv = self.parents[1]->value;
    if (NeedsGrad(self, 0)) G(self, 0).noalias() += self.grad * wv.transpose();
    if (NeedsGrad(self, 1)) G(self, 1).noalias() += xv.transpose() * self.grad;
    if (NeedsGrad(self, 2)) G(self, 2) += self.grad.colwise().sum();
  });
}

Var Relu(const Var& x) {
  return Unary(
      x, [](double v) { return v > 0 ? v : 0.0; },
      [](double v) { return v > 0 ? 1.0 : 0.0; });
}

Var LeakyRelu(const Var& x, double slope) {
  return Unary(
      x, [slope](double v) { return v > 0 ? v : slope * v; },
      [slope](double v) { return v > 0 ? 1.0 : slope; });
}

Var Sigmoid(const Var& x) {
  return Unary(x, SigmoidScalar, [](double v) {
    const double s = SigmoidScalar(v);
    return s * (1.0 - s);
  });
}

Var Silu(const Var& x) {
  return Unary(
      x, [](double v) { return v * SigmoidScalar(v); },
      [](double v) {
        const double s = SigmoidScalar(v);
        return s * (1.0 + v * (1.0 - s));
      });
}

Var Softplus(const Var& x) {
  return Unary(
      x, [](double v) { return v > 30 ? v : std::log1p(std::exp(v)); },
      SigmoidScalar);
}

Var Exp(const Var& x) {
  Mat y = x.value().array().exp().matrix();
  return MakeOp(y, {x}, [](Node& self) {
    G(self, 0).array() += self.grad.array() * self.value.array();
  });
}

Var Clamp(const Var& x, double lo, double hi) {
  return Unary(
      x, [lo, hi](double v) { return std::clamp(v, lo, hi); },
      [lo, hi](double v) { return v > lo && v < hi ? 1.0 : 0.0; });
}

Var Glu(const Var& x) {
  Require(x.cols() % 2 == 0, "glu: odd column count ", x.cols());
  const Index h = x.cols() / 2;
  const Mat gate = x.value().rightCols(h).unaryExpr(&SigmoidScalar);
  Mat y = x.value().leftCols(h).cwiseProduct(gate);
  return MakeOp(std::move(y), {x}, [h, gate](Node& self) {
    const Mat& xv = self.parents[0]->value;
    Mat& g = G(self, 0);
    g.leftCols(h) += self.grad.cwiseProduct(gate);
    g.rightCols(h).array() += self.grad.array() * xv.leftCols(h).array() *
                              gate.array() * (1.0 - gate.array());
  });
}

Var SoftmaxRows(const Var& x) {
  Mat y = x.value();
  for (Index r = 0; r < y.rows(); ++r) {
    const double m = y.row(r).maxCoeff();
    y.row(r) = (y.row(r).array() - m).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  return MakeOp(std::move(y), {x}, [](Node& self) {
    const Mat& yv = self.value;
    const Eigen::VectorXd dot = self.grad.cwiseProduct(yv).rowwise().sum();
    G(self, 0).array() += yv.array() * (self.grad.colwise() - dot).array();
  });
}

Var NormalizeRows(const Var& x) {
  const Eigen::VectorXd norms = x.value().rowwise().norm();
  Require(norms.minCoeff() > 0, "normalize_rows: zero-norm row");
  Mat y = x.value().array().colwise() / norms.array();
  return MakeOp(std::move(y), {x}, [norms](Node& self) {
    const Mat& yv = self.value;
    const Eigen::VectorXd dot = self.grad.cwiseProduct(yv).rowwise().sum();
    const Mat tangent = self.grad - (yv.array().colwise() * dot.array()).matrix();
    G(self, 0).array() += tangent.array().colwise() / norms.array();
  });
}

Var LayerNormRows(const Var& x, const Var& gamma, const Var& beta, double eps) {
  IsRow(x, gamma, "layer_norm");
  IsRow(x, beta, "layer_norm");
  const Index n = x.cols();
  const Mat& xv = x.value();
  const Eigen::VectorXd mean = xv.rowwise().mean();
  Mat xhat = xv.colwise() - mean;
  const Eigen::VectorXd inv_std =
      ((xhat.array().square().rowwise().sum() / n) + eps).rsqrt().matrix();
  xhat = xhat.array().colwise() * inv_std.array();
  Mat y = (xhat.array().rowwise() * gamma.value().row(0).array()).matrix();
  y.rowwise() += beta.value().row(0);
  return MakeOp(std::move(y), {x, gamma, beta}, [xhat, inv_std, n](Node& self) {
    const Mat& gv = self.parents[1]->value;
    if (NeedsGrad(self, 1)) G(self, 1) += self.grad.cwiseProduct(xhat).colwise().sum();
    if (NeedsGrad(self, 2)) G(self, 2) += self.grad.colwise().sum();
    if (NeedsGrad(self, 0)) {
      const Mat gx = self.grad.array().rowwise() * gv.row(0).array();
      const Eigen::VectorXd m1 = gx.rowwise().mean();
      const Eigen::VectorXd m2 = gx.cwiseProduct(xhat).rowwise().sum() / n;
      Mat d = gx.colwise() - m1;
      d -= (xhat.array().colwise() * m2.array()).matrix();
      G(self, 0).array() += d.array().colwise() * inv_std.array();
    }
  });
}

Var BatchNormTrain(const Var& x, const Var& gamma, const Var& beta, double eps,
                   RowVec* batch_mean, RowVec* batch_var) {
  IsRow(x, gamma, "batch_norm");
  IsRow(x, beta, "batch_norm");
  const Index n = x.rows();
  Require(n >= 1, "batch_norm: empty batch");
  const Mat& xv = x.value();
  const RowVec mean = xv.colwise().mean();
  Mat xhat = xv.rowwise() - mean;
  const RowVec var = xhat.array().square().colwise().sum().matrix() / n;
  const RowVec inv_std = (var.array() + eps).rsqrt().matrix();
  xhat = xhat.array().rowwise() * inv_std.array();
  if (batch_mean) *batch_mean = mean;
  if (batch_var) *batch_var = var;
  Mat y = (xhat.array().rowwise() * gamma.value().row(0).array()).matrix();
  y.rowwise() += beta.value().row(0);
  return MakeOp(std::move(y), {x, gamma, beta}, [xhat, inv_std, n](Node& self) {
    const Mat& gv = self.parents[1]->value;
    if (NeedsGrad(self, 1)) G(self, 1) += self.grad.cwiseProduct(xhat).colwise().sum();
    if (NeedsGrad(self, 2)) G(self, 2) += self.grad.colwise().sum();
    if (NeedsGrad(self, 0)) {
      const Mat gx = self.grad.array().rowwise() * gv.row(0).array();
      const RowVec m1 = gx.colwise().mean();
      const RowVec m2 = gx.cwiseProduct(xhat).colwise().sum() / n;
      Mat d = gx.rowwise() - m1;
      d -= (xhat.array().rowwise() * m2.array()).matrix();
      G(self, 0).array() += d.array().rowwise() * inv_std.array();
    }
  });
}

Var BatchNormEval(const Var& x, const Var& gamma, const Var& beta, const RowVec& mean,
                  const RowVec& var, double eps) {
  IsRow(x, gamma, "batch_norm");
  IsRow(x, beta, "batch_norm");
  const RowVec inv_std = (var.array() + eps).rsqrt().matrix();
  Mat xhat = (x.value().rowwise() - mean).array().rowwise() * inv_std.array();
  Mat y = (xhat.array().rowwise() * gamma.value().row(0).array()).matrix();
  y.rowwise() += beta.value().row(0);
  return MakeOp(std::move(y), {x, gamma, beta}, [xhat, inv_std](Node& self) {
    const Mat& gv = self.parents[1]->value;
    if (NeedsGrad(self, 1)) G(self, 1) += self.grad.cwiseProduct(xhat).colwise().sum();
    if (NeedsGrad(self, 2)) G(self, 2) += self.grad.colwise().sum();
    if (NeedsGrad(self, 0)) {
      G(self, 0).array() += self.grad.array().rowwise() *
                            (gv.row(0).array() * inv_std.array());
    }
  });
}

Var Transpose(const Var& x) {
  Mat y = x.value().transpose();
  return MakeOp(std::move(y), {x},
                [](Node& self) { G(self, 0) += self.grad.transpose(); });
}

Var ConcatCols(const std::vector<Var>& xs) {
  Require(!xs.empty(), "concat_cols: no inputs");
  Index cols = 0;
  for (const Var& v : xs) {
    Require(v.rows() == xs[0].rows(), "concat_cols: row mismatch");
    cols += v.cols();
  }
  Mat y(xs[0].rows(), cols);
  Index off = 0;
  for (const Var& v : xs) {
    y.middleCols(off, v.cols()) = v.value();
    off += v.cols();
  }
  return MakeOp(std::move(y), xs, [](Node& self) {
    Index off = 0;
    for (size_t i = 0; i < self.parents.size(); ++i) {
      const Index c = self.parents[i]->value.cols();
      if (NeedsGrad(self, i)) G(self, i) += self.grad.middleCols(off, c);
      off += c;
    }
  });
}

Var ConcatRows(const std::vector<Var>& xs) {
  Require(!xs.empty(), "concat_rows: no inputs");
  Index rows = 0;
  for (const Var& v : xs) {
    Require(v.cols() == xs[0].cols(), "concat_rows: column mismatch");
    rows += v.rows();
  }
  Mat y(rows, xs[0].cols());
  Index off = 0;
  for (const Var& v : xs) {
    y.middleRows(off, v.rows()) = v.value();
    off += v.rows();
  }
  return MakeOp(std::move(y), xs, [](Node& self) {
    Index off = 0;
    for (size_t i = 0; i < self.parents.size(); ++i) {
      const Index r = self.parents[i]->value.rows();
      if (NeedsGrad(self, i)) G(self, i) += self.grad.middleRows(off, r);
      off += r;
    }
  });
}

Var SliceRows(const Var& x, Index begin, Index count) {
  Require(begin >= 0 && count >= 0 && begin + count <= x.rows(), "slice_rows: range");
  Mat y = x.value().middleRows(begin, count);
  return MakeOp(std::move(y), {x}, [begin, count](Node& self) {
    G(self, 0).middleRows(begin, count) += self.grad;
  });
}

Var SliceCols(const Var& x, Index begin, Index count) {
  Require(begin >= 0 && count >= 0 && begin + count <= x.cols(), "slice_cols: range");
  Mat y = x.value().middleCols(begin, count);
  return MakeOp(std::move(y), {x}, [begin, count](Node& self) {
    G(self, 0).middleCols(begin, count) += self.grad;
  });
}

Var Reshape(const Var& x, Index rows, Index cols) {
  Require(rows * cols == x.value().size(), "reshape: element count mismatch");
  Mat y = Eigen::Map<const Mat>(x.value().data(), rows, cols);
  return MakeOp(std::move(y), {x}, [](Node& self) {
    Mat& g = G(self, 0);
    Eigen::Map<Mat>(g.data(), self.grad.rows(), self.grad.cols()) += self.grad;
  });
}

Var RepeatRows(const Var& x, int times) {
  Require(times >= 1, "repeat_rows: factor must be >= 1");
  Mat y(x.rows() * times, x.cols());
  for (Index r = 0; r < x.rows(); ++r) {
    for (int k = 0; k < times; ++k) y.row(r * times + k) = x.value().row(r);
  }
  return MakeOp(std::move(y), {x}, [times](Node& self) {
    Mat& g = G(self, 0);
    for (Index r = 0; r < g.rows(); ++r) {
      for (int k = 0; k < times; ++k) g.row(r) += self.grad.row(r * times + k);
    }
  });
}

Var TileRows(const Var& row, Index n) {
  Require(row.rows() == 1, "tile_rows: expected a single row");
  Mat y = row.value().replicate(n, 1);
  return MakeOp(std::move(y), {row},
                [](Node& self) { G(self, 0) += self.grad.colwise().sum(); });
}

Var GatherRows(const Var& x, const std::vector<int>& index) {
  Mat y(static_cast<Index>(index.size()), x.cols());
  for (size_t i = 0; i < index.size(); ++i) {
    Require(index[i] >= 0 && index[i] < x.rows(), "gather_rows: index out of range");
    y.row(i) = x.value().row(index[i]);
  }
  return MakeOp(std::move(y), {x}, [index](Node& self) {
    Mat& g = G(self, 0);
    for (size_t i = 0; i < index.size(); ++i) g.row(index[i]) += self.grad.row(i);
  });
}

Var MeanRows(const Var& x) {
  Require(x.rows() > 0, "mean_rows: empty input");
  Mat y = x.value().colwise().mean();
  return MakeOp(std::move(y), {x}, [](Node& self) {
    Mat& g = G(self, 0);
    g.rowwise() += self.grad.row(0) / static_cast<double>(g.rows());
  });
}

Var SumAll(const Var& x) {
  Mat y(1, 1);
  y(0, 0) = x.value().sum();
  return MakeOp(std::move(y), {x}, [](Node& self) {
    G(self, 0).array() += self.grad(0, 0);
  });
}

Var MeanAll(const Var& x) {
  Require(x.value().size() > 0, "mean_all: empty input");
  return Scale(SumAll(x), 1.0 / static_cast<double>(x.value().size()));
}

Var GatherConv(const Var& x, const Var& w, const Var& b, const ConvIndex& index) {
  const Index cin = x.cols();
  const int taps = index.taps;
  Require(w.rows() == taps * cin, "conv: weight rows ", w.rows(), " != taps*cin ",
          taps * cin);
  Require(b.rows() == 1 && b.cols() == w.cols(), "conv: bias shape");
  Require(static_cast<Index>(index.src.size()) == index.out_rows * taps,
          "conv: malformed index");
  auto col = std::make_shared<Mat>(index.out_rows, taps * cin);
  const Mat& xv = x.value();
  for (Index o = 0; o < index.out_rows; ++o) {
    const int* s = index.src.data() + o * taps;
    for (int t = 0; t < taps; ++t) {
      if (s[t] >= 0) {
        col->row(o).segment(t * cin, cin) = xv.row(s[t]);
      } else {
        col->row(o).segment(t * cin, cin).setZero();
      }
    }
  }
  Mat y = (*col) * w.value();
  y.rowwise() += b.value().row(0);
  return MakeOp(std::move(y), {x, w, b}, [col, taps, cin, src = index.src](Node& self) {
    const Mat& wv = self.parents[1]->value;
    if (NeedsGrad(self, 1)) G(self, 1).noalias() += col->transpose() * self.grad;
    if (NeedsGrad(self, 2)) G(self, 2) += self.grad.colwise().sum();
    if (NeedsGrad(self, 0)) {
      const Mat dcol = self.grad * wv.transpose();
      Mat& g = G(self, 0);
      const Index out_rows = dcol.rows();
      for (Index o = 0; o < out_rows; ++o) {
        const int* s = src.data() + o * taps;
        for (int t = 0; t < taps; ++t) {
          if (s[t] >= 0) g.row(s[t]) += dcol.row(o).segment(t * cin, cin);
        }
      }
    }
  });
}

Var DepthwiseConv1d(const Var& x, const Var& w, const Var& b) {
  const Index len = x.rows(), ch = x.cols(), k = w.rows();
  Require(w.cols() == ch && b.rows() == 1 && b.cols() == ch,
          "depthwise_conv1d: weight/bias shape");
  const Index pad = (k - 1) / 2;
  const Mat& xv = x.value();
  const Mat& wv = w.value();
  Mat y = b.value().replicate(len, 1);
  for (Index t = 0; t < len; ++t) {
    for (Index j = 0; j < k; ++j) {
      const Index s = t + j - pad;
      if (s >= 0 && s < len) y.row(t) += xv.row(s).cwiseProduct(wv.row(j));
    }
  }
  return MakeOp(std::move(y), {x, w, b}, [pad, k](Node& self) {
    const Mat& xv = self.parents[0]->value;
    const Mat& wv = self.parents[1]->value;
    const Index len = xv.rows();
    const bool gx = NeedsGrad(self, 0), gw = NeedsGrad(self, 1);
    for (Index t = 0; t < len; ++t) {
      for (Index j = 0; j < k; ++j) {
        const Index s = t + j - pad;
        if (s < 0 || s >= len) continue;
        if (gx) G(self, 0).row(s) += self.grad.row(t).cwiseProduct(wv.row(j));
        if (gw) G(self, 1).row(j) += self.grad.row(t).cwiseProduct(xv.row(s));
      }
    }
    if (NeedsGrad(self, 2)) G(self, 2) += self.grad.colwise().sum();
  });
}

Var L1Sum(const Var& pred, const Mat& target) {
  Require(pred.rows() == target.rows() && pred.cols() == target.cols(),
          "l1: shape mismatch [", pred.rows(), "x", pred.cols(), "] vs [",
          target.rows(), "x", target.cols(), "]");
  const Mat diff = pred.value() - target;
  Mat y(1, 1);
  y(0, 0) = diff.cwiseAbs().sum();
  return MakeOp(std::move(y), {pred}, [diff](Node& self) {
    const double g = self.grad(0, 0);
    G(self, 0).array() += g * diff.array().sign();
  });
}

Var CrossEntropy(const Var& logits, const std::vector<int>& labels) {
  const Index n = logits.rows(), c = logits.cols();
  Require(static_cast<Index>(labels.size()) == n, "cross_entropy: label count mismatch");
  Mat prob = logits.value();
  double loss = 0.0;
  for (Index r = 0; r < n; ++r) {
    Require(labels[r] >= 0 && labels[r] < c, "cross_entropy: label out of range");
    const double m = prob.row(r).maxCoeff();
    prob.row(r) = (prob.row(r).array() - m).exp().matrix();
    const double z = prob.row(r).sum();
    prob.row(r) /= z;
    loss -= logits.value()(r, labels[r]) - m - std::log(z);
  }
  Mat y(1, 1);
  y(0, 0) = loss / n;
  return MakeOp(std::move(y), {logits}, [prob, labels](Node& self) {
    const double g = self.grad(0, 0) / prob.rows();
    Mat d = prob;
    for (Index r = 0; r < d.rows(); ++r) d(r, labels[r]) -= 1.0;
    G(self, 0) += g * d;
  });
}

}  // namespace l2s::nn
