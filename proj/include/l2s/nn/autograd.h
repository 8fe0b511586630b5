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

#ifndef L2S_NN_AUTOGRAD_H_
#define L2S_NN_AUTOGRAD_H_

#include <functional>
#include <memory>
#include <vector>

#include "l2s/base/matrix.h"

namespace l2s::nn {

// One value in a reverse-mode graph. A node that does not require gradients
// keeps no parents, so inference builds no graph.
struct Node {
  Mat value;
  Mat grad;  // empty until something flows into it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  Mat& Grad() {
    if (grad.size() == 0) grad = Mat::Zero(value.rows(), value.cols());
    return grad;
  }
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Var Constant(Mat value);
  // A leaf that accumulates gradients (a trainable weight).
  static Var Leaf(Mat value);

  bool defined() const { return node_ != nullptr; }
  const Mat& value() const { return node_->value; }
  Mat& mutable_value() { return node_->value; }
  bool has_grad() const { return node_->grad.size() != 0; }
  const Mat& grad() const { return node_->grad; }
  void ZeroGrad() { node_->grad.resize(0, 0); }
  bool requires_grad() const { return node_->requires_grad; }
  Index rows() const { return node_->value.rows(); }
  Index cols() const { return node_->value.cols(); }
  double scalar() const { return node_->value(0, 0); }

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& shared() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

using BackwardFn = std::function<void(Node& self)>;

// Creates the result of an operation. `backward` receives the result node,
// whose grad is filled, and must accumulate into self.parents[i]->Grad() in
// the order the parents were given.
Var MakeOp(Mat value, const std::vector<Var>& parents, BackwardFn backward);

// Seeds d(root)/d(root) = 1 for a 1x1 root and propagates to every leaf.
void Backward(const Var& root);

}  // namespace l2s::nn

#endif  // L2S_NN_AUTOGRAD_H_
