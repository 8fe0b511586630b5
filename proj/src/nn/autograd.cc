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

#include "l2s/nn/autograd.h"

#include <unordered_set>
#include <utility>

#include "l2s/base/error.h"

namespace l2s::nn {

Var Var::Constant(Mat value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  return Var(std::move(n));
}

Var Var::Leaf(Mat value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = true;
  return Var(std::move(n));
}

Var MakeOp(Mat value, const std::vector<Var>& parents, BackwardFn backward) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  for (const Var& p : parents) {
    if (p.requires_grad()) {
      n->requires_grad = true;
      break;
    }
  }
  if (n->requires_grad) {
    n->parents.reserve(parents.size());
    for (const Var& p : parents) n->parents.push_back(p.shared());
    n->backward = std::move(backward);
  }
  return Var(std::move(n));
}

void Backward(const Var& root) {
  Require(root.rows() == 1 && root.cols() == 1, "backward needs a scalar root");
  if (!root.requires_grad()) return;
  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(root.node(), 0);
  seen.insert(root.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root.node()->Grad()(0, 0) += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && n->grad.size() != 0) n->backward(*n);
  }
}

}  // namespace l2s::nn
