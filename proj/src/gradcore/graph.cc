/*
 * Copyright 2026 The DLCM Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dlcm/gradcore/graph.h"

#include <cmath>
#include <utility>

namespace dlcm::grad {

const char* OpName(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kConstant: return "constant";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kTanh: return "tanh";
    case OpKind::kElu: return "elu";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kNeg: return "neg";
    case OpKind::kClampedReciprocal: return "clamped_reciprocal";
    case OpKind::kSum: return "sum";
    case OpKind::kMax: return "max";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kReshape: return "reshape";
    case OpKind::kConcat: return "concat";
    case OpKind::kTake: return "take";
    case OpKind::kCustom: return "custom";
  }
  return "?";
}

namespace {

template <typename T>
void CheckFinite(const Array<T>& a, OpKind kind, const char* what) {
  for (T v : a.data) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite ") + what + " in " +
                         OpName(kind) + " of shape " + ShapeString(a.shape));
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> Graph<T>::Leaf(Array<T> value, bool requires_grad) {
  CheckFinite(value, OpKind::kLeaf, "value");
  nodes_.push_back(Node{OpKind::kLeaf, {}, std::move(value), requires_grad,
                        std::nullopt, nullptr});
  return Tensor<T>(this, nodes_.size() - 1);
}

template <typename T>
Tensor<T> Graph<T>::Constant(Array<T> value) {
  CheckFinite(value, OpKind::kConstant, "value");
  nodes_.push_back(Node{OpKind::kConstant, {}, std::move(value), false,
                        std::nullopt, nullptr});
  return Tensor<T>(this, nodes_.size() - 1);
}

template <typename T>
Tensor<T> Graph<T>::Record(OpKind kind, std::vector<Tensor<T>> inputs,
                           Array<T> value, BackwardFn backward) {
  if (backward_done_) {
    throw ContractError("graph already differentiated; build a new one");
  }
  CheckFinite(value, kind, "value");
  Node node{kind, {}, std::move(value), false, std::nullopt, nullptr};
  node.inputs.reserve(inputs.size());
  for (const Tensor<T>& in : inputs) {
    if (in.graph_ != this) {
      throw ContractError(std::string(OpName(kind)) +
                          ": input belongs to another graph");
    }
    node.inputs.push_back(in.id_);
    node.requires_grad = node.requires_grad || nodes_[in.id_].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Tensor<T>(this, nodes_.size() - 1);
}

template <typename T>
void Graph<T>::Backward(const Tensor<T>& root) {
  if (root.graph_ != this) {
    throw ContractError("backward: root belongs to another graph");
  }
  if (backward_done_) {
    throw ContractError("backward: graph already differentiated");
  }
  Node& r = nodes_[root.id_];
  if (r.value.size() != 1) {
    throw ContractError("backward: root must be scalar, got shape " +
                        ShapeString(r.value.shape));
  }
  backward_done_ = true;
  if (!r.requires_grad) return;
  r.grad = Array<T>(r.value.shape, T{1});

  std::vector<const Array<T>*> in_values;
  std::vector<Array<T>*> in_grads;
  for (std::size_t id = root.id_ + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.requires_grad || !node.grad || !node.backward) continue;
    in_values.clear();
    in_grads.clear();
    for (std::size_t in : node.inputs) {
      Node& src = nodes_[in];
      in_values.push_back(&src.value);
      if (src.requires_grad) {
        if (!src.grad) src.grad = Array<T>(src.value.shape, T{0});
        in_grads.push_back(&*src.grad);
      } else {
        in_grads.push_back(nullptr);
      }
    }
    node.backward(*node.grad, node.value, in_values, in_grads);
    for (Array<T>* g : in_grads) {
      if (g) CheckFinite(*g, node.kind, "gradient");
    }
  }
}

template class Graph<float>;
template class Graph<double>;
template class Tensor<float>;
template class Tensor<double>;

}  // namespace dlcm::grad
