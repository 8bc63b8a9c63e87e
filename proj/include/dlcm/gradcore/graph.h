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

// Reverse-mode differentiation tape.
//
// A Graph owns every node created during one forward pass. Nodes are appended
// in creation order, which is a topological order by construction: an op can
// only consume handles that already exist. backward() walks the tape once in
// reverse, so each node's rule runs exactly once and contributions from
// multiple consumers are summed into the node's gradient before it is used.
//
// Tensor is a lightweight handle (graph pointer + node id). It is only valid
// while its Graph is alive. Graphs are not thread-safe; use one per thread.

#ifndef DLCM_GRADCORE_GRAPH_H_
#define DLCM_GRADCORE_GRAPH_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dlcm/error.h"
#include "dlcm/gradcore/array.h"

namespace dlcm::grad {

enum class OpKind {
  kLeaf,
  kConstant,
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kSigmoid,
  kTanh,
  kElu,
  kExp,
  kLog,
  kNeg,
  kClampedReciprocal,
  kSum,
  kMax,
  kSoftmax,
  kReshape,
  kConcat,
  kTake,
  kCustom,
};

const char* OpName(OpKind kind);

template <typename T>
class Graph;

template <typename T>
class Tensor {
 public:
  Tensor() = default;

  bool valid() const { return graph_ != nullptr; }
  Graph<T>* graph() const { return graph_; }
  std::size_t id() const { return id_; }

  const Array<T>& value() const;
  const Shape& shape() const { return value().shape; }
  std::size_t size() const { return value().size(); }
  bool requires_grad() const;
  // Null until backward() has reached this node.
  const Array<T>* grad() const;
  // Value of a single-element tensor.
  T item() const;

 private:
  friend class Graph<T>;
  Tensor(Graph<T>* g, std::size_t id) : graph_(g), id_(id) {}

  Graph<T>* graph_ = nullptr;
  std::size_t id_ = 0;
};

template <typename T>
class Graph {
 public:
  // Backward rule of a recorded op. `input_grads[i]` is null when input i
  // does not require a gradient; otherwise the rule adds its contribution.
  using BackwardFn = std::function<void(
      const Array<T>& out_grad, const Array<T>& out_value,
      const std::vector<const Array<T>*>& input_values,
      const std::vector<Array<T>*>& input_grads)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Tensor<T> Leaf(Array<T> value, bool requires_grad = true);
  Tensor<T> Constant(Array<T> value);
  Tensor<T> Record(OpKind kind, std::vector<Tensor<T>> inputs, Array<T> value,
                   BackwardFn backward);

  // Populates grad() on every node that requires one with d(root)/d(node).
  // May be called once per graph.
  void Backward(const Tensor<T>& root);

  std::size_t num_nodes() const { return nodes_.size(); }
  OpKind kind(std::size_t id) const { return nodes_.at(id).kind; }
  const std::vector<std::size_t>& inputs(std::size_t id) const {
    return nodes_.at(id).inputs;
  }

 private:
  friend class Tensor<T>;

  struct Node {
    OpKind kind;
    std::vector<std::size_t> inputs;
    Array<T> value;
    bool requires_grad = false;
    std::optional<Array<T>> grad;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

template <typename T>
const Array<T>& Tensor<T>::value() const {
  return graph_->nodes_.at(id_).value;
}

template <typename T>
bool Tensor<T>::requires_grad() const {
  return graph_->nodes_.at(id_).requires_grad;
}

template <typename T>
const Array<T>* Tensor<T>::grad() const {
  const auto& g = graph_->nodes_.at(id_).grad;
  return g ? &*g : nullptr;
}

template <typename T>
T Tensor<T>::item() const {
  const Array<T>& v = value();
  if (v.size() != 1) {
    throw ContractError("item() on tensor of shape " + ShapeString(v.shape));
  }
  return v.data[0];
}

extern template class Graph<float>;
extern template class Graph<double>;
extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace dlcm::grad

#endif  // DLCM_GRADCORE_GRAPH_H_
