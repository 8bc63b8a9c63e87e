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

// Differentiable operations on graph tensors. All ops record a node on the
// graph that owns their inputs and return its handle.
//
// Broadcasting (binary elementwise ops only): the operands must have equal
// shapes, or one of them must hold a single element, or one of them (after
// dropping leading unit axes) must equal the trailing axes of the other.

#ifndef DLCM_GRADCORE_OPS_H_
#define DLCM_GRADCORE_OPS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "dlcm/gradcore/graph.h"

namespace dlcm::grad {

// Lower clamp applied to arguments of Log and ClampedReciprocal.
inline constexpr double kLogFloor = 1e-12;

// [m x k] . [k x n] -> [m x n].
template <typename T>
Tensor<T> MatMul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> Add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> Sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> Mul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> Sigmoid(const Tensor<T>& x);
template <typename T>
Tensor<T> Tanh(const Tensor<T>& x);
// x for x >= 0, e^x - 1 otherwise.
template <typename T>
Tensor<T> Elu(const Tensor<T>& x);
template <typename T>
Tensor<T> Exp(const Tensor<T>& x);
// log(max(x, 1e-12)); zero gradient where the clamp is active.
template <typename T>
Tensor<T> Log(const Tensor<T>& x);
template <typename T>
Tensor<T> Neg(const Tensor<T>& x);
// 1 / max(x, 1e-12); zero gradient where the clamp is active.
template <typename T>
Tensor<T> ClampedReciprocal(const Tensor<T>& x);

// Reductions remove `axis` from the shape.
template <typename T>
Tensor<T> Sum(const Tensor<T>& x, std::size_t axis);
template <typename T>
Tensor<T> SumAll(const Tensor<T>& x);
// Gradient flows to the first maximal element along the axis.
template <typename T>
Tensor<T> Max(const Tensor<T>& x, std::size_t axis);
template <typename T>
Tensor<T> SoftmaxLastAxis(const Tensor<T>& x);

template <typename T>
Tensor<T> Reshape(const Tensor<T>& x, Shape shape);
template <typename T>
Tensor<T> Concat(std::span<const Tensor<T>> parts, std::size_t axis);
// Gathers slices along axis 0: out[i] = x[indices[i]]. Repeats allowed.
template <typename T>
Tensor<T> Take(const Tensor<T>& x, std::span<const std::size_t> indices);
// Rows [begin, end) along axis 0.
template <typename T>
Tensor<T> Slice(const Tensor<T>& x, std::size_t begin, std::size_t end);

// Copies the value into a new constant (no gradient flows back).
template <typename T>
Tensor<T> Detach(const Tensor<T>& x);

// Composite helpers built from the primitives above.
template <typename T>
Tensor<T> Scale(const Tensor<T>& x, T factor);
template <typename T>
Tensor<T> AddScalar(const Tensor<T>& x, T c);
// Stabilised log(sum(exp(x))) over every element, shape [].
template <typename T>
Tensor<T> LogSumExp(const Tensor<T>& x);

}  // namespace dlcm::grad

#endif  // DLCM_GRADCORE_OPS_H_
