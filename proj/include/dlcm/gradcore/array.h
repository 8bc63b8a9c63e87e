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

#ifndef DLCM_GRADCORE_ARRAY_H_
#define DLCM_GRADCORE_ARRAY_H_

#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "dlcm/error.h"

namespace dlcm::grad {

// Extents of a dense row-major array. The empty shape denotes a scalar.
using Shape = std::vector<std::size_t>;

inline std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

inline std::string ShapeString(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

// Dense row-major storage: the value (or gradient) payload of a graph node.
template <typename T>
struct Array {
  Shape shape;
  std::vector<T> data;

  Array() = default;

  explicit Array(Shape s, T fill = T{})
      : shape(std::move(s)), data(NumElements(shape), fill) {
    CheckExtents();
  }

  Array(Shape s, std::vector<T> values)
      : shape(std::move(s)), data(std::move(values)) {
    CheckExtents();
    if (data.size() != NumElements(shape)) {
      throw DimensionError("array of shape " + ShapeString(shape) +
                           " given " + std::to_string(data.size()) +
                           " values");
    }
  }

  static Array Scalar(T v) { return Array(Shape{}, std::vector<T>{v}); }
  static Array Vector(std::initializer_list<T> v) {
    return Array(Shape{v.size()}, std::vector<T>(v));
  }
  static Array Matrix(std::size_t rows, std::size_t cols,
                      std::vector<T> values) {
    return Array(Shape{rows, cols}, std::move(values));
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }

  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  // Two-axis accessors; only valid on rank-2 arrays.
  T& at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
  const T& at(std::size_t r, std::size_t c) const {
    return data[r * shape[1] + c];
  }

  bool operator==(const Array&) const = default;

 private:
  void CheckExtents() const {
    for (std::size_t e : shape) {
      if (e == 0) {
        throw DimensionError("zero extent in shape " + ShapeString(shape));
      }
    }
  }
};

template <typename To, typename From>
Array<To> Cast(const Array<From>& a) {
  std::vector<To> out(a.data.begin(), a.data.end());
  return Array<To>(a.shape, std::move(out));
}

}  // namespace dlcm::grad

#endif  // DLCM_GRADCORE_ARRAY_H_
