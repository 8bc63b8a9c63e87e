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

#ifndef DLCM_GRADCORE_CLIP_H_
#define DLCM_GRADCORE_CLIP_H_

#include <cmath>
#include <span>

#include "dlcm/error.h"
#include "dlcm/gradcore/array.h"

namespace dlcm::grad {

// sqrt of the sum of squares over every entry of every array.
template <typename T>
double GlobalNorm(std::span<const Array<T>> grads) {
  double sq = 0.0;
  for (const Array<T>& g : grads) {
    for (T v : g.data) sq += static_cast<double>(v) * static_cast<double>(v);
  }
  return std::sqrt(sq);
}

// Rescales all gradients in place by max_norm / norm when their global norm
// exceeds max_norm (a norm exactly equal to max_norm is left alone). Returns
// the norm measured before clipping.
template <typename T>
double GlobalNormClip(std::span<Array<T>> grads, double max_norm) {
  if (!(max_norm > 0.0)) throw ContractError("clip: max_norm must be > 0");
  const double norm = GlobalNorm(std::span<const Array<T>>(grads));
  if (norm > max_norm) {
    const double factor = max_norm / norm;
    for (Array<T>& g : grads) {
      for (T& v : g.data) v = static_cast<T>(v * factor);
    }
  }
  return norm;
}

}  // namespace dlcm::grad

#endif  // DLCM_GRADCORE_CLIP_H_
