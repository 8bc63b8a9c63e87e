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

#include "dlcm/models/params.h"

#include <cmath>

namespace dlcm::models {

grad::Array<float> ScaledUniform(grad::Shape shape, std::size_t fan_in,
                                 Rng& rng) {
  grad::Array<float> out(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (float& v : out.data) {
    v = static_cast<float>(UniformIn(rng, -bound, bound));
  }
  return out;
}

}  // namespace dlcm::models
