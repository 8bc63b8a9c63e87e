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

#ifndef DLCM_SRC_LOSSES_LOSS_INPUT_H_
#define DLCM_SRC_LOSSES_LOSS_INPUT_H_

#include <string>

#include "dlcm/error.h"
#include "dlcm/losses/losses.h"

namespace dlcm::losses::internal {

// Returns m after checking shapes and alignment.
template <typename T>
std::size_t CheckLossInput(const LossInput<T>& in, const char* who) {
  if (!in.scores.valid() || in.scores.shape().size() != 1) {
    throw ContractError(std::string(who) + ": scores must be a vector");
  }
  const std::size_t m = in.scores.size();
  if (m != in.labels.size() ||
      (!in.initial_rank.empty() && in.initial_rank.size() != m)) {
    throw ContractError(std::string(who) + ": " + std::to_string(m) +
                        " scores but " + std::to_string(in.labels.size()) +
                        " labels");
  }
  return m;
}

}  // namespace dlcm::losses::internal

#endif  // DLCM_SRC_LOSSES_LOSS_INPUT_H_
