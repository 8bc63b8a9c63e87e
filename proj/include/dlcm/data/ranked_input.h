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

#ifndef DLCM_DATA_RANKED_INPUT_H_
#define DLCM_DATA_RANKED_INPUT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "dlcm/data/letor.h"
#include "dlcm/gradcore/array.h"

namespace dlcm::data {

// The top-n slice of a query's initial ranking, ready to feed a re-ranker.
//
// Slot i (0-based) holds the document at initial rank i + 1. The first
// num_real() slots are real documents; the remaining pad_count slots are
// zero vectors. Re-rankers consume slots in reverse, so padding enters the
// recurrent encoder first. Padding never reaches a loss or a final ranking.
//
// `group` is borrowed and must outlive this object.
struct RankedInput {
  const QueryGroup* group = nullptr;
  std::vector<std::size_t> order;       // doc indices of the real slots
  std::vector<std::size_t> full_order;  // every doc, initial ranking order
  std::vector<double> initial_scores;   // aligned with `order`
  std::size_t n = 0;
  std::size_t pad_count = 0;
  grad::Array<float> inputs;  // [n x num_features]

  std::size_t num_real() const { return order.size(); }
  // Labels of the real slots in slot order.
  std::vector<int> labels() const;
};

// Stable sort by score descending (ties keep file order), keep the top
// min(n, num_docs), zero-pad to n.
RankedInput AssembleTopN(const QueryGroup& g, std::span<const double> scores,
                         std::size_t n);

// Indices of `scores` sorted descending; ties resolved by ascending index.
std::vector<std::size_t> StableDescendingOrder(std::span<const double> scores);

}  // namespace dlcm::data

#endif  // DLCM_DATA_RANKED_INPUT_H_
