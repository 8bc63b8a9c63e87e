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

#include "dlcm/data/ranked_input.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dlcm/error.h"

namespace dlcm::data {

std::vector<int> RankedInput::labels() const {
  std::vector<int> out;
  out.reserve(order.size());
  for (std::size_t d : order) out.push_back(group->labels[d]);
  return out;
}

std::vector<std::size_t> StableDescendingOrder(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return idx;
}

RankedInput AssembleTopN(const QueryGroup& g, std::span<const double> scores,
                         std::size_t n) {
  if (scores.size() != g.num_docs()) {
    throw ContractError("query " + g.query_id + ": " +
                        std::to_string(scores.size()) + " scores for " +
                        std::to_string(g.num_docs()) + " documents");
  }
  if (n == 0) throw ContractError("list size n must be >= 1");
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw ContractError("query " + g.query_id + ": non-finite initial score");
    }
  }

  RankedInput r;
  r.group = &g;
  r.n = n;
  r.full_order = StableDescendingOrder(scores);
  const std::size_t keep = std::min(n, g.num_docs());
  r.order.assign(r.full_order.begin(), r.full_order.begin() + keep);
  r.pad_count = n - keep;
  for (std::size_t d : r.order) r.initial_scores.push_back(scores[d]);

  const std::size_t nf = g.num_features();
  r.inputs = grad::Array<float>({n, nf}, 0.0f);
  for (std::size_t slot = 0; slot < keep; ++slot) {
    std::copy_n(g.row(r.order[slot]), nf, &r.inputs.at(slot, 0));
  }
  return r;
}

}  // namespace dlcm::data
