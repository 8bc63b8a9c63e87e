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

#include "dlcm/data/synthetic.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "dlcm/error.h"
#include "dlcm/random.h"

namespace dlcm::data {
namespace {

template <std::size_t N>
int CountAbove(double rho, const std::array<double, N>& thresholds) {
  int grade = 0;
  for (double t : thresholds) grade += rho > t ? 1 : 0;
  return grade;
}

constexpr std::array<double, 4> kContextThresholds = {0.5, 0.65, 0.75, 0.85};
constexpr std::array<double, 4> kLinearThresholds = {0.5, 0.62, 0.72, 0.82};

}  // namespace

std::vector<QueryGroup> GenerateSynthetic(const SyntheticOptions& o) {
  const std::size_t min_features =
      o.kind == SyntheticKind::kContext ? 2 : 3;
  if (o.num_features < min_features || o.docs_per_query == 0 ||
      o.num_queries == 0) {
    throw ContractError("synthetic corpus needs queries, docs and at least " +
                        std::to_string(min_features) + " features");
  }
  Rng rng(o.seed);
  std::vector<QueryGroup> groups;
  groups.reserve(o.num_queries);
  const std::size_t nd = o.docs_per_query, nf = o.num_features;
  for (std::size_t q = 0; q < o.num_queries; ++q) {
    QueryGroup g;
    g.query_id = "q" + std::to_string(q + 1);
    g.features = grad::Array<float>({nd, nf}, 0.0f);
    for (std::size_t d = 0; d < nd; ++d) {
      g.doc_ids.push_back(g.query_id + "-d" + std::to_string(d));
    }
    if (o.kind == SyntheticKind::kContext) {
      const double scale = std::exp(UniformIn(rng, std::log(0.5), std::log(2.0)));
      for (std::size_t d = 0; d < nd; ++d) {
        g.features.at(d, 0) = static_cast<float>(scale * Uniform01(rng));
        for (std::size_t f = 1; f < nf; ++f) {
          g.features.at(d, f) = static_cast<float>(Uniform01(rng));
        }
      }
      float top = g.features.at(0, 0);
      for (std::size_t d = 1; d < nd; ++d) top = std::max(top, g.features.at(d, 0));
      for (std::size_t d = 0; d < nd; ++d) {
        const double r = top > 0.0f ? g.features.at(d, 0) / double(top) : 0.0;
        const double v = g.features.at(d, 1);
        const double rho = 0.6 * (1.0 - std::abs(2.0 * r - 1.2) / 1.2) + 0.4 * v;
        g.labels.push_back(CountAbove(rho, kContextThresholds));
      }
    } else {
      for (std::size_t d = 0; d < nd; ++d) {
        for (std::size_t f = 0; f < nf; ++f) {
          g.features.at(d, f) = static_cast<float>(Uniform01(rng));
        }
        const double rho = 0.5 * g.features.at(d, 0) +
                           0.3 * g.features.at(d, 1) +
                           0.2 * g.features.at(d, 2);
        g.labels.push_back(CountAbove(rho, kLinearThresholds));
      }
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

DataSplit SplitQueries(const std::vector<QueryGroup>& groups,
                       double train_fraction, double valid_fraction) {
  if (train_fraction < 0 || valid_fraction < 0 ||
      train_fraction + valid_fraction > 1.0) {
    throw ContractError("invalid split fractions");
  }
  const std::size_t n = groups.size();
  const auto n_train = static_cast<std::size_t>(std::llround(n * train_fraction));
  const auto n_valid = static_cast<std::size_t>(std::llround(n * valid_fraction));
  DataSplit s;
  for (std::size_t i = 0; i < n; ++i) {
    auto& dst = i < n_train ? s.train : (i < n_train + n_valid ? s.valid : s.test);
    dst.push_back(groups[i]);
  }
  return s;
}

}  // namespace dlcm::data
