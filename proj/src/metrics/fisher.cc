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

#include "dlcm/metrics/fisher.h"

#include <cmath>
#include <map>
#include <vector>

#include "dlcm/error.h"
#include "dlcm/random.h"

namespace dlcm::metrics {

double FisherRandomization(std::span<const double> a, std::span<const double> b,
                           std::size_t permutations, std::uint64_t seed) {
  if (a.size() != b.size() || a.size() < 2) {
    throw ContractError("fisher: need two aligned samples of >= 2 queries");
  }
  if (permutations == 0) throw ContractError("fisher: zero permutations");
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  double observed = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    diff[q] = a[q] - b[q];
    observed += diff[q];
  }
  observed = std::abs(observed) / n;
  // Sums of permuted differences reorder floating-point additions, so a
  // permutation that reproduces the observed split can land a few ulps low.
  const double threshold = observed - 1e-12 * std::max(1.0, observed);

  Rng rng(seed);
  std::size_t extreme = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    double sum = 0.0;
    for (std::size_t q = 0; q < n; ++q) sum += CoinFlip(rng) ? -diff[q] : diff[q];
    if (std::abs(sum) / n >= threshold) ++extreme;
  }
  return (extreme + 1.0) / (permutations + 1.0);
}

void AttachSignificance(EvalReport& model, const EvalReport& baseline,
                        const std::string& baseline_label,
                        std::size_t permutations, std::uint64_t seed) {
  if (model.cutoffs != baseline.cutoffs) {
    throw ContractError("fisher: reports use different cutoffs");
  }
  std::map<std::string, const QueryMetrics*> base;
  for (const auto& q : baseline.per_query) base[q.query_id] = &q;
  if (base.size() != model.per_query.size()) {
    throw ContractError("fisher: reports cover different query sets");
  }
  std::vector<const QueryMetrics*> matched;
  for (const auto& q : model.per_query) {
    auto it = base.find(q.query_id);
    if (it == base.end()) {
      throw ContractError("fisher: query " + q.query_id +
                          " missing from baseline report");
    }
    matched.push_back(it->second);
  }
  Significance sig;
  sig.baseline = baseline_label;
  for (Metric m : {Metric::kNdcg, Metric::kErr}) {
    auto& out = m == Metric::kNdcg ? sig.ndcg_p : sig.err_p;
    for (std::size_t c = 0; c < model.cutoffs.size(); ++c) {
      std::vector<double> a, b;
      for (std::size_t q = 0; q < matched.size(); ++q) {
        a.push_back(model.per_query[q].values(m)[c]);
        b.push_back(matched[q]->values(m)[c]);
      }
      out.push_back(FisherRandomization(a, b, permutations,
                                        DeriveSeed(seed, (m == Metric::kErr ? 1000 : 0) + c)));
    }
  }
  model.significance = std::move(sig);
}

}  // namespace dlcm::metrics
