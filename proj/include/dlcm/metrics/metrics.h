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

// Graded-relevance ranking metrics and per-query evaluation reports.
//
//   NDCG@k = DCG@k / ideal DCG@k,  DCG@k = sum_{r<=k} (2^g_r - 1) / log2(r+1)
//   ERR@k  = sum_{r<=k} R(g_r) / r * prod_{i<r} (1 - R(g_i)),
//            R(g) = (2^g - 1) / 2^4
//
// Lists shorter than k are truncated; an all-zero list scores 0.

#ifndef DLCM_METRICS_METRICS_H_
#define DLCM_METRICS_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dlcm/data/letor.h"

namespace dlcm::metrics {

inline const std::vector<std::size_t> kDefaultCutoffs = {1, 3, 5, 10};

double DcgAtK(std::span<const int> ranked_grades, std::size_t k);
double NdcgAtK(std::span<const int> ranked_grades, std::size_t k);
double ErrAtK(std::span<const int> ranked_grades, std::size_t k);

enum class Metric { kNdcg, kErr };
const char* MetricName(Metric m);

struct QueryMetrics {
  std::string query_id;
  std::vector<double> ndcg;  // aligned with EvalReport::cutoffs
  std::vector<double> err;

  const std::vector<double>& values(Metric m) const {
    return m == Metric::kNdcg ? ndcg : err;
  }
};

struct Significance {
  std::string baseline;  // label of the reference system
  std::vector<double> ndcg_p;
  std::vector<double> err_p;

  const std::vector<double>& values(Metric m) const {
    return m == Metric::kNdcg ? ndcg_p : err_p;
  }
};

struct EvalReport {
  std::vector<std::size_t> cutoffs = kDefaultCutoffs;
  std::vector<QueryMetrics> per_query;
  std::optional<Significance> significance;

  // Arithmetic mean over every query, one entry per cutoff.
  std::vector<double> Mean(Metric m) const;
  // Per-query values of one metric@cutoff column.
  std::vector<double> Column(Metric m, std::size_t cutoff_index) const;
  std::size_t CutoffIndex(std::size_t k) const;  // ConfigError if absent
};

// Metrics of one ranked grade list at every cutoff.
QueryMetrics MeasureQuery(const std::string& query_id,
                          std::span<const int> ranked_grades,
                          const std::vector<std::size_t>& cutoffs);

// Scores the rankings (document index permutations, one per group) at the
// given cutoffs. ContractError if a ranking is not a permutation.
EvalReport Evaluate(std::span<const data::QueryGroup> groups,
                    std::span<const std::vector<std::size_t>> rankings,
                    const std::vector<std::size_t>& cutoffs = kDefaultCutoffs);

// Ranking by score descending, ties by document index.
EvalReport EvaluateScores(std::span<const data::QueryGroup> groups,
                          const std::vector<std::vector<double>>& scores,
                          const std::vector<std::size_t>& cutoffs = kDefaultCutoffs);

}  // namespace dlcm::metrics

#endif  // DLCM_METRICS_METRICS_H_
