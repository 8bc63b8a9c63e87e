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

#include "dlcm/metrics/negpair.h"

#include <map>

#include "dlcm/error.h"

namespace dlcm::metrics {
namespace {

void CheckRanking(std::span<const std::size_t> ranking, std::size_t n) {
  std::vector<bool> seen(n, false);
  if (ranking.size() != n) {
    throw ContractError("negpair: ranking length differs from document count");
  }
  for (std::size_t d : ranking) {
    if (d >= n || seen[d]) throw ContractError("negpair: ranking is not a permutation");
    seen[d] = true;
  }
}

}  // namespace

std::vector<std::size_t> NegativePairs(std::span<const std::size_t> ranking,
                                       std::span<const int> labels) {
  CheckRanking(ranking, labels.size());
  std::vector<std::size_t> np(labels.size(), 0);
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    const std::size_t d = ranking[r];
    for (std::size_t above = 0; above < r; ++above) {
      if (labels[ranking[above]] < labels[d]) ++np[d];
    }
  }
  return np;
}

NegPairQuery AnalyzeQuery(const data::QueryGroup& g,
                          std::span<const std::size_t> baseline_ranking,
                          std::span<const std::size_t> model_ranking) {
  return {g.query_id, g.labels, NegativePairs(baseline_ranking, g.labels),
          NegativePairs(model_ranking, g.labels)};
}

std::vector<GradeReduction> ReductionByGrade(std::span<const NegPairQuery> qs) {
  std::vector<GradeReduction> rows;
  for (int grade = data::kMinGrade; grade <= data::kMaxGrade; ++grade) {
    GradeReduction row;
    row.grade = grade;
    for (const auto& q : qs) {
      double reduction = 0.0, base = 0.0;
      std::size_t docs = 0;
      for (std::size_t d = 0; d < q.labels.size(); ++d) {
        if (q.labels[d] != grade) continue;
        reduction += double(q.baseline_np[d]) - double(q.model_np[d]);
        base += q.baseline_np[d];
        ++docs;
      }
      if (docs == 0) continue;
      row.mean_reduction += reduction / docs;
      row.mean_baseline_np += base / docs;
      ++row.queries;
    }
    if (row.queries > 0) {
      row.mean_reduction /= row.queries;
      row.mean_baseline_np /= row.queries;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<PerfectBucket> BucketByPerfectCount(std::span<const NegPairQuery> qs) {
  std::map<std::size_t, PerfectBucket> buckets;
  for (const auto& q : qs) {
    double reduction = 0.0, base = 0.0;
    std::size_t perfect = 0;
    for (std::size_t d = 0; d < q.labels.size(); ++d) {
      if (q.labels[d] != data::kMaxGrade) continue;
      reduction += double(q.baseline_np[d]) - double(q.model_np[d]);
      base += q.baseline_np[d];
      ++perfect;
    }
    if (perfect == 0) continue;
    PerfectBucket& b = buckets[perfect];
    b.perfect_docs = perfect;
    b.mean_reduction += reduction / perfect;
    b.mean_baseline_np += base / perfect;
    ++b.queries;
  }
  std::vector<PerfectBucket> out;
  for (auto& [count, b] : buckets) {
    b.mean_reduction /= b.queries;
    b.mean_baseline_np /= b.queries;
    b.proportion = ImprovementProportion(b.mean_reduction, b.mean_baseline_np);
    out.push_back(b);
  }
  return out;
}

double ImprovementProportion(double reduction, double baseline_np) {
  return baseline_np > 0.0 ? reduction / baseline_np : 0.0;
}

}  // namespace dlcm::metrics
