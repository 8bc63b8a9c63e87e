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

#include "dlcm/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dlcm/data/ranked_input.h"
#include "dlcm/error.h"

namespace dlcm::metrics {
namespace {

void CheckCutoff(std::size_t k) {
  if (k == 0) throw ContractError("metric cutoff must be >= 1");
}

double Gain(int grade) { return std::exp2(grade) - 1.0; }

void CheckPermutation(const std::vector<std::size_t>& ranking, std::size_t n,
                      const std::string& qid) {
  std::vector<bool> seen(n, false);
  bool ok = ranking.size() == n;
  for (std::size_t d : ranking) {
    if (!ok) break;
    ok = d < n && !seen[d];
    if (ok) seen[d] = true;
  }
  if (!ok) throw ContractError("ranking of query " + qid + " is not a permutation");
}

}  // namespace

double DcgAtK(std::span<const int> ranked, std::size_t k) {
  CheckCutoff(k);
  double dcg = 0.0;
  const std::size_t depth = std::min(k, ranked.size());
  for (std::size_t r = 0; r < depth; ++r) {
    dcg += Gain(ranked[r]) / std::log2(r + 2.0);
  }
  return dcg;
}

double NdcgAtK(std::span<const int> ranked, std::size_t k) {
  std::vector<int> ideal(ranked.begin(), ranked.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double best = DcgAtK(ideal, k);
  return best > 0.0 ? DcgAtK(ranked, k) / best : 0.0;
}

double ErrAtK(std::span<const int> ranked, std::size_t k) {
  CheckCutoff(k);
  const double max_gain = std::exp2(data::kMaxGrade);
  double err = 0.0, not_stopped = 1.0;
  const std::size_t depth = std::min(k, ranked.size());
  for (std::size_t r = 0; r < depth; ++r) {
    const double stop = Gain(ranked[r]) / max_gain;
    err += not_stopped * stop / (r + 1.0);
    not_stopped *= 1.0 - stop;
  }
  return err;
}

const char* MetricName(Metric m) { return m == Metric::kNdcg ? "ndcg" : "err"; }

std::vector<double> EvalReport::Mean(Metric m) const {
  std::vector<double> mean(cutoffs.size(), 0.0);
  if (per_query.empty()) return mean;
  for (const auto& q : per_query) {
    for (std::size_t c = 0; c < cutoffs.size(); ++c) mean[c] += q.values(m)[c];
  }
  for (double& v : mean) v /= per_query.size();
  return mean;
}

std::vector<double> EvalReport::Column(Metric m, std::size_t c) const {
  std::vector<double> out;
  out.reserve(per_query.size());
  for (const auto& q : per_query) out.push_back(q.values(m).at(c));
  return out;
}

std::size_t EvalReport::CutoffIndex(std::size_t k) const {
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    if (cutoffs[c] == k) return c;
  }
  throw ConfigError("report has no cutoff " + std::to_string(k));
}

QueryMetrics MeasureQuery(const std::string& query_id,
                          std::span<const int> ranked,
                          const std::vector<std::size_t>& cutoffs) {
  QueryMetrics qm{query_id, {}, {}};
  for (std::size_t k : cutoffs) {
    qm.ndcg.push_back(NdcgAtK(ranked, k));
    qm.err.push_back(ErrAtK(ranked, k));
  }
  return qm;
}

EvalReport Evaluate(std::span<const data::QueryGroup> groups,
                    std::span<const std::vector<std::size_t>> rankings,
                    const std::vector<std::size_t>& cutoffs) {
  if (groups.size() != rankings.size()) {
    throw ContractError("evaluate: one ranking per query required");
  }
  for (std::size_t k : cutoffs) CheckCutoff(k);
  EvalReport report;
  report.cutoffs = cutoffs;
  report.per_query.reserve(groups.size());
  std::vector<int> ranked;
  for (std::size_t q = 0; q < groups.size(); ++q) {
    const auto& g = groups[q];
    CheckPermutation(rankings[q], g.num_docs(), g.query_id);
    ranked.clear();
    for (std::size_t d : rankings[q]) ranked.push_back(g.labels[d]);
    report.per_query.push_back(MeasureQuery(g.query_id, ranked, cutoffs));
  }
  return report;
}

EvalReport EvaluateScores(std::span<const data::QueryGroup> groups,
                          const std::vector<std::vector<double>>& scores,
                          const std::vector<std::size_t>& cutoffs) {
  if (groups.size() != scores.size()) {
    throw ContractError("evaluate: one score list per query required");
  }
  std::vector<std::vector<std::size_t>> rankings;
  rankings.reserve(groups.size());
  for (const auto& s : scores) rankings.push_back(data::StableDescendingOrder(s));
  return Evaluate(groups, rankings, cutoffs);
}

}  // namespace dlcm::metrics
