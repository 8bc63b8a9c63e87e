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

// Negative-pair analysis of a re-ranking against its baseline.
//
// NP(d) counts the documents ranked above d that carry a strictly lower
// grade. The reduction of d is NP_baseline(d) - NP_model(d). Per-grade
// figures average over the documents of that grade within each query first
// and then over the queries that have such documents.

#ifndef DLCM_METRICS_NEGPAIR_H_
#define DLCM_METRICS_NEGPAIR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dlcm/data/letor.h"

namespace dlcm::metrics {

// NP per document, indexed by document (not by rank).
std::vector<std::size_t> NegativePairs(std::span<const std::size_t> ranking,
                                       std::span<const int> labels);

struct NegPairQuery {
  std::string query_id;
  std::vector<int> labels;
  std::vector<std::size_t> baseline_np;  // per document
  std::vector<std::size_t> model_np;
};

// ContractError unless both rankings are permutations of the same documents.
NegPairQuery AnalyzeQuery(const data::QueryGroup& g,
                          std::span<const std::size_t> baseline_ranking,
                          std::span<const std::size_t> model_ranking);

struct GradeReduction {
  int grade = 0;
  std::size_t queries = 0;  // queries with at least one document of the grade
  double mean_reduction = 0.0;
  double mean_baseline_np = 0.0;
};

// One row per grade 0..4 (rows with zero queries included).
std::vector<GradeReduction> ReductionByGrade(std::span<const NegPairQuery> qs);

struct PerfectBucket {
  std::size_t perfect_docs = 0;  // number of grade-4 documents in the query
  std::size_t queries = 0;
  double mean_reduction = 0.0;    // over the grade-4 documents
  double mean_baseline_np = 0.0;
  double proportion = 0.0;        // ImprovementProportion of the two means
};

// Queries grouped by their grade-4 count, ascending; queries without a
// grade-4 document are left out.
std::vector<PerfectBucket> BucketByPerfectCount(std::span<const NegPairQuery> qs);

// reduction / baseline NP, 0 when the baseline has no negative pairs.
double ImprovementProportion(double reduction, double baseline_np);

}  // namespace dlcm::metrics

#endif  // DLCM_METRICS_NEGPAIR_H_
