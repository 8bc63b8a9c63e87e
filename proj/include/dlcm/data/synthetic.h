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

// Deterministic synthetic ranking corpora.
//
// kContext: each query draws a hidden scale M ~ logUniform[0.5, 2]. Feature 0
// is M * u with u ~ U(0, 1), feature 1 is v ~ U(0, 1) and the rest are U(0, 1)
// noise. The grade depends on r = x0 / max_q(x0), the document's feature-0
// value relative to the largest one in its query:
//
//   rho = 0.6 * (1 - |2r - 1.2| / 1.2) + 0.4 * v
//   grade = #{t in {0.5, 0.65, 0.75, 0.85} : rho > t}
//
// Relevance peaks at r = 0.6, so where the best documents sit on the raw x0
// axis moves with M, which no single global scorer can track.
//
// kGlobalLinear: all features U(0, 1); rho = 0.5 x0 + 0.3 x1 + 0.2 x2 and
// grade = #{t in {0.5, 0.62, 0.72, 0.82} : rho > t}.
//
// Both corpora are meant to be used without per-query normalization;
// min-max scaling would hand every scorer the query maximum directly.

#ifndef DLCM_DATA_SYNTHETIC_H_
#define DLCM_DATA_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dlcm/data/letor.h"

namespace dlcm::data {

enum class SyntheticKind { kContext, kGlobalLinear };

struct SyntheticOptions {
  SyntheticKind kind = SyntheticKind::kContext;
  std::size_t num_queries = 2000;
  std::size_t docs_per_query = 20;
  std::size_t num_features = 10;
  std::uint64_t seed = 1;
};

std::vector<QueryGroup> GenerateSynthetic(const SyntheticOptions& options);

struct DataSplit {
  std::vector<QueryGroup> train, valid, test;
};

// Contiguous split in query order: the first train_fraction of queries go to
// train, the next valid_fraction to valid, the rest to test.
DataSplit SplitQueries(const std::vector<QueryGroup>& groups,
                       double train_fraction = 0.6,
                       double valid_fraction = 0.2);

}  // namespace dlcm::data

#endif  // DLCM_DATA_SYNTHETIC_H_
