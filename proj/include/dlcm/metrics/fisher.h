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

// Paired two-sided Fisher randomization (permutation) test.

#ifndef DLCM_METRICS_FISHER_H_
#define DLCM_METRICS_FISHER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "dlcm/metrics/metrics.h"

namespace dlcm::metrics {

inline constexpr std::size_t kDefaultPermutations = 100000;

// Observed statistic |mean(a) - mean(b)|. Every permutation swaps each
// query's (a_q, b_q) pair with probability 1/2; the p-value is
// (#{permuted >= observed} + 1) / (permutations + 1). Throws ContractError
// unless a and b have equal length >= 2.
double FisherRandomization(std::span<const double> a, std::span<const double> b,
                           std::size_t permutations = kDefaultPermutations,
                           std::uint64_t seed = 1);

// p-values of `model` against `baseline` for every metric@cutoff, attached
// as model.significance. The reports must cover the same queries and
// cutoffs (ContractError otherwise); queries are matched by id.
void AttachSignificance(EvalReport& model, const EvalReport& baseline,
                        const std::string& baseline_label,
                        std::size_t permutations = kDefaultPermutations,
                        std::uint64_t seed = 1);

}  // namespace dlcm::metrics

#endif  // DLCM_METRICS_FISHER_H_
