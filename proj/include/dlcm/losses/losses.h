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

// Listwise training objectives over the scores of one query's real
// (unpadded) documents.

#ifndef DLCM_LOSSES_LOSSES_H_
#define DLCM_LOSSES_LOSSES_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "dlcm/gradcore/graph.h"

namespace dlcm::losses {

enum class LossKind { kListMle, kSoftRank, kAttRank };

const char* LossKindName(LossKind kind);
LossKind ParseLossKind(std::string_view name);  // ConfigError if unknown

inline constexpr double kDefaultSigma = 0.1;

struct LossOptions {
  double sigma = kDefaultSigma;  // SoftRank score noise
  bool attn_softmax = false;     // AttRank: softmax instead of psi for a^S
};

template <typename T>
struct LossInput {
  grad::Tensor<T> scores;               // [m]
  std::vector<int> labels;              // aligned with scores
  std::vector<std::size_t> initial_rank;  // 0-based; empty = index order
};

template <typename T>
grad::Tensor<T> ListMleLoss(const LossInput<T>& in);
template <typename T>
grad::Tensor<T> SoftRankLoss(const LossInput<T>& in, double sigma);
template <typename T>
grad::Tensor<T> AttRankLoss(const LossInput<T>& in, bool softmax_scores);

template <typename T>
grad::Tensor<T> ComputeLoss(LossKind kind, const LossInput<T>& in,
                            const LossOptions& options);

// Order in which ListMLE selects documents: grade descending, ties by
// initial rank.
std::vector<std::size_t> IdealOrder(std::span<const int> labels,
                                    std::span<const std::size_t> initial_rank);

// psi(x) = e^x for x > 0, else 0, normalised to sum 1 (all zeros when every
// value is non-positive).
std::vector<double> RectifiedAttention(std::span<const double> values);

// ---------------------------------------------------------------------------
// SoftRank kernels in double precision.

// Pr(S_i' > S_j') for independent S' ~ N(S, sigma^2).
double PairProbability(double s_i, double s_j, double sigma);

// p[j][r]: probability that document j lands at rank r (0-based). The other
// documents are folded in following `fold_order` (a permutation of 0..m-1);
// empty means index order.
std::vector<std::vector<double>> RankDistribution(
    std::span<const double> scores, double sigma,
    std::span<const std::size_t> fold_order = {});

// Sum_j Sum_r p_j(r) (2^y_j - 1) / log2(r + 2) divided by the ideal DCG of
// the labels; 0 when the ideal DCG is 0.
double ExpectedNdcg(std::span<const double> scores, std::span<const int> labels,
                    double sigma, std::span<const std::size_t> fold_order = {});

}  // namespace dlcm::losses

#endif  // DLCM_LOSSES_LOSSES_H_
