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

// SoftRank: scores are treated as means of independent Gaussians and each
// document's rank distribution is built by folding the other documents in
// one at a time,
//
//   p_j^(i)(r) = p_j^(i-1)(r-1) pi_ij + p_j^(i-1)(r) (1 - pi_ij).
//
// The recursion runs in double precision as a single graph node whose
// reverse pass replays the stored intermediate distributions.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <string>

#include "dlcm/error.h"
#include "dlcm/gradcore/ops.h"
#include "dlcm/losses/losses.h"
#include "loss_input.h"

namespace dlcm::losses {
namespace {

using grad::Array;
using grad::Tensor;

double Gain(int grade) { return std::exp2(grade) - 1.0; }
double Discount(std::size_t rank0) { return 1.0 / std::log2(rank0 + 2.0); }

void CheckSigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ContractError("softrank: sigma must be positive, got " +
                        std::to_string(sigma));
  }
}

std::vector<std::size_t> ResolveFold(std::span<const std::size_t> fold,
                                     std::size_t m) {
  std::vector<std::size_t> out(m);
  if (fold.empty()) {
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  if (fold.size() != m) throw ContractError("softrank: fold order length");
  std::vector<bool> seen(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (fold[i] >= m || seen[fold[i]]) {
      throw ContractError("softrank: fold order is not a permutation");
    }
    seen[fold[i]] = true;
    out[i] = fold[i];
  }
  return out;
}

double IdealDcg(std::span<const int> labels) {
  std::vector<int> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double dcg = 0.0;
  for (std::size_t r = 0; r < sorted.size(); ++r) dcg += Gain(sorted[r]) * Discount(r);
  return dcg;
}

class RankDistributionTape {
 public:
  RankDistributionTape(std::vector<double> scores, double sigma,
                       std::vector<std::size_t> fold)
      : scores_(std::move(scores)), sigma_(sigma), fold_(std::move(fold)) {
    const std::size_t m = scores_.size();
    history_.resize(m);
    dist_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> p = {1.0};
      for (std::size_t i : fold_) {
        if (i == j) continue;
        const double pi = PairProbability(scores_[i], scores_[j], sigma_);
        std::vector<double> next(p.size() + 1, 0.0);
        for (std::size_t r = 0; r < p.size(); ++r) {
          next[r] += p[r] * (1.0 - pi);
          next[r + 1] += p[r] * pi;
        }
        history_[j].push_back(std::move(p));
        p = std::move(next);
      }
      dist_[j] = std::move(p);
    }
  }

  const std::vector<std::vector<double>>& distribution() const { return dist_; }

  // Maps d(loss)/d p[j][r] onto d(loss)/d scores.
  std::vector<double> Backward(
      const std::vector<std::vector<double>>& d_dist) const {
    const std::size_t m = scores_.size();
    const double scale = 1.0 / (sigma_ * std::numbers::sqrt2);
    std::vector<double> d_scores(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> d_next = d_dist[j];
      std::size_t step = history_[j].size();
      for (auto it = fold_.rbegin(); it != fold_.rend(); ++it) {
        const std::size_t i = *it;
        if (i == j) continue;
        const std::vector<double>& p = history_[j][--step];
        const double pi = PairProbability(scores_[i], scores_[j], sigma_);
        double d_pi = 0.0;
        std::vector<double> d_prev(p.size(), 0.0);
        for (std::size_t r = 0; r < p.size(); ++r) {
          d_pi += p[r] * (d_next[r + 1] - d_next[r]);
          d_prev[r] = d_next[r] * (1.0 - pi) + d_next[r + 1] * pi;
        }
        const double z = (scores_[i] - scores_[j]) * scale;
        const double dpi_ds =
            std::exp(-0.5 * z * z) * std::numbers::inv_sqrtpi / std::numbers::sqrt2 *
            scale;
        d_scores[i] += d_pi * dpi_ds;
        d_scores[j] -= d_pi * dpi_ds;
        d_next = std::move(d_prev);
      }
    }
    return d_scores;
  }

 private:
  std::vector<double> scores_;
  double sigma_;
  std::vector<std::size_t> fold_;
  // history_[j][t]: distribution of j before the t-th fold step.
  std::vector<std::vector<std::vector<double>>> history_;
  std::vector<std::vector<double>> dist_;
};

double ExpectedDcg(const std::vector<std::vector<double>>& dist,
                   std::span<const int> labels) {
  double edcg = 0.0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    double expected_discount = 0.0;
    for (std::size_t r = 0; r < dist[j].size(); ++r) {
      expected_discount += dist[j][r] * Discount(r);
    }
    edcg += Gain(labels[j]) * expected_discount;
  }
  return edcg;
}

std::vector<std::size_t> FoldFromInitialRank(
    std::span<const std::size_t> initial_rank, std::size_t m) {
  std::vector<std::size_t> fold(m);
  std::iota(fold.begin(), fold.end(), 0);
  if (!initial_rank.empty()) {
    std::stable_sort(fold.begin(), fold.end(), [&](std::size_t a, std::size_t b) {
      return initial_rank[a] < initial_rank[b];
    });
  }
  return fold;
}

}  // namespace

double PairProbability(double s_i, double s_j, double sigma) {
  // Phi(x) = erfc(-x / sqrt2) / 2 with x = (s_i - s_j) / (sigma sqrt2).
  return 0.5 * std::erfc(-(s_i - s_j) / (2.0 * sigma));
}

std::vector<std::vector<double>> RankDistribution(
    std::span<const double> scores, double sigma,
    std::span<const std::size_t> fold_order) {
  CheckSigma(sigma);
  RankDistributionTape tape({scores.begin(), scores.end()}, sigma,
                            ResolveFold(fold_order, scores.size()));
  return tape.distribution();
}

double ExpectedNdcg(std::span<const double> scores, std::span<const int> labels,
                    double sigma, std::span<const std::size_t> fold_order) {
  if (scores.size() != labels.size()) {
    throw ContractError("softrank: scores and labels differ in length");
  }
  const double ideal = IdealDcg(labels);
  if (ideal == 0.0) return 0.0;
  return ExpectedDcg(RankDistribution(scores, sigma, fold_order), labels) / ideal;
}

template <typename T>
Tensor<T> SoftRankLoss(const LossInput<T>& in, double sigma) {
  CheckSigma(sigma);
  const std::size_t m = internal::CheckLossInput(in, "softrank");
  const double ideal = IdealDcg(in.labels);
  const Array<T>& sv = in.scores.value();
  std::vector<double> scores(sv.data.begin(), sv.data.end());

  std::shared_ptr<const RankDistributionTape> tape;
  double loss = 0.0;
  if (ideal > 0.0) {
    tape = std::make_shared<const RankDistributionTape>(
        std::move(scores), sigma, FoldFromInitialRank(in.initial_rank, m));
    loss = -ExpectedDcg(tape->distribution(), in.labels) / ideal;
  }
  // With an all-zero ideal the loss is the constant 0 and nothing flows back.
  return in.scores.graph()->Record(
      grad::OpKind::kCustom, {in.scores}, Array<T>::Scalar(static_cast<T>(loss)),
      [tape, ideal, labels = in.labels](
          const Array<T>& go, const Array<T>&,
          const std::vector<const Array<T>*>&,
          const std::vector<Array<T>*>& gi) {
        if (!tape || !gi[0]) return;
        const double g = go.data[0];
        std::vector<std::vector<double>> d_dist(labels.size());
        for (std::size_t j = 0; j < labels.size(); ++j) {
          d_dist[j].resize(labels.size());
          for (std::size_t r = 0; r < labels.size(); ++r) {
            d_dist[j][r] = -g * Gain(labels[j]) * Discount(r) / ideal;
          }
        }
        const std::vector<double> ds = tape->Backward(d_dist);
        for (std::size_t i = 0; i < ds.size(); ++i) {
          gi[0]->data[i] += static_cast<T>(ds[i]);
        }
      });
}

template Tensor<float> SoftRankLoss(const LossInput<float>&, double);
template Tensor<double> SoftRankLoss(const LossInput<double>&, double);

}  // namespace dlcm::losses
