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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "dlcm/error.h"
#include "dlcm/gradcore/ops.h"
#include "dlcm/losses/losses.h"
#include "dlcm/models/params.h"
#include "dlcm/random.h"
#include "gradcheck.h"

namespace dlcm::losses {
namespace {

using grad::Array;
using grad::Graph;
using grad::Tensor;

constexpr LossKind kAllLosses[] = {LossKind::kListMle, LossKind::kSoftRank,
                                   LossKind::kAttRank};

double LossValue(LossKind kind, const std::vector<double>& scores,
                 const std::vector<int>& labels,
                 std::vector<std::size_t> initial_rank = {}, LossOptions opt = {}) {
  Graph<double> g;
  LossInput<double> in{g.Leaf(Array<double>({scores.size()}, scores)), labels,
                       std::move(initial_rank)};
  return ComputeLoss(kind, in, opt).item();
}

std::vector<double> LossGrad(LossKind kind, const std::vector<double>& scores,
                             const std::vector<int>& labels, LossOptions opt = {}) {
  Graph<double> g;
  LossInput<double> in{g.Leaf(Array<double>({scores.size()}, scores)), labels, {}};
  Tensor<double> loss = ComputeLoss(kind, in, opt);
  g.Backward(loss);
  return in.scores.grad() ? in.scores.grad()->data : std::vector<double>(scores.size(), 0.0);
}

// Standard normal CDF by composite Simpson integration of the density
// from -12 to z; independent of the library's erfc path.
double NormalCdfByQuadrature(double z) {
  const double lo = -12.0;
  const int steps = 200000;
  const double h = (z - lo) / steps;
  auto pdf = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
  double acc = pdf(lo) + pdf(z);
  for (int i = 1; i < steps; ++i) acc += pdf(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

double Gaussian(Rng& rng) {
  // Box-Muller on the library's platform-stable uniform stream.
  const double u1 = 1.0 - Uniform01(rng), u2 = Uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// ---------------------------------------------------------------------------
// ListMLE

TEST(ListMleTest, UniformScoresGiveLogFactorial) {
  EXPECT_NEAR(LossValue(LossKind::kListMle, {0.3, 0.3, 0.3}, {2, 1, 0}),
              std::log(6.0), 1e-12);
}

TEST(ListMleTest, SaturatedScoresGiveZero) {
  EXPECT_LT(LossValue(LossKind::kListMle, {20.0, -20.0}, {4, 0}), 1e-8);
}

TEST(ListMleTest, TwoDocumentsMatchPermutationEnumeration) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = UniformIn(rng, -3, 3), b = UniformIn(rng, -3, 3);
    // Plackett-Luce probability of the ideal order (doc 1 first, label 3 > 1),
    // normalised over both permutations.
    const double p12 = std::exp(a) / (std::exp(a) + std::exp(b));
    const double p21 = std::exp(b) / (std::exp(a) + std::exp(b));
    EXPECT_NEAR(p12 + p21, 1.0, 1e-15);
    EXPECT_NEAR(LossValue(LossKind::kListMle, {b, a}, {1, 3}), -std::log(p12), 1e-12);
  }
}

TEST(ListMleTest, NonNegativeAndTiesFollowInitialRank) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> s(5);
    std::vector<int> y(5);
    for (auto& v : s) v = UniformIn(rng, -4, 4);
    for (auto& v : y) v = static_cast<int>(UniformIndex(rng, 3));
    EXPECT_GE(LossValue(LossKind::kListMle, s, y), 0.0);
  }
  EXPECT_EQ(IdealOrder(std::vector<int>{1, 2, 1}, {}), (std::vector<std::size_t>{1, 0, 2}));
  EXPECT_EQ(IdealOrder(std::vector<int>{1, 2, 1}, std::vector<std::size_t>{2, 0, 1}),
            (std::vector<std::size_t>{1, 2, 0}));
  // With tied labels the initial rank decides which document must come first.
  const double a = LossValue(LossKind::kListMle, {1.0, 0.0}, {1, 1}, {0, 1});
  const double b = LossValue(LossKind::kListMle, {1.0, 0.0}, {1, 1}, {1, 0});
  EXPECT_LT(a, b);
}

// ---------------------------------------------------------------------------
// SoftRank kernels

TEST(PairProbabilityTest, Examples) {
  EXPECT_EQ(PairProbability(0.7, 0.7, 0.1), 0.5);
  const double want = NormalCdfByQuadrature(1.0);
  EXPECT_NEAR(want, 0.8413447, 1e-7);
  EXPECT_NEAR(PairProbability(0.1 * std::sqrt(2.0), 0.0, 0.1), want, 1e-10);
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = UniformIn(rng, -2, 2), b = UniformIn(rng, -2, 2);
    const double sigma = UniformIn(rng, 0.01, 1.0);
    EXPECT_NEAR(PairProbability(a, b, sigma) + PairProbability(b, a, sigma), 1.0, 1e-12);
  }
}

TEST(RankDistributionTest, SmallCases) {
  const std::vector<double> one = {0.4};
  EXPECT_EQ(RankDistribution(one, 0.1), (std::vector<std::vector<double>>{{1.0}}));
  const std::vector<double> tie = {0.2, 0.2};
  const auto p = RankDistribution(tie, 0.1);
  EXPECT_EQ(p, (std::vector<std::vector<double>>{{0.5, 0.5}, {0.5, 0.5}}));

  const std::vector<double> s = {0.3, 0.1};
  const auto q = RankDistribution(s, 0.1);
  const double pi12 = PairProbability(0.3, 0.1, 0.1);
  EXPECT_NEAR(q[0][0], pi12, 1e-15);
  EXPECT_NEAR(q[0][1], 1.0 - pi12, 1e-15);
  EXPECT_NEAR(q[1][0], 1.0 - pi12, 1e-15);
}

TEST(RankDistributionTest, TwoDocumentsMatchSampling) {
  // Direct enumeration of both orderings by sampling the two Gaussians.
  const std::vector<double> s = {0.05, 0.0};
  const double sigma = 0.1;
  Rng rng(4);
  const int draws = 200000;
  int first = 0;
  for (int i = 0; i < draws; ++i) {
    first += s[0] + sigma * Gaussian(rng) > s[1] + sigma * Gaussian(rng);
  }
  const double freq = static_cast<double>(first) / draws;
  const double se = std::sqrt(freq * (1 - freq) / draws);
  EXPECT_NEAR(RankDistribution(s, sigma)[0][0], freq, 4 * se);
}

TEST(RankDistributionTest, RowsAreStochastic) {
  Rng rng(5);
  for (std::size_t m = 1; m <= 10; ++m) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> s(m);
      for (auto& v : s) v = UniformIn(rng, -1, 1);
      for (const auto& row : RankDistribution(s, UniformIn(rng, 0.01, 1.0))) {
        EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-9);
        for (double v : row) EXPECT_GE(v, 0.0);
      }
    }
  }
}

TEST(RankDistributionTest, ConcentratesAsNoiseVanishes) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> s(8);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = 0.1 * i + UniformIn(rng, 0, 0.05);
    std::shuffle(s.begin(), s.end(), rng);
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s[a] > s[b]; });
    const auto p = RankDistribution(s, 1e-4);
    for (std::size_t r = 0; r < order.size(); ++r) EXPECT_GE(p[order[r]][r], 1.0 - 1e-6);
  }
}

TEST(RankDistributionTest, FoldOrderMustBeAPermutation) {
  const std::vector<double> s = {0.1, 0.2, 0.3};
  EXPECT_THROW(RankDistribution(s, 0.1, std::vector<std::size_t>{0, 0, 1}), ContractError);
  EXPECT_THROW(RankDistribution(s, 0.1, std::vector<std::size_t>{0, 1}), ContractError);
}

// ---------------------------------------------------------------------------
// SoftRank loss

TEST(SoftRankTest, DegenerateCases) {
  EXPECT_EQ(LossValue(LossKind::kSoftRank, {0.3, -0.2, 0.9}, {0, 0, 0}), 0.0);
  for (double g : LossGrad(LossKind::kSoftRank, {0.3, -0.2, 0.9}, {0, 0, 0})) {
    EXPECT_EQ(g, 0.0);
  }
  EXPECT_NEAR(LossValue(LossKind::kSoftRank, {0.5}, {4}), -1.0, 1e-15);
}

TEST(SoftRankTest, TwoDocumentsMatchMonteCarlo) {
  const std::vector<double> s = {0.02, 0.1};
  const std::vector<int> y = {3, 1};
  const double sigma = 0.1;
  auto dcg = [&](std::size_t top, std::size_t bottom) {
    return (std::exp2(y[top]) - 1) + (std::exp2(y[bottom]) - 1) / std::log2(3.0);
  };
  const double ideal = dcg(0, 1);
  Rng rng(7);
  const int draws = 1000000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < draws; ++i) {
    const bool zero_first = s[0] + sigma * Gaussian(rng) > s[1] + sigma * Gaussian(rng);
    const double ndcg = (zero_first ? dcg(0, 1) : dcg(1, 0)) / ideal;
    sum += ndcg;
    sum_sq += ndcg * ndcg;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
  EXPECT_NEAR(-LossValue(LossKind::kSoftRank, s, y), mean, 3 * se);
  EXPECT_NEAR(ExpectedNdcg(s, y, sigma), mean, 3 * se);
}

TEST(SoftRankTest, ScoreGradientMatchesFiniteDifferences) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 2 + UniformIndex(rng, 5);
    models::ParamSet<float> p;
    Array<float> s({m});
    for (float& v : s.data) v = static_cast<float>(UniformIn(rng, -0.3, 0.3));
    p.Add("s", s);
    std::vector<int> y(m);
    for (auto& v : y) v = static_cast<int>(UniformIndex(rng, 5));
    y[0] = 2;
    auto r = testing::CheckParamGradients(
        p, [&]<typename T>(Graph<T>&, const std::vector<Tensor<T>>& b) {
          return SoftRankLoss(LossInput<T>{b[0], y, {}}, 0.1);
        });
    EXPECT_TRUE(r.ok()) << r.worst;
  }
}

// ---------------------------------------------------------------------------
// AttRank

TEST(AttRankTest, TargetAttention) {
  const std::vector<double> a = RectifiedAttention(std::vector<double>{2, 1, 0});
  const double e = std::exp(1.0), e2 = std::exp(2.0);
  EXPECT_NEAR(a[0], e2 / (e2 + e), 1e-12);
  EXPECT_NEAR(a[1], e / (e2 + e), 1e-12);
  EXPECT_EQ(a[2], 0.0);
  EXPECT_NEAR(a[0], 0.7311, 1e-4);
  EXPECT_EQ(RectifiedAttention(std::vector<double>{0, -1}), (std::vector<double>{0, 0}));
}

TEST(AttRankTest, MatchedDistributionsDriveLossToZero) {
  double prev = 1e300;
  for (double top : {2.0, 5.0, 10.0, 20.0}) {
    const double l = LossValue(LossKind::kAttRank, {top, 1.0}, {4, 0});
    EXPECT_LT(l, prev);
    prev = l;
  }
  EXPECT_LT(prev, 1e-7);
  EXPECT_EQ(LossValue(LossKind::kAttRank, {3.0, -1.0}, {4, 0}), 0.0);
}

TEST(AttRankTest, EqualScoresBestForEqualLabels) {
  for (double s : {0.5, 1.0, 3.0}) {
    const double centre = LossValue(LossKind::kAttRank, {s, s}, {1, 1});
    for (double delta : {0.01, 0.1, 0.4}) {
      EXPECT_LT(centre, LossValue(LossKind::kAttRank, {s + delta, s - delta}, {1, 1}));
    }
  }
}

TEST(AttRankTest, AllNonPositiveScoresUseZeroAttention) {
  // a^S = 0 everywhere: the clamped logs give -log(1e-12) per positive target.
  const double l = LossValue(LossKind::kAttRank, {-1.0, -2.0}, {1, 0});
  EXPECT_NEAR(l, -std::log(grad::kLogFloor), 1e-9);
}

TEST(AttRankTest, ScoreGradientAwayFromKink) {
  Rng rng(9);
  int checked = 0;
  for (bool softmax : {false, true}) {
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t m = 2 + UniformIndex(rng, 5);
      Array<float> s({m});
      bool near_kink = false;
      for (float& v : s.data) {
        v = static_cast<float>(UniformIn(rng, -1, 2));
        near_kink |= std::abs(v) < 0.05f;
      }
      if (near_kink) continue;
      std::vector<int> y(m);
      for (auto& v : y) v = static_cast<int>(UniformIndex(rng, 5));
      models::ParamSet<float> p;
      p.Add("s", s);
      auto r = testing::CheckParamGradients(
          p, [&]<typename T>(Graph<T>&, const std::vector<Tensor<T>>& b) {
            return AttRankLoss(LossInput<T>{b[0], y, {}}, softmax);
          });
      EXPECT_TRUE(r.ok()) << "softmax=" << softmax << " " << r.worst;
      ++checked;
    }
  }
  EXPECT_GE(checked, 40);
}

// ---------------------------------------------------------------------------
// Shared invariances

TEST(InvarianceTest, JointPermutation) {
  Rng rng(10);
  for (LossKind kind : kAllLosses) {
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t m = 5;
      std::vector<double> s(m);
      std::vector<int> y(m);
      for (auto& v : s) v = UniformIn(rng, 0.1, 2);
      for (auto& v : y) v = static_cast<int>(UniformIndex(rng, 3));
      std::vector<std::size_t> init(m), perm(m);
      std::iota(init.begin(), init.end(), 0);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<double> ps(m);
      std::vector<int> py(m);
      std::vector<std::size_t> pinit(m);
      for (std::size_t i = 0; i < m; ++i) {
        ps[i] = s[perm[i]];
        py[i] = y[perm[i]];
        pinit[i] = init[perm[i]];
      }
      // SoftRank folds documents in initial order, so the permuted input
      // carries its initial ranks too.
      EXPECT_NEAR(LossValue(kind, s, y, init), LossValue(kind, ps, py, pinit), 1e-12)
          << LossKindName(kind);
    }
  }
}

TEST(InvarianceTest, ShiftAffectsOnlyAttRank) {
  // psi equals softmax once every score is positive; the asymmetry shows
  // when the shift moves scores across zero.
  const std::vector<double> s = {-0.4, 1.2, -0.7, 0.9};
  const std::vector<int> y = {1, 3, 0, 2};
  std::vector<double> shifted = s;
  for (double& v : shifted) v += 0.75;
  EXPECT_NEAR(LossValue(LossKind::kListMle, s, y), LossValue(LossKind::kListMle, shifted, y),
              1e-12);
  EXPECT_NEAR(LossValue(LossKind::kSoftRank, s, y),
              LossValue(LossKind::kSoftRank, shifted, y), 1e-12);
  EXPECT_GT(std::abs(LossValue(LossKind::kAttRank, s, y) -
                     LossValue(LossKind::kAttRank, shifted, y)),
            1e-3);
}

TEST(LossInputTest, MisalignedInputIsContractError) {
  for (LossKind kind : kAllLosses) {
    EXPECT_THROW(LossValue(kind, {0.1, 0.2}, {1}), ContractError);
  }
  EXPECT_EQ(ParseLossKind("softrank"), LossKind::kSoftRank);
  EXPECT_THROW(ParseLossKind("lambda"), ConfigError);
}

}  // namespace
}  // namespace dlcm::losses
