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

#include "dlcm/models/linear_ranker.h"

#include <algorithm>
#include <functional>
#include <numeric>

#include "dlcm/error.h"
#include "dlcm/random.h"

namespace dlcm::models {
namespace {

double PairMargin(std::span<const double> w, std::span<const float> better,
                  std::span<const float> worse) {
  double m = 0.0;
  for (std::size_t f = 0; f < w.size(); ++f) {
    m += w[f] * (static_cast<double>(better[f]) - worse[f]);
  }
  return m;
}

std::span<const float> Row(const data::QueryGroup& g, std::size_t d) {
  return {g.row(d), g.num_features()};
}

}  // namespace

double LinearRanker::Score(std::span<const float> x) const {
  if (x.size() != weights.size()) {
    throw ConfigError("linear ranker expects " +
                      std::to_string(weights.size()) + " features, got " +
                      std::to_string(x.size()));
  }
  double s = 0.0;
  for (std::size_t f = 0; f < x.size(); ++f) s += weights[f] * x[f];
  return s;
}

std::vector<double> LinearRanker::ScoreGroup(const data::QueryGroup& g) const {
  std::vector<double> out;
  out.reserve(g.num_docs());
  for (std::size_t d = 0; d < g.num_docs(); ++d) out.push_back(Score(Row(g, d)));
  return out;
}

data::ScoreMap LinearRanker::ScoreAll(
    std::span<const data::QueryGroup> groups) const {
  data::ScoreMap out;
  for (const auto& g : groups) out[g.query_id] = ScoreGroup(g);
  return out;
}

std::vector<double> HingePairGradient(std::span<const double> w,
                                      std::span<const float> better,
                                      std::span<const float> worse,
                                      double margin) {
  std::vector<double> grad(w.size(), 0.0);
  if (margin - PairMargin(w, better, worse) > 0.0) {
    for (std::size_t f = 0; f < w.size(); ++f) {
      grad[f] = -(static_cast<double>(better[f]) - worse[f]);
    }
  }
  return grad;
}

LinearRanker TrainLinearRanker(std::span<const data::QueryGroup> groups,
                               const LinearTrainOptions& options) {
  if (groups.empty()) throw TrainingError("no training queries");
  const std::size_t nf = groups[0].num_features();
  std::vector<std::size_t> usable;
  for (std::size_t q = 0; q < groups.size(); ++q) {
    const auto& labels = groups[q].labels;
    if (std::adjacent_find(labels.begin(), labels.end(),
                           std::not_equal_to<>()) != labels.end()) {
      usable.push_back(q);
    }
  }
  if (usable.empty()) {
    throw TrainingError("no label-discordant document pair in training data");
  }

  LinearRanker ranker{std::vector<double>(nf, 0.0)};
  Rng rng(options.seed);
  std::vector<std::size_t> others;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::vector<std::size_t> visit = usable;
    for (std::size_t i = visit.size(); i > 1; --i) {
      std::swap(visit[i - 1], visit[UniformIndex(rng, i)]);
    }
    for (std::size_t q : visit) {
      const data::QueryGroup& g = groups[q];
      for (std::size_t d = 0; d < g.num_docs(); ++d) {
        others.clear();
        for (std::size_t e = 0; e < g.num_docs(); ++e) {
          if (g.labels[e] != g.labels[d]) others.push_back(e);
        }
        if (others.empty()) continue;
        const std::size_t e = others[UniformIndex(rng, others.size())];
        const bool d_better = g.labels[d] > g.labels[e];
        const auto grad = HingePairGradient(ranker.weights,
                                            Row(g, d_better ? d : e),
                                            Row(g, d_better ? e : d),
                                            options.margin);
        for (std::size_t f = 0; f < nf; ++f) {
          ranker.weights[f] -= options.learning_rate * grad[f];
        }
      }
    }
  }
  return ranker;
}

double PairwiseHingeLoss(const LinearRanker& ranker,
                         std::span<const data::QueryGroup> groups,
                         double margin) {
  double total = 0.0;
  std::size_t pairs = 0;
  for (const auto& g : groups) {
    for (std::size_t a = 0; a < g.num_docs(); ++a) {
      for (std::size_t b = 0; b < g.num_docs(); ++b) {
        if (g.labels[a] <= g.labels[b]) continue;
        total += std::max(0.0, margin - PairMargin(ranker.weights, Row(g, a),
                                                   Row(g, b)));
        ++pairs;
      }
    }
  }
  return pairs ? total / pairs : 0.0;
}

}  // namespace dlcm::models
