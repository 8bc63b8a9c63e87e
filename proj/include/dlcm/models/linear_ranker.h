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

// Global linear ranker trained with a pairwise hinge loss; produces the
// initial ranking that the re-rankers refine.

#ifndef DLCM_MODELS_LINEAR_RANKER_H_
#define DLCM_MODELS_LINEAR_RANKER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dlcm/data/letor.h"
#include "dlcm/data/scores_file.h"

namespace dlcm::models {

struct LinearRanker {
  std::vector<double> weights;

  double Score(std::span<const float> x) const;
  std::vector<double> ScoreGroup(const data::QueryGroup& g) const;
  data::ScoreMap ScoreAll(std::span<const data::QueryGroup> groups) const;
};

struct LinearTrainOptions {
  std::size_t epochs = 20;
  double learning_rate = 0.01;
  double margin = 1.0;
  std::uint64_t seed = 1;
};

// SGD on max(0, margin - w.(x+ - x-)). Each epoch visits the queries in a
// seeded random order and pairs every document with one randomly chosen
// document of a different grade. Throws TrainingError when no query has two
// distinct grades.
LinearRanker TrainLinearRanker(std::span<const data::QueryGroup> groups,
                               const LinearTrainOptions& options);

// d/dw of the hinge for one (better, worse) pair; zero in the flat region.
std::vector<double> HingePairGradient(std::span<const double> w,
                                      std::span<const float> better,
                                      std::span<const float> worse,
                                      double margin);

// Mean hinge over every label-discordant pair of every query.
double PairwiseHingeLoss(const LinearRanker& ranker,
                         std::span<const data::QueryGroup> groups,
                         double margin);

}  // namespace dlcm::models

#endif  // DLCM_MODELS_LINEAR_RANKER_H_
