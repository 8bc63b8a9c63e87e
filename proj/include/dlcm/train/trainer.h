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

// Re-ranker training loop and checkpoint evaluation.
//
// Each iteration samples batch_size training lists uniformly with
// replacement, averages their losses, clips the global gradient norm and
// takes one SGD step. An epoch is ceil(#train / batch_size) iterations; when
// an epoch's mean loss exceeds the previous epoch's, the rate becomes
// lr0 * decay^(number of such increases). After every epoch the model is
// scored on the validation lists by NDCG@10 and the best parameters kept.

#ifndef DLCM_TRAIN_TRAINER_H_
#define DLCM_TRAIN_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "dlcm/data/ranked_input.h"
#include "dlcm/gradcore/array.h"
#include "dlcm/losses/losses.h"
#include "dlcm/metrics/metrics.h"
#include "dlcm/models/networks.h"
#include "dlcm/models/params.h"

namespace dlcm::train {

struct TrainConfig {
  models::ModelSpec model;
  losses::LossKind loss = losses::LossKind::kAttRank;
  losses::LossOptions loss_options;
  std::size_t batch_size = 256;
  double lr0 = 1.0;  // 0 is accepted and leaves the parameters untouched
  double decay = 0.8;
  double clip_norm = 5.0;
  std::size_t max_iters = 10000;
  // Stop after this many epochs without a validation improvement; 0 = never.
  std::size_t patience = 0;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  void Validate() const;  // ConfigError
};

struct EpochRecord {
  std::size_t epoch = 0;       // 1-based
  std::size_t iterations = 0;  // cumulative
  double mean_loss = 0.0;
  double lr = 0.0;             // rate used during the epoch
  std::size_t loss_increases = 0;  // after this epoch's comparison
  double valid_ndcg10 = 0.0;
  double max_clipped_norm = 0.0;  // largest global norm actually applied
  double seconds = 0.0;           // wall clock since training started
};

struct TrainResult {
  models::ParamSet<float> best_params;
  models::ParamSet<float> final_params;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_valid_ndcg10 = 0.0;
  std::size_t iterations = 0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// `initial` seeds the parameters (InitParams(config.model, seed) when empty).
// Throws NumericError naming the batch's query ids if a loss or gradient
// turns non-finite, and ConfigError on inconsistent inputs.
TrainResult Train(const TrainConfig& config,
                  std::span<const data::RankedInput> train_lists,
                  std::span<const data::RankedInput> valid_lists,
                  models::ParamSet<float> initial = {},
                  const EpochCallback& on_epoch = {});

// Loss of one list; when `grads` is non-null it receives d(loss)/d(param)
// in parameter order.
double ListLossAndGrad(const models::ModelSpec& spec, losses::LossKind kind,
                       const losses::LossOptions& options,
                       const models::ParamSet<float>& params,
                       const data::RankedInput& list,
                       std::vector<grad::Array<float>>* grads);

// Full-list ranking after re-ranking: the real top-n slots sorted by model
// score (ties keep initial order) followed by the untouched tail. Always a
// permutation of the query's documents (ContractError otherwise).
std::vector<std::size_t> RerankedOrder(const data::RankedInput& list,
                                       std::span<const double> model_scores);

std::vector<std::vector<std::size_t>> RerankAll(
    const models::ModelSpec& spec, const models::ParamSet<float>& params,
    std::span<const data::RankedInput> lists, std::size_t threads = 1);

// Metrics of the re-ranked full lists. ConfigError when the lists do not
// match the model's feature count or list size.
metrics::EvalReport EvaluateCheckpoint(
    const models::ModelSpec& spec, const models::ParamSet<float>& params,
    std::span<const data::RankedInput> lists,
    const std::vector<std::size_t>& cutoffs = metrics::kDefaultCutoffs,
    std::size_t threads = 1);

// Metrics of the initial rankings themselves.
metrics::EvalReport EvaluateInitial(
    std::span<const data::RankedInput> lists,
    const std::vector<std::size_t>& cutoffs = metrics::kDefaultCutoffs);

// epoch  loss  lr  valid_ndcg10  seconds
void WriteHistory(std::ostream& out, std::span<const EpochRecord> history);

}  // namespace dlcm::train

#endif  // DLCM_TRAIN_TRAINER_H_
