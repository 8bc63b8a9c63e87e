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

#include "dlcm/train/trainer.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

#include "dlcm/error.h"
#include "dlcm/gradcore/clip.h"
#include "dlcm/gradcore/ops.h"
#include "dlcm/random.h"

namespace dlcm::train {
namespace {

using grad::Array;
using models::ParamSet;

// Runs fn(i) for i in [0, count) on up to `threads` workers. Work is split
// in contiguous blocks; the first exception (by index) is rethrown.
template <typename Fn>
void ParallelFor(std::size_t count, std::size_t threads, const Fn& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  const std::size_t block = (count + threads - 1) / threads;
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w * block; i < std::min(count, (w + 1) * block); ++i) {
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void CheckList(const models::ModelSpec& spec, const data::RankedInput& list) {
  const grad::Shape want = {spec.list_size, spec.num_features};
  if (list.inputs.shape != want) {
    const std::string qid = list.group ? list.group->query_id : "?";
    throw ConfigError("query " + qid + ": model expects input " +
                      grad::ShapeString(want) + ", got " +
                      grad::ShapeString(list.inputs.shape));
  }
}

std::string QidList(std::span<const data::RankedInput> lists,
                    std::span<const std::size_t> batch) {
  std::string out;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (i) out += ',';
    const auto* g = lists[batch[i]].group;
    out += g ? g->query_id : "?";
  }
  return out;
}

double MeanNdcg10(const metrics::EvalReport& r) {
  return r.Mean(metrics::Metric::kNdcg).at(0);
}

}  // namespace

void TrainConfig::Validate() const {
  model.Validate();
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (!(lr0 >= 0.0) || !std::isfinite(lr0)) {
    throw ConfigError("learning rate must be finite and >= 0");
  }
  if (!(decay > 0.0 && decay <= 1.0)) throw ConfigError("decay must be in (0, 1]");
  if (!(clip_norm > 0.0)) throw ConfigError("clip norm must be > 0");
  if (!(loss_options.sigma > 0.0)) throw ConfigError("sigma must be > 0");
  if (max_iters == 0) throw ConfigError("max_iters must be >= 1");
  if (threads == 0) throw ConfigError("threads must be >= 1");
}

double ListLossAndGrad(const models::ModelSpec& spec, losses::LossKind kind,
                       const losses::LossOptions& options,
                       const ParamSet<float>& params,
                       const data::RankedInput& list,
                       std::vector<Array<float>>* grads) {
  CheckList(spec, list);
  grad::Graph<float> g;
  const auto bound = models::Bind(g, params, grads != nullptr);
  const grad::Tensor<float> all = models::Score(g, spec, bound, list.inputs);
  losses::LossInput<float> in;
  // Padding sits below the real slots and never reaches the loss.
  in.scores = grad::Slice(all, 0, list.num_real());
  in.labels = list.labels();
  in.initial_rank.resize(list.num_real());
  std::iota(in.initial_rank.begin(), in.initial_rank.end(), 0);
  const grad::Tensor<float> loss = losses::ComputeLoss(kind, in, options);
  const double value = loss.item();
  if (!std::isfinite(value)) throw NumericError("non-finite loss");
  if (grads) {
    g.Backward(loss);
    *grads = models::CollectGrads(bound);
  }
  return value;
}

std::vector<std::size_t> RerankedOrder(const data::RankedInput& list,
                                       std::span<const double> model_scores) {
  const std::size_t real = list.num_real();
  if (model_scores.size() < real) {
    throw ContractError("rerank: fewer scores than real slots");
  }
  const std::vector<std::size_t> head =
      data::StableDescendingOrder(model_scores.first(real));
  std::vector<std::size_t> out;
  out.reserve(list.full_order.size());
  for (std::size_t slot : head) out.push_back(list.order[slot]);
  for (std::size_t i = real; i < list.full_order.size(); ++i) {
    out.push_back(list.full_order[i]);
  }
  // Re-ranking must neither add nor drop documents.
  std::vector<std::size_t> check = out;
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < check.size(); ++i) {
    if (check[i] != i || check.size() != list.group->num_docs()) {
      throw ContractError("rerank produced a non-permutation");
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> RerankAll(
    const models::ModelSpec& spec, const ParamSet<float>& params,
    std::span<const data::RankedInput> lists, std::size_t threads) {
  for (const auto& l : lists) CheckList(spec, l);
  std::vector<std::vector<std::size_t>> out(lists.size());
  ParallelFor(lists.size(), threads, [&](std::size_t i) {
    const std::vector<double> s = models::ScoreRankedList(spec, params, lists[i]);
    out[i] = RerankedOrder(lists[i], s);
  });
  return out;
}

namespace {

metrics::EvalReport ReportFromRankings(
    std::span<const data::RankedInput> lists,
    const std::vector<std::vector<std::size_t>>& rankings,
    const std::vector<std::size_t>& cutoffs) {
  metrics::EvalReport report;
  report.cutoffs = cutoffs;
  std::vector<int> grades;
  for (std::size_t q = 0; q < lists.size(); ++q) {
    const data::QueryGroup& g = *lists[q].group;
    grades.clear();
    for (std::size_t d : rankings[q]) grades.push_back(g.labels[d]);
    report.per_query.push_back(metrics::MeasureQuery(g.query_id, grades, cutoffs));
  }
  return report;
}

}  // namespace

metrics::EvalReport EvaluateCheckpoint(const models::ModelSpec& spec,
                                       const ParamSet<float>& params,
                                       std::span<const data::RankedInput> lists,
                                       const std::vector<std::size_t>& cutoffs,
                                       std::size_t threads) {
  return ReportFromRankings(lists, RerankAll(spec, params, lists, threads), cutoffs);
}

metrics::EvalReport EvaluateInitial(std::span<const data::RankedInput> lists,
                                    const std::vector<std::size_t>& cutoffs) {
  std::vector<std::vector<std::size_t>> rankings;
  for (const auto& l : lists) rankings.push_back(l.full_order);
  return ReportFromRankings(lists, rankings, cutoffs);
}

TrainResult Train(const TrainConfig& config,
                  std::span<const data::RankedInput> train_lists,
                  std::span<const data::RankedInput> valid_lists,
                  ParamSet<float> initial, const EpochCallback& on_epoch) {
  config.Validate();
  if (train_lists.empty()) throw TrainingError("no training lists");
  for (const auto& l : train_lists) CheckList(config.model, l);
  for (const auto& l : valid_lists) CheckList(config.model, l);

  ParamSet<float> params =
      initial.empty() ? models::InitParams(config.model, config.seed)
                      : std::move(initial);
  Rng rng(DeriveSeed(config.seed, 0x7261696e));  // batch sampling stream
  const std::size_t per_epoch =
      (train_lists.size() + config.batch_size - 1) / config.batch_size;
  const std::vector<std::size_t> cutoff10 = {10};
  const auto start = std::chrono::steady_clock::now();

  TrainResult result;
  result.best_valid_ndcg10 = -std::numeric_limits<double>::infinity();
  double lr = config.lr0;
  double previous_loss = std::numeric_limits<double>::quiet_NaN();
  std::size_t increases = 0, since_best = 0;
  std::vector<std::size_t> batch(config.batch_size);
  std::vector<double> batch_loss(config.batch_size);
  std::vector<std::vector<Array<float>>> batch_grads(config.batch_size);

  while (result.iterations < config.max_iters) {
    EpochRecord rec;
    rec.epoch = result.history.size() + 1;
    rec.lr = lr;
    double loss_sum = 0.0;
    std::size_t iters = 0;
    for (; iters < per_epoch && result.iterations < config.max_iters; ++iters) {
      for (auto& b : batch) b = UniformIndex(rng, train_lists.size());
      try {
        ParallelFor(batch.size(), config.threads, [&](std::size_t i) {
          batch_loss[i] =
              ListLossAndGrad(config.model, config.loss, config.loss_options,
                              params, train_lists[batch[i]], &batch_grads[i]);
        });
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " in batch of queries [" +
                           QidList(train_lists, batch) + "] at iteration " +
                           std::to_string(result.iterations + 1));
      }
      // Summed in batch order so the result does not depend on threading.
      std::vector<Array<float>> total = std::move(batch_grads[0]);
      double mean_loss = batch_loss[0];
      for (std::size_t i = 1; i < batch.size(); ++i) {
        mean_loss += batch_loss[i];
        for (std::size_t p = 0; p < total.size(); ++p) {
          auto& dst = total[p].data;
          const auto& src = batch_grads[i][p].data;
          for (std::size_t e = 0; e < dst.size(); ++e) dst[e] += src[e];
        }
      }
      mean_loss /= batch.size();
      const float inv = 1.0f / static_cast<float>(batch.size());
      for (auto& a : total) {
        for (float& v : a.data) v *= inv;
      }
      grad::GlobalNormClip(std::span<Array<float>>(total), config.clip_norm);
      rec.max_clipped_norm = std::max(
          rec.max_clipped_norm,
          grad::GlobalNorm(std::span<const Array<float>>(total)));
      if (lr > 0.0) {
        const float step = static_cast<float>(lr);
        for (std::size_t p = 0; p < total.size(); ++p) {
          auto& w = params[p].value.data;
          for (std::size_t e = 0; e < w.size(); ++e) w[e] -= step * total[p].data[e];
        }
      }
      loss_sum += mean_loss;
      ++result.iterations;
    }
    rec.iterations = result.iterations;
    rec.mean_loss = loss_sum / iters;
    if (!std::isnan(previous_loss) && rec.mean_loss > previous_loss) {
      ++increases;
      lr = config.lr0 * std::pow(config.decay, static_cast<double>(increases));
    }
    previous_loss = rec.mean_loss;
    rec.loss_increases = increases;

    rec.valid_ndcg10 =
        valid_lists.empty()
            ? 0.0
            : MeanNdcg10(EvaluateCheckpoint(config.model, params, valid_lists,
                                            cutoff10, config.threads));
    if (result.history.empty() || rec.valid_ndcg10 > result.best_valid_ndcg10) {
      result.best_valid_ndcg10 = rec.valid_ndcg10;
      result.best_params = params;
      result.best_epoch = rec.epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
    rec.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start).count();
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (config.patience > 0 && since_best >= config.patience) break;
  }
  result.final_params = std::move(params);
  return result;
}

void WriteHistory(std::ostream& out, std::span<const EpochRecord> history) {
  out << "epoch\tloss\tlr\tvalid_ndcg10\tseconds\n";
  char buf[160];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof(buf), "%zu\t%.9g\t%.9g\t%.6f\t%.3f\n", r.epoch,
                  r.mean_loss, r.lr, r.valid_ndcg10, r.seconds);
    out << buf;
  }
}

}  // namespace dlcm::train
