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
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dlcm/data/ranked_input.h"
#include "dlcm/data/synthetic.h"
#include "dlcm/error.h"
#include "dlcm/models/linear_ranker.h"
#include "dlcm/models/networks.h"
#include "dlcm/train/trainer.h"

namespace dlcm::train {
namespace {

// A small context corpus with linear initial rankings, shared by the tests.
class TrainerTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data::SyntheticOptions o;
    o.num_queries = 120;
    o.docs_per_query = 15;
    o.num_features = 5;
    corpus_ = new data::DataSplit(data::SplitQueries(data::GenerateSynthetic(o)));
    ranker_ = new models::LinearRanker(models::TrainLinearRanker(corpus_->train, {}));
  }
  static void TearDownTestSuite() {
    delete corpus_;
    delete ranker_;
  }

  static std::vector<data::RankedInput> Lists(const std::vector<data::QueryGroup>& gs,
                                              std::size_t n) {
    std::vector<data::RankedInput> out;
    for (const auto& g : gs) out.push_back(data::AssembleTopN(g, ranker_->ScoreGroup(g), n));
    return out;
  }

  static TrainConfig Config(models::ModelKind kind = models::ModelKind::kDlcm) {
    TrainConfig c;
    c.model.kind = kind;
    c.model.num_features = 5;
    c.model.list_size = 10;
    c.model.k = 3;
    c.batch_size = 8;
    c.max_iters = 60;
    return c;
  }

  static data::DataSplit* corpus_;
  static models::LinearRanker* ranker_;
};

data::DataSplit* TrainerTest::corpus_ = nullptr;
models::LinearRanker* TrainerTest::ranker_ = nullptr;

TEST_F(TrainerTest, ZeroLearningRateLeavesParametersUntouched) {
  TrainConfig c = Config();
  c.lr0 = 0.0;
  c.max_iters = 20;
  const auto train = Lists(corpus_->train, 10), valid = Lists(corpus_->valid, 10);
  const TrainResult r = Train(c, train, valid);
  EXPECT_EQ(r.final_params, models::InitParams(c.model, c.seed));
  EXPECT_EQ(r.iterations, 20u);
}

TEST_F(TrainerTest, FixedSeedReproducesHistory) {
  for (losses::LossKind loss : {losses::LossKind::kAttRank, losses::LossKind::kListMle,
                                losses::LossKind::kSoftRank}) {
    TrainConfig c = Config();
    c.loss = loss;
    c.max_iters = 30;
    const auto train = Lists(corpus_->train, 10), valid = Lists(corpus_->valid, 10);
    const TrainResult a = Train(c, train, valid), b = Train(c, train, valid);
    ASSERT_EQ(a.history.size(), b.history.size());
    for (std::size_t e = 0; e < a.history.size(); ++e) {
      EXPECT_EQ(a.history[e].mean_loss, b.history[e].mean_loss);
      EXPECT_EQ(a.history[e].valid_ndcg10, b.history[e].valid_ndcg10);
      EXPECT_EQ(a.history[e].lr, b.history[e].lr);
    }
    EXPECT_EQ(a.final_params, b.final_params);
    EXPECT_EQ(a.best_params, b.best_params);
    c.seed = 2;
    EXPECT_NE(Train(c, train, valid).final_params, a.final_params);
  }
}

TEST_F(TrainerTest, ThreadCountDoesNotChangeTheResult) {
  TrainConfig c = Config();
  c.max_iters = 20;
  const auto train = Lists(corpus_->train, 10), valid = Lists(corpus_->valid, 10);
  const TrainResult one = Train(c, train, valid);
  c.threads = 3;
  EXPECT_EQ(Train(c, train, valid).final_params, one.final_params);
}

TEST_F(TrainerTest, LearningRateFollowsDecaySchedule) {
  TrainConfig c = Config();
  c.lr0 = 2.0;  // large enough to bounce
  // The rectified attention can zero every score's gradient at this rate.
  c.loss_options.attn_softmax = true;
  c.batch_size = 4;
  c.max_iters = 500;
  const auto train = Lists(corpus_->train, 10);
  const TrainResult r = Train(c, train, {});
  ASSERT_GT(r.history.size(), 5u);
  std::size_t prev_increases = 0;
  double prev_lr = c.lr0;
  for (std::size_t e = 0; e < r.history.size(); ++e) {
    const EpochRecord& h = r.history[e];
    EXPECT_DOUBLE_EQ(h.lr, c.lr0 * std::pow(c.decay, prev_increases));
    EXPECT_LE(h.lr, prev_lr);
    if (e > 0) {
      const bool rose = h.mean_loss > r.history[e - 1].mean_loss;
      EXPECT_EQ(h.loss_increases, prev_increases + (rose ? 1 : 0));
    }
    prev_increases = h.loss_increases;
    prev_lr = h.lr;
    // Epoch = ceil(72 / 4) = 18 iterations.
    EXPECT_EQ(h.iterations, std::min<std::size_t>(18 * (e + 1), 500));
  }
  EXPECT_GT(prev_increases, 0u);
}

TEST_F(TrainerTest, AppliedGradientNormIsBounded) {
  TrainConfig c = Config();
  c.clip_norm = 0.05;
  const auto train = Lists(corpus_->train, 10);
  const TrainResult r = Train(c, train, {});
  for (const auto& h : r.history) EXPECT_LE(h.max_clipped_norm, 0.05 + 1e-6);
  c.clip_norm = 5.0;
  for (const auto& h : Train(c, train, {}).history) EXPECT_LE(h.max_clipped_norm, 5.0 + 1e-6);
}

TEST_F(TrainerTest, ContextTrainingImprovesValidation) {
  TrainConfig c = Config();
  c.loss_options.attn_softmax = true;
  c.max_iters = 400;
  c.batch_size = 16;
  const auto train = Lists(corpus_->train, 10), valid = Lists(corpus_->valid, 10);
  const TrainResult r = Train(c, train, valid);
  const double initial = EvaluateInitial(valid).Mean(metrics::Metric::kNdcg).back();
  EXPECT_GT(r.best_valid_ndcg10, initial);
  EXPECT_EQ(EvaluateCheckpoint(c.model, r.best_params, valid, {10}).Mean(
                metrics::Metric::kNdcg)[0],
            r.best_valid_ndcg10);
}

TEST_F(TrainerTest, PatienceStopsEarly) {
  TrainConfig c = Config();
  c.lr0 = 0.0;  // validation never improves after the first epoch
  c.patience = 2;
  c.max_iters = 10000;
  const auto train = Lists(corpus_->train, 10), valid = Lists(corpus_->valid, 10);
  const TrainResult r = Train(c, train, valid);
  EXPECT_EQ(r.history.size(), 3u);
  EXPECT_EQ(r.best_epoch, 1u);
}

TEST_F(TrainerTest, NonFiniteLossNamesTheBatch) {
  TrainConfig c = Config();
  models::ParamSet<float> p = models::InitParams(c.model, 1);
  p.Get("v_phi").data[0] = std::numeric_limits<float>::quiet_NaN();
  const auto train = Lists(corpus_->train, 10);
  try {
    Train(c, train, {}, p);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("batch of queries ["), std::string::npos) << what;
    EXPECT_NE(what.find("iteration 1"), std::string::npos) << what;
  }
}

TEST_F(TrainerTest, InvalidConfigurations) {
  const auto train = Lists(corpus_->train, 10);
  TrainConfig c = Config();
  c.model.list_size = 12;
  EXPECT_THROW(Train(c, train, {}), ConfigError);
  c = Config();
  c.lr0 = -1;
  EXPECT_THROW(Train(c, train, {}), ConfigError);
  c = Config();
  c.batch_size = 0;
  EXPECT_THROW(Train(c, train, {}), ConfigError);
  EXPECT_THROW(Train(Config(), {}, {}), TrainingError);
}

TEST_F(TrainerTest, ReRankingIsAPermutationWithFixedTail) {
  const auto lists = Lists(corpus_->test, 10);
  const TrainConfig c = Config();
  const auto rankings = RerankAll(c.model, models::InitParams(c.model, 4), lists);
  for (std::size_t q = 0; q < lists.size(); ++q) {
    const auto& r = rankings[q];
    EXPECT_EQ(std::set<std::size_t>(r.begin(), r.end()).size(), lists[q].full_order.size());
    EXPECT_TRUE(std::equal(r.begin() + 10, r.end(), lists[q].full_order.begin() + 10));
    EXPECT_TRUE(std::is_permutation(r.begin(), r.begin() + 10, lists[q].order.begin()));
  }
}

TEST_F(TrainerTest, ScoresInInitialOrderReproduceTheBaseline) {
  const auto lists = Lists(corpus_->test, 10);
  TrainConfig c = Config();
  models::ParamSet<float> p = models::InitParams(c.model, 1);
  for (float& v : p.Get("v_phi").data) v = 0.0f;  // every score ties
  const metrics::EvalReport base = EvaluateInitial(lists);
  const metrics::EvalReport got = EvaluateCheckpoint(c.model, p, lists);
  ASSERT_EQ(got.per_query.size(), base.per_query.size());
  for (std::size_t q = 0; q < got.per_query.size(); ++q) {
    EXPECT_EQ(got.per_query[q].ndcg, base.per_query[q].ndcg);
    EXPECT_EQ(got.per_query[q].err, base.per_query[q].err);
  }
}

TEST_F(TrainerTest, ListSizeOneIsANoOp) {
  const auto lists = Lists(corpus_->test, 1);
  TrainConfig c = Config();
  c.model.list_size = 1;
  const auto rankings = RerankAll(c.model, models::InitParams(c.model, 1), lists);
  for (std::size_t q = 0; q < lists.size(); ++q) EXPECT_EQ(rankings[q], lists[q].full_order);
}

TEST_F(TrainerTest, LabelScoresGiveIdealWindow) {
  const auto lists = Lists(corpus_->test, 15);  // window holds every document
  for (const auto& l : lists) {
    std::vector<double> s;
    for (int y : l.labels()) s.push_back(y);
    const std::vector<std::size_t> r = RerankedOrder(l, s);
    std::vector<int> ranked;
    for (std::size_t d : r) ranked.push_back(l.group->labels[d]);
    const bool any_relevant = *std::max_element(ranked.begin(), ranked.end()) > 0;
    EXPECT_DOUBLE_EQ(metrics::NdcgAtK(ranked, 10), any_relevant ? 1.0 : 0.0);
  }
}

TEST_F(TrainerTest, EvaluateRejectsMismatchedModel) {
  const auto lists = Lists(corpus_->test, 10);
  TrainConfig c = Config();
  c.model.num_features = 6;
  try {
    EvaluateCheckpoint(c.model, models::InitParams(c.model, 1), lists);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("[10x6]"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("[10x5]"), std::string::npos) << e.what();
  }
}

TEST_F(TrainerTest, ListGradientsCoverEveryParameter) {
  const auto lists = Lists(corpus_->train, 10);
  for (auto kind : {models::ModelKind::kDnn, models::ModelKind::kLidnn,
                    models::ModelKind::kDlcm}) {
    TrainConfig c = Config(kind);
    const auto p = models::InitParams(c.model, 1);
    std::vector<grad::Array<float>> g;
    const double loss = ListLossAndGrad(c.model, c.loss, c.loss_options, p, lists[0], &g);
    EXPECT_TRUE(std::isfinite(loss));
    ASSERT_EQ(g.size(), p.size());
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g[i].shape, p[i].value.shape);
  }
}

TEST_F(TrainerTest, HistoryTable) {
  std::vector<EpochRecord> h(2);
  h[0].epoch = 1;
  h[0].mean_loss = 0.5;
  h[0].lr = 1.0;
  h[0].valid_ndcg10 = 0.25;
  h[1].epoch = 2;
  std::ostringstream out;
  WriteHistory(out, h);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "epoch\tloss\tlr\tvalid_ndcg10\tseconds");
  EXPECT_NE(out.str().find("1\t0.5\t1\t0.250000\t0.000\n"), std::string::npos) << out.str();
}

}  // namespace
}  // namespace dlcm::train
