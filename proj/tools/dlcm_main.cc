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

// dlcm: command-line driver for the re-ranking pipeline.
//
//   dlcm synth    --kind context --out DIR
//   dlcm initial  --train F --valid F --test F --out DIR
//   dlcm train    --train F --valid F [--scores builtin|DIR] --out DIR
//   dlcm eval     --checkpoint F --data F [--scores ...] --out DIR
//   dlcm analyze  --baseline-run DIR --model-run DIR --data F --out DIR
//   dlcm sweep    --param n --range 10..60 --step 10 ... --out DIR
//
// Every flag can also be set through DLCM_<FLAG> (upper case, '-' -> '_').
// Exit status: 0 ok, 2 usage, 3 data error, 4 numeric failure.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dlcm/data/letor.h"
#include "dlcm/data/ranked_input.h"
#include "dlcm/data/scores_file.h"
#include "dlcm/data/synthetic.h"
#include "dlcm/error.h"
#include "dlcm/losses/losses.h"
#include "dlcm/metrics/fisher.h"
#include "dlcm/metrics/negpair.h"
#include "dlcm/metrics/report.h"
#include "dlcm/models/checkpoint.h"
#include "dlcm/models/linear_ranker.h"
#include "dlcm/models/networks.h"
#include "dlcm/train/trainer.h"
#include "manifest.h"

namespace fs = std::filesystem;

namespace dlcm::tools {
namespace {

enum ExitCode { kExitOk = 0, kExitInternal = 1, kExitUsage = 2, kExitData = 3,
                kExitNumeric = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr const char* kBuiltinScores = "builtin";

// ---------------------------------------------------------------------------
// Flag plumbing

void AttachEnvNames(CLI::App* app) {
  for (CLI::Option* o : app->get_options()) {
    std::string name = o->get_single_name();
    if (name.empty() || name == "help") continue;
    for (char& c : name) c = c == '-' ? '_' : static_cast<char>(std::toupper(c));
    o->envname("DLCM_" + name);
  }
}

void RecordFlags(const CLI::App* app, RunManifest& m) {
  for (const CLI::Option* o : app->get_options()) {
    const std::string& name = o->get_single_name();
    if (name.empty() || name == "help") continue;
    std::string value;
    if (o->count() > 0) {
      for (const std::string& r : o->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = o->get_default_str();
      if (value.empty() && o->get_type_size() == 0) value = "false";
    }
    m.SetConfig(name, value);
  }
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

// ---------------------------------------------------------------------------
// Data

struct Splits {
  std::vector<data::QueryGroup> train, valid, test;
  std::size_t num_features = 0;
};

// Loads the given splits (empty path = absent), widens them to a common
// feature count (at least `min_features`) and normalizes unless told not to.
Splits LoadSplits(const std::string& train, const std::string& valid,
                  const std::string& test, bool normalize, RunManifest& m,
                  std::size_t min_features = 0) {
  std::vector<std::pair<std::vector<data::QueryGroup>*, std::string>> files;
  Splits s;
  files.push_back({&s.train, train});
  files.push_back({&s.valid, valid});
  files.push_back({&s.test, test});
  std::vector<data::LetorData> parsed;
  std::size_t nf = min_features;
  for (auto& [dst, path] : files) {
    if (path.empty()) {
      parsed.emplace_back();
      continue;
    }
    parsed.push_back(data::ReadLetorFile(path));
    m.AddInput(path);
    if (parsed.back().clamped_labels > 0) {
      std::cerr << "warning: " << path << ": " << parsed.back().clamped_labels
                << " labels clamped into [0, 4]\n";
    }
    nf = std::max(nf, parsed.back().num_features);
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (files[i].second.empty()) continue;
    data::WidenFeatures(parsed[i], nf);
    *files[i].first = std::move(parsed[i].groups);
    if (normalize) data::NormalizeAll(*files[i].first);
  }
  s.num_features = nf;
  return s;
}

std::vector<std::vector<double>> AlignScores(
    const std::vector<data::QueryGroup>& groups, const data::ScoreMap& map) {
  std::vector<std::vector<double>> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(map.at(g.query_id));
  return out;
}

// Initial scores of one split: the linear ranker for "builtin", otherwise
// <source>/<split>.scores when source is a directory, or source itself.
data::ScoreMap InitialScores(const std::string& source, const std::string& split,
                             const std::vector<data::QueryGroup>& groups,
                             const models::LinearRanker* ranker, RunManifest& m) {
  if (source == kBuiltinScores) {
    if (!ranker) throw UsageError("no built-in ranker available; pass --scores");
    return ranker->ScoreAll(groups);
  }
  const std::string path =
      fs::is_directory(source) ? source + "/" + split + ".scores" : source;
  m.AddInput(path);
  return data::LoadExternalScores(path, groups);
}

std::vector<data::RankedInput> Assemble(const std::vector<data::QueryGroup>& groups,
                                        const data::ScoreMap& scores,
                                        std::size_t n) {
  std::vector<data::RankedInput> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(data::AssembleTopN(g, scores.at(g.query_id), n));
  return out;
}

// qid  rank  doc_index  doc_id
void WriteRankings(const std::string& path, const std::vector<data::QueryGroup>& groups,
                   const std::vector<std::vector<std::size_t>>& rankings) {
  std::ofstream out = OpenOut(path);
  out << "qid\trank\tdoc_index\tdoc_id\n";
  for (std::size_t q = 0; q < groups.size(); ++q) {
    for (std::size_t r = 0; r < rankings[q].size(); ++r) {
      const std::size_t d = rankings[q][r];
      out << groups[q].query_id << '\t' << r + 1 << '\t' << d << '\t'
          << groups[q].doc_ids[d] << '\n';
    }
  }
}

std::map<std::string, std::vector<std::size_t>> ReadRankings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::map<std::string, std::vector<std::size_t>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (++line_no == 1 || line.empty()) continue;
    std::istringstream ls(line);
    std::string qid;
    std::size_t rank = 0, doc = 0;
    if (!(ls >> qid >> rank >> doc)) throw ParseError("rankings: malformed line", line_no);
    auto& v = out[qid];
    if (rank != v.size() + 1) throw ParseError("rankings: ranks out of order", line_no);
    v.push_back(doc);
  }
  return out;
}

void WriteAggregate(const std::string& path, const std::string& name,
                    const metrics::EvalReport& report) {
  std::ofstream out = OpenOut(path);
  metrics::WriteAggregateTable(out, {{name, &report}});
}

// ---------------------------------------------------------------------------
// synth

struct SynthFlags {
  std::string kind = "context";
  std::size_t queries = 2000, docs = 20, features = 10;
  std::uint64_t seed = 1;
  std::string out;
};

int RunSynth(const CLI::App* app, const SynthFlags& f) {
  RunManifest m("synth");
  RecordFlags(app, m);
  m.SetSeed(f.seed);
  data::SyntheticOptions o;
  if (f.kind == "context") {
    o.kind = data::SyntheticKind::kContext;
  } else if (f.kind == "linear") {
    o.kind = data::SyntheticKind::kGlobalLinear;
  } else {
    throw UsageError("--kind must be context or linear");
  }
  o.num_queries = f.queries;
  o.docs_per_query = f.docs;
  o.num_features = f.features;
  o.seed = f.seed;
  const data::DataSplit split = data::SplitQueries(data::GenerateSynthetic(o), 0.6, 0.2);
  EnsureDir(f.out);
  data::WriteLetorFile(f.out + "/train.txt", split.train);
  data::WriteLetorFile(f.out + "/valid.txt", split.valid);
  data::WriteLetorFile(f.out + "/test.txt", split.test);
  for (const char* name : {"train.txt", "valid.txt", "test.txt"}) m.AddOutput(name);
  m.Write(f.out);
  std::cout << "wrote " << split.train.size() << "/" << split.valid.size() << "/"
            << split.test.size() << " queries to " << f.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// initial

struct InitialFlags {
  std::string train, valid, test, out;
  std::size_t epochs = 20;
  double lr = 0.01, margin = 1.0;
  std::uint64_t seed = 1;
  bool no_normalize = false;
};

int RunInitial(const CLI::App* app, const InitialFlags& f) {
  RunManifest m("initial");
  RecordFlags(app, m);
  m.SetSeed(f.seed);
  Splits s = LoadSplits(f.train, f.valid, f.test, !f.no_normalize, m);
  models::LinearTrainOptions lo;
  lo.epochs = f.epochs;
  lo.learning_rate = f.lr;
  lo.margin = f.margin;
  lo.seed = f.seed;
  const models::LinearRanker ranker = models::TrainLinearRanker(s.train, lo);

  EnsureDir(f.out);
  {
    std::ofstream out = OpenOut(f.out + "/linear.tsv");
    out << "feature\tweight\n";
    char buf[64];
    for (std::size_t i = 0; i < ranker.weights.size(); ++i) {
      out << i + 1 << '\t'
          << std::string(buf, std::to_chars(buf, buf + sizeof(buf), ranker.weights[i]).ptr)
          << '\n';
    }
    m.AddOutput("linear.tsv");
  }
  const std::vector<std::pair<const char*, const std::vector<data::QueryGroup>*>> splits = {
      {"train", &s.train}, {"valid", &s.valid}, {"test", &s.test}};
  const std::vector<data::QueryGroup>* report_split = nullptr;
  for (const auto& [name, groups] : splits) {
    if (groups->empty()) continue;
    data::WriteScoresFile(f.out + "/" + name + ".scores", *groups,
                          ranker.ScoreAll(*groups));
    m.AddOutput(std::string(name) + ".scores");
    report_split = groups;
  }
  // Baseline report on the last split given (normally test).
  const auto& groups = *report_split;
  std::vector<std::vector<double>> scores;
  for (const auto& g : groups) scores.push_back(ranker.ScoreGroup(g));
  std::vector<std::vector<std::size_t>> rankings;
  for (const auto& sc : scores) rankings.push_back(data::StableDescendingOrder(sc));
  const metrics::EvalReport report = metrics::Evaluate(groups, rankings);
  metrics::WriteReportFile(f.out + "/report.tsv", report);
  WriteRankings(f.out + "/rankings.tsv", groups, rankings);
  WriteAggregate(f.out + "/aggregate.tsv", "initial", report);
  for (const char* name : {"report.tsv", "rankings.tsv", "aggregate.tsv"}) m.AddOutput(name);
  m.Write(f.out);
  metrics::WriteAggregateTable(std::cout, {{"initial", &report}});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train / sweep

struct TrainFlags {
  std::string train, valid, scores = kBuiltinScores, out;
  std::string model = "dlcm", loss = "attrank";
  std::size_t n = 10, beta = 0, k = 5;
  std::vector<std::size_t> hidden = {64};
  std::size_t batch = 256, max_iters = 10000, patience = 0, threads = 1;
  double lr = 1.0, decay = 0.8, clip = 5.0, sigma = losses::kDefaultSigma;
  bool attn_softmax = false, desk = false, no_normalize = false;
  std::size_t linear_epochs = 20;
  std::uint64_t seed = 1;

  CLI::Option *n_opt = nullptr, *beta_opt = nullptr, *k_opt = nullptr,
              *hidden_opt = nullptr, *batch_opt = nullptr;
};

void AddTrainFlags(CLI::App* app, TrainFlags& f) {
  app->add_option("--train", f.train, "LETOR training file")->required();
  app->add_option("--valid", f.valid, "LETOR validation file");
  app->add_option("--scores", f.scores,
                  "initial scores: 'builtin' or a directory of <split>.scores");
  app->add_option("--model", f.model, "dnn | lidnn | dlcm");
  app->add_option("--loss", f.loss, "listmle | softrank | attrank");
  f.n_opt = app->add_option("--n", f.n, "re-ranked list size")->check(CLI::Range(1, 200));
  f.beta_opt = app->add_option("--beta", f.beta, "DLCM abstraction width");
  f.k_opt = app->add_option("--k", f.k, "DLCM scoring units")->check(CLI::PositiveNumber);
  f.hidden_opt = app->add_option("--hidden", f.hidden, "DNN/LIDNN hidden widths")
                     ->delimiter(',');
  f.batch_opt = app->add_option("--batch", f.batch, "queries per batch")
                    ->check(CLI::PositiveNumber);
  app->add_option("--lr", f.lr, "initial learning rate");
  app->add_option("--decay", f.decay, "learning-rate decay on loss increase");
  app->add_option("--clip", f.clip, "global gradient norm bound");
  app->add_option("--max-iters", f.max_iters, "training iterations");
  app->add_option("--patience", f.patience, "early-stop epochs (0 = off)");
  app->add_option("--sigma", f.sigma, "SoftRank score noise");
  app->add_flag("--attn-softmax", f.attn_softmax, "AttRank: softmax model attention");
  app->add_flag("--desk", f.desk, "desk profile: batch 16, n 10");
  app->add_flag("--no-normalize", f.no_normalize, "skip per-query min-max scaling");
  app->add_option("--linear-epochs", f.linear_epochs, "built-in ranker epochs");
  app->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "seed for all randomness");
  app->add_option("--out", f.out, "output directory")->required();
}

train::TrainConfig ResolveTrainConfig(TrainFlags& f, std::size_t num_features) {
  if (f.desk) {
    if (f.batch_opt->count() == 0) f.batch = 16;
    if (f.n_opt->count() == 0) f.n = 10;
  }
  train::TrainConfig c;
  try {
    c.model.kind = models::ParseModelKind(f.model);
    c.loss = losses::ParseLossKind(f.loss);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  if (c.model.kind != models::ModelKind::kDlcm &&
      (f.beta_opt->count() > 0 || f.k_opt->count() > 0)) {
    throw UsageError("--beta and --k apply only to --model dlcm");
  }
  if (c.model.kind == models::ModelKind::kDlcm && f.hidden_opt->count() > 0) {
    throw UsageError("--hidden applies only to --model dnn or lidnn");
  }
  if (f.attn_softmax && c.loss != losses::LossKind::kAttRank) {
    throw UsageError("--attn-softmax applies only to --loss attrank");
  }
  c.model.num_features = num_features;
  c.model.list_size = f.n;
  c.model.beta = f.beta;
  c.model.k = f.k;
  c.model.hidden = f.hidden;
  c.batch_size = f.batch;
  c.lr0 = f.lr;
  c.decay = f.decay;
  c.clip_norm = f.clip;
  c.max_iters = f.max_iters;
  c.patience = f.patience;
  c.seed = f.seed;
  c.threads = f.threads;
  c.loss_options.sigma = f.sigma;
  c.loss_options.attn_softmax = f.attn_softmax;
  try {
    c.Validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return c;
}

struct PreparedTraining {
  Splits splits;
  std::optional<models::LinearRanker> ranker;
  data::ScoreMap train_scores, valid_scores;
};

PreparedTraining PrepareTraining(const TrainFlags& f, const std::string& test,
                                 RunManifest& m) {
  PreparedTraining p;
  p.splits = LoadSplits(f.train, f.valid, test, !f.no_normalize, m);
  if (f.scores == kBuiltinScores) {
    models::LinearTrainOptions lo;
    lo.epochs = f.linear_epochs;
    lo.seed = f.seed;
    p.ranker = models::TrainLinearRanker(p.splits.train, lo);
  }
  const models::LinearRanker* r = p.ranker ? &*p.ranker : nullptr;
  p.train_scores = InitialScores(f.scores, "train", p.splits.train, r, m);
  if (!p.splits.valid.empty()) {
    p.valid_scores = InitialScores(f.scores, "valid", p.splits.valid, r, m);
  }
  return p;
}

models::Checkpoint MakeCheckpoint(const train::TrainConfig& c, const TrainFlags& f,
                                  const train::TrainResult& r,
                                  const std::optional<models::LinearRanker>& ranker) {
  models::Checkpoint ck;
  ck.spec = c.model;
  ck.params = r.best_params;
  ck.initial_ranker = ranker;
  ck.metadata["loss"] = losses::LossKindName(c.loss);
  ck.metadata["seed"] = std::to_string(c.seed);
  ck.metadata["normalize"] = f.no_normalize ? "0" : "1";
  ck.metadata["attn_softmax"] = c.loss_options.attn_softmax ? "1" : "0";
  ck.metadata["best_epoch"] = std::to_string(r.best_epoch);
  ck.metadata["iterations"] = std::to_string(r.iterations);
  return ck;
}

int RunTrain(const CLI::App* app, TrainFlags& f) {
  RunManifest m("train");
  RecordFlags(app, m);
  m.SetSeed(f.seed);
  ResolveTrainConfig(f, 1);  // reject flag conflicts before touching data
  PreparedTraining p = PrepareTraining(f, "", m);
  const train::TrainConfig c = ResolveTrainConfig(f, p.splits.num_features);
  m.SetConfig("resolved.batch", std::to_string(c.batch_size));
  m.SetConfig("resolved.n", std::to_string(c.model.list_size));
  const auto train_lists = Assemble(p.splits.train, p.train_scores, c.model.list_size);
  const auto valid_lists = Assemble(p.splits.valid, p.valid_scores, c.model.list_size);

  EnsureDir(f.out);
  const train::TrainResult r = train::Train(
      c, train_lists, valid_lists, {}, [](const train::EpochRecord& e) {
        std::fprintf(stderr, "epoch %zu  iter %zu  loss %.6f  lr %.4g  valid ndcg@10 %.4f\n",
                     e.epoch, e.iterations, e.mean_loss, e.lr, e.valid_ndcg10);
      });
  models::SaveCheckpoint(f.out + "/checkpoint.txt", MakeCheckpoint(c, f, r, p.ranker));
  {
    std::ofstream out = OpenOut(f.out + "/history.tsv");
    train::WriteHistory(out, r.history);
  }
  m.AddOutput("checkpoint.txt");
  m.AddOutput("history.tsv");
  m.Write(f.out);
  std::cout << "best epoch " << r.best_epoch << " valid ndcg@10 " << r.best_valid_ndcg10
            << "\n";
  return kExitOk;
}

struct SweepFlags {
  TrainFlags base;
  std::string param, range, test;
  std::size_t step = 1;
  std::vector<std::size_t> values;
};

std::vector<std::size_t> SweepValues(const SweepFlags& s) {
  if (!s.values.empty()) return s.values;
  const std::size_t dots = s.range.find("..");
  std::size_t lo = 0, hi = 0;
  auto parse = [](const std::string& t, std::size_t& v) {
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    return res.ec == std::errc() && res.ptr == t.data() + t.size();
  };
  if (dots == std::string::npos || !parse(s.range.substr(0, dots), lo) ||
      !parse(s.range.substr(dots + 2), hi) || lo > hi || s.step == 0) {
    throw UsageError("--range must look like LO..HI with --step >= 1");
  }
  std::vector<std::size_t> out;
  for (std::size_t v = lo; v <= hi; v += s.step) out.push_back(v);
  return out;
}

int RunSweep(const CLI::App* app, SweepFlags& s) {
  RunManifest m("sweep");
  RecordFlags(app, m);
  m.SetSeed(s.base.seed);
  if (s.param != "n" && s.param != "beta" && s.param != "k") {
    throw UsageError("--param must be n, beta or k");
  }
  if (s.param != "n" && s.base.model != "dlcm") {
    throw UsageError("sweeping beta or k needs --model dlcm");
  }
  const std::vector<std::size_t> values = SweepValues(s);
  ResolveTrainConfig(s.base, 1);
  PreparedTraining p = PrepareTraining(s.base, s.test, m);
  const data::ScoreMap test_scores =
      InitialScores(s.base.scores, "test", p.splits.test, p.ranker ? &*p.ranker : nullptr, m);

  EnsureDir(s.base.out);
  std::ofstream out = OpenOut(s.base.out + "/sweep.tsv");
  const auto& cutoffs = metrics::kDefaultCutoffs;
  out << s.param;
  for (auto metric : {metrics::Metric::kNdcg, metrics::Metric::kErr}) {
    for (std::size_t k : cutoffs) out << '\t' << metrics::MetricName(metric) << '@' << k;
  }
  out << "\tbest_epoch\n";
  for (std::size_t v : values) {
    TrainFlags f = s.base;
    train::TrainConfig c = ResolveTrainConfig(f, p.splits.num_features);
    if (s.param == "n") c.model.list_size = v;
    if (s.param == "beta") c.model.beta = v;
    if (s.param == "k") c.model.k = v;
    try {
      c.Validate();
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    const auto tr = Assemble(p.splits.train, p.train_scores, c.model.list_size);
    const auto va = Assemble(p.splits.valid, p.valid_scores, c.model.list_size);
    const auto te = Assemble(p.splits.test, test_scores, c.model.list_size);
    const train::TrainResult r = train::Train(c, tr, va);
    const metrics::EvalReport rep =
        train::EvaluateCheckpoint(c.model, r.best_params, te, cutoffs, c.threads);
    out << v;
    char buf[32];
    for (auto metric : {metrics::Metric::kNdcg, metrics::Metric::kErr}) {
      for (double x : rep.Mean(metric)) {
        std::snprintf(buf, sizeof(buf), "%.6f", x);
        out << '\t' << buf;
      }
    }
    out << '\t' << r.best_epoch << '\n';
    std::fprintf(stderr, "%s=%zu  test ndcg@10 %.4f\n", s.param.c_str(), v,
                 rep.Mean(metrics::Metric::kNdcg).back());
  }
  m.AddOutput("sweep.tsv");
  m.Write(s.base.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalFlags {
  std::string checkpoint, data, scores = kBuiltinScores, split = "test", out;
  std::string baseline_report;
  std::vector<std::size_t> cutoffs = metrics::kDefaultCutoffs;
  std::size_t permutations = metrics::kDefaultPermutations, threads = 1;
  std::uint64_t seed = 1;
};

int RunEval(const CLI::App* app, const EvalFlags& f) {
  RunManifest m("eval");
  RecordFlags(app, m);
  m.SetSeed(f.seed);
  m.AddInput(f.checkpoint);
  const models::Checkpoint ck = models::LoadCheckpoint(f.checkpoint);
  const bool normalize = ck.metadata.count("normalize") == 0 ||
                         ck.metadata.at("normalize") != "0";
  Splits s = LoadSplits("", "", f.data, normalize, m, ck.spec.num_features);
  if (s.num_features != ck.spec.num_features) {
    throw ConfigError("checkpoint expects " + std::to_string(ck.spec.num_features) +
                      " features, data has " + std::to_string(s.num_features));
  }
  const data::ScoreMap scores =
      InitialScores(f.scores, f.split, s.test,
                    ck.initial_ranker ? &*ck.initial_ranker : nullptr, m);
  const auto lists = Assemble(s.test, scores, ck.spec.list_size);
  const auto rankings = train::RerankAll(ck.spec, ck.params, lists, f.threads);
  metrics::EvalReport report = metrics::Evaluate(s.test, rankings, f.cutoffs);

  EnsureDir(f.out);
  std::vector<metrics::NamedReport> rows;
  std::optional<metrics::EvalReport> baseline;
  if (!f.baseline_report.empty()) {
    m.AddInput(f.baseline_report);
    baseline = metrics::ReadReportFile(f.baseline_report);
    metrics::AttachSignificance(report, *baseline, f.baseline_report, f.permutations,
                                f.seed);
    rows.push_back({"baseline", &*baseline});
    std::ofstream out = OpenOut(f.out + "/pvalues.tsv");
    metrics::WriteSignificance(out, report);
    m.AddOutput("pvalues.tsv");
  }
  const std::string name = std::string(models::ModelKindName(ck.spec.kind)) + "+" +
                           (ck.metadata.count("loss") ? ck.metadata.at("loss") : "?");
  rows.push_back({name, &report});
  metrics::WriteReportFile(f.out + "/report.tsv", report);
  WriteRankings(f.out + "/rankings.tsv", s.test, rankings);
  {
    std::ofstream out = OpenOut(f.out + "/aggregate.tsv");
    metrics::WriteAggregateTable(out, rows);
  }
  for (const char* n : {"report.tsv", "rankings.tsv", "aggregate.tsv"}) m.AddOutput(n);
  m.Write(f.out);
  metrics::WriteAggregateTable(std::cout, rows);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeFlags {
  std::string baseline_run, model_run, data, out;
};

int RunAnalyze(const CLI::App* app, const AnalyzeFlags& f) {
  RunManifest m("analyze");
  RecordFlags(app, m);
  const std::string base_path = f.baseline_run + "/rankings.tsv";
  const std::string model_path = f.model_run + "/rankings.tsv";
  m.AddInput(base_path);
  m.AddInput(model_path);
  const Splits s = LoadSplits("", "", f.data, false, m);
  const auto base = ReadRankings(base_path);
  const auto model = ReadRankings(model_path);
  std::vector<metrics::NegPairQuery> queries;
  for (const auto& g : s.test) {
    auto b = base.find(g.query_id);
    auto r = model.find(g.query_id);
    if (b == base.end() || r == model.end()) {
      throw CoverageError("query " + g.query_id + " missing from a run's rankings");
    }
    queries.push_back(metrics::AnalyzeQuery(g, b->second, r->second));
  }
  EnsureDir(f.out);
  char buf[160];
  {
    std::ofstream out = OpenOut(f.out + "/negpair_grades.tsv");
    out << "grade\tqueries\tmean_reduction\tmean_baseline_np\tproportion\n";
    for (const auto& row : metrics::ReductionByGrade(queries)) {
      std::snprintf(buf, sizeof(buf), "%d\t%zu\t%.6f\t%.6f\t%.6f\n", row.grade,
                    row.queries, row.mean_reduction, row.mean_baseline_np,
                    metrics::ImprovementProportion(row.mean_reduction,
                                                   row.mean_baseline_np));
      out << buf;
      std::cout << buf;
    }
  }
  {
    std::ofstream out = OpenOut(f.out + "/negpair_buckets.tsv");
    out << "perfect_docs\tqueries\tmean_reduction\tmean_baseline_np\tproportion\n";
    for (const auto& b : metrics::BucketByPerfectCount(queries)) {
      std::snprintf(buf, sizeof(buf), "%zu\t%zu\t%.6f\t%.6f\t%.6f\n", b.perfect_docs,
                    b.queries, b.mean_reduction, b.mean_baseline_np, b.proportion);
      out << buf;
    }
  }
  std::cout << "# NegPair figures average over documents within a query, then over "
               "queries.\n";
  m.AddOutput("negpair_grades.tsv");
  m.AddOutput("negpair_buckets.tsv");
  m.Write(f.out);
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Deep listwise context model re-ranking toolkit"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SynthFlags synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  synth_cmd->add_option("--kind", synth.kind, "context | linear");
  synth_cmd->add_option("--queries", synth.queries)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--docs", synth.docs)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--features", synth.features)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--out", synth.out)->required();

  InitialFlags initial;
  CLI::App* initial_cmd = app.add_subcommand("initial", "train the linear initial ranker");
  initial_cmd->add_option("--train", initial.train)->required();
  initial_cmd->add_option("--valid", initial.valid);
  initial_cmd->add_option("--test", initial.test);
  initial_cmd->add_option("--epochs", initial.epochs);
  initial_cmd->add_option("--lr", initial.lr);
  initial_cmd->add_option("--margin", initial.margin);
  initial_cmd->add_option("--seed", initial.seed);
  initial_cmd->add_flag("--no-normalize", initial.no_normalize);
  initial_cmd->add_option("--out", initial.out)->required();

  TrainFlags train_flags;
  CLI::App* train_cmd = app.add_subcommand("train", "train a re-ranker");
  AddTrainFlags(train_cmd, train_flags);

  EvalFlags eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", eval.checkpoint)->required();
  eval_cmd->add_option("--data", eval.data)->required();
  eval_cmd->add_option("--scores", eval.scores);
  eval_cmd->add_option("--split", eval.split, "split name for <dir>/<split>.scores");
  eval_cmd->add_option("--cutoffs", eval.cutoffs)->delimiter(',');
  eval_cmd->add_option("--baseline-report", eval.baseline_report);
  eval_cmd->add_option("--permutations", eval.permutations)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--threads", eval.threads)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", eval.seed);
  eval_cmd->add_option("--out", eval.out)->required();

  AnalyzeFlags analyze;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "NegPair analysis of two runs");
  analyze_cmd->add_option("--baseline-run", analyze.baseline_run)->required();
  analyze_cmd->add_option("--model-run", analyze.model_run)->required();
  analyze_cmd->add_option("--data", analyze.data)->required();
  analyze_cmd->add_option("--out", analyze.out)->required();

  SweepFlags sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "metric versus one hyper-parameter");
  AddTrainFlags(sweep_cmd, sweep.base);
  sweep_cmd->add_option("--param", sweep.param, "n | beta | k")->required();
  sweep_cmd->add_option("--range", sweep.range, "LO..HI");
  sweep_cmd->add_option("--step", sweep.step);
  sweep_cmd->add_option("--values", sweep.values)->delimiter(',');
  sweep_cmd->add_option("--test", sweep.test, "LETOR test file")->required();

  for (CLI::App* sub : {synth_cmd, initial_cmd, train_cmd, eval_cmd, analyze_cmd, sweep_cmd}) {
    AttachEnvNames(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth_cmd) return RunSynth(synth_cmd, synth);
    if (*initial_cmd) return RunInitial(initial_cmd, initial);
    if (*train_cmd) return RunTrain(train_cmd, train_flags);
    if (*eval_cmd) return RunEval(eval_cmd, eval);
    if (*analyze_cmd) return RunAnalyze(analyze_cmd, analyze);
    if (*sweep_cmd) {
      if (sweep.range.empty() == sweep.values.empty()) {
        throw UsageError("sweep needs exactly one of --range or --values");
      }
      return RunSweep(sweep_cmd, sweep);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ContractError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace dlcm::tools

int main(int argc, char** argv) { return dlcm::tools::Main(argc, argv); }
