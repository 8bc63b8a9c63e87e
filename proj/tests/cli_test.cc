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

// Drives the dlcm binary end to end on a small synthetic corpus.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dlcm/metrics/report.h"
#include "dlcm/models/checkpoint.h"

namespace fs = std::filesystem;

namespace dlcm {
namespace {

const std::string kCli = DLCM_CLI_PATH;

int RunCli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t Lines(const fs::path& p) {
  const std::string s = Slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(fs::path(::testing::TempDir()) / "dlcm_cli_test");
    fs::remove_all(*root_);
    fs::create_directories(*root_);
    ASSERT_EQ(RunCli("synth --queries 60 --docs 12 --features 4 --seed 3 --out " + Dir("data")), 0);
    ASSERT_EQ(RunCli("initial --train " + Data("train") + " --valid " + Data("valid") +
                  " --test " + Data("test") + " --no-normalize --out " + Dir("init")),
              0);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*root_);
    delete root_;
  }
  static std::string Dir(const std::string& name) { return (*root_ / name).string(); }
  static std::string Data(const std::string& split) {
    return (*root_ / "data" / (split + ".txt")).string();
  }
  static std::string TrainArgs(const std::string& out, const std::string& extra = "") {
    return "train --train " + Data("train") + " --valid " + Data("valid") + " --scores " +
           Dir("init") + " --no-normalize --desk --max-iters 12 --k 2 " + extra +
           " --out " + out;
  }

  static fs::path* root_;
};

fs::path* CliTest::root_ = nullptr;

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(RunCli("--help"), 0);
  EXPECT_EQ(RunCli("train --help"), 0);
  EXPECT_EQ(RunCli(""), 2);
  EXPECT_EQ(RunCli("frobnicate"), 2);
  EXPECT_EQ(RunCli("train --train x"), 2);  // --out missing
  EXPECT_EQ(RunCli(TrainArgs(Dir("bad"), "--model dnn --beta 3")), 2);
  EXPECT_EQ(RunCli(TrainArgs(Dir("bad"), "--model dlcm --hidden 64")), 2);
  EXPECT_EQ(RunCli(TrainArgs(Dir("bad"), "--loss lambdamart")), 2);
  EXPECT_EQ(RunCli(TrainArgs(Dir("bad"), "--n 500")), 2);
  EXPECT_EQ(RunCli("train --train /nonexistent.txt --out " + Dir("bad")), 3);
  EXPECT_EQ(RunCli("eval --checkpoint /nonexistent --data " + Data("test") + " --out " +
                Dir("bad")),
            3);
  // Diverging updates overflow the parameters.
  EXPECT_EQ(RunCli(TrainArgs(Dir("nan"), "--lr 1e38 --clip 1e38 --loss listmle")), 4);
}

TEST_F(CliTest, InitialWritesScoresReportAndManifest) {
  for (const char* f : {"train.scores", "valid.scores", "test.scores", "report.tsv",
                        "rankings.tsv", "aggregate.tsv", "linear.tsv", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(*root_ / "init" / f)) << f;
  }
  EXPECT_EQ(Lines(*root_ / "init" / "test.scores"), 12u * 12u);
  EXPECT_EQ(Lines(*root_ / "init" / "report.tsv"), 1u + 12u);
  const std::string manifest = Slurp(*root_ / "init" / "manifest.json");
  EXPECT_NE(manifest.find("\"inputs\""), std::string::npos) << manifest;
  EXPECT_NE(manifest.find("\"seed\""), std::string::npos);
}

TEST_F(CliTest, TrainIsDeterministicAndLeavesInputsAlone) {
  const std::string before = Slurp(Data("train"));
  ASSERT_EQ(RunCli(TrainArgs(Dir("run_a"))), 0);
  ASSERT_EQ(RunCli(TrainArgs(Dir("run_b"))), 0);
  EXPECT_EQ(Slurp(*root_ / "run_a" / "checkpoint.txt"), Slurp(*root_ / "run_b" / "checkpoint.txt"));
  EXPECT_EQ(Slurp(Data("train")), before);

  const std::string eval = "eval --checkpoint " + Dir("run_a") + "/checkpoint.txt --data " +
                           Data("test") + " --scores " + Dir("init") +
                           " --baseline-report " + Dir("init") + "/report.tsv" +
                           " --permutations 500 --out ";
  ASSERT_EQ(RunCli(eval + Dir("eval_a")), 0);
  ASSERT_EQ(RunCli(eval + Dir("eval_b")), 0);
  for (const char* f : {"report.tsv", "rankings.tsv", "aggregate.tsv", "pvalues.tsv"}) {
    EXPECT_EQ(Slurp(*root_ / "eval_a" / f), Slurp(*root_ / "eval_b" / f)) << f;
  }
  EXPECT_EQ(Lines(*root_ / "eval_a" / "pvalues.tsv"), 1u + 8u);

  ASSERT_EQ(RunCli("analyze --baseline-run " + Dir("init") + " --model-run " + Dir("eval_a") +
                " --data " + Data("test") + " --out " + Dir("analysis")),
            0);
  EXPECT_EQ(Lines(*root_ / "analysis" / "negpair_grades.tsv"), 1u + 5u);
  EXPECT_TRUE(fs::exists(*root_ / "analysis" / "manifest.json"));
}

TEST_F(CliTest, EvalOfTieCheckpointEqualsBaseline) {
  // v_phi = 0 scores every document 0, so the re-ranking keeps initial order.
  ASSERT_EQ(RunCli(TrainArgs(Dir("tie"))), 0);
  models::Checkpoint c = models::LoadCheckpoint(Dir("tie") + "/checkpoint.txt");
  for (float& v : c.params.Get("v_phi").data) v = 0.0f;
  models::SaveCheckpoint(Dir("tie") + "/checkpoint.txt", c);
  ASSERT_EQ(RunCli("eval --checkpoint " + Dir("tie") + "/checkpoint.txt --data " + Data("test") +
                " --scores " + Dir("init") + " --out " + Dir("tie_eval")),
            0);
  EXPECT_EQ(Slurp(*root_ / "tie_eval" / "report.tsv"), Slurp(*root_ / "init" / "report.tsv"));
  EXPECT_EQ(Slurp(*root_ / "tie_eval" / "rankings.tsv"), Slurp(*root_ / "init" / "rankings.tsv"));
}

TEST_F(CliTest, BuiltinScoresEmbedTheRanker) {
  const std::string args = "train --train " + Data("train") + " --valid " + Data("valid") +
                           " --no-normalize --desk --max-iters 4 --out " + Dir("builtin");
  ASSERT_EQ(RunCli(args), 0);
  const models::Checkpoint c = models::LoadCheckpoint(Dir("builtin") + "/checkpoint.txt");
  ASSERT_TRUE(c.initial_ranker.has_value());
  EXPECT_EQ(c.metadata.at("normalize"), "0");
  EXPECT_EQ(RunCli("eval --checkpoint " + Dir("builtin") + "/checkpoint.txt --data " +
                Data("test") + " --out " + Dir("builtin_eval")),
            0);
}

TEST_F(CliTest, SweepEmitsOneRowPerValue) {
  const std::string base = "sweep --train " + Data("train") + " --valid " + Data("valid") +
                           " --test " + Data("test") + " --scores " + Dir("init") +
                           " --no-normalize --desk --max-iters 2 --k 2 --param n ";
  ASSERT_EQ(RunCli(base + "--range 10..60 --step 10 --out " + Dir("sweep")), 0);
  EXPECT_EQ(Lines(*root_ / "sweep" / "sweep.tsv"), 1u + 6u);
  EXPECT_EQ(RunCli(base + "--out " + Dir("sweep_bad")), 2);
  EXPECT_EQ(RunCli(base + "--range 5..x --out " + Dir("sweep_bad")), 2);
}

TEST_F(CliTest, EnvironmentOverridesFlags) {
  ASSERT_EQ(RunCli("synth --out " + Dir("env"), "DLCM_QUERIES=10 DLCM_DOCS=3"), 0);
  EXPECT_EQ(Lines(*root_ / "env" / "test.txt"), 2u * 3u);
  const std::string manifest = Slurp(*root_ / "env" / "manifest.json");
  EXPECT_NE(manifest.find("\"queries\": \"10\""), std::string::npos) << manifest;
}

}  // namespace
}  // namespace dlcm
