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

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "dlcm/error.h"
#include "dlcm/models/checkpoint.h"
#include "dlcm/models/networks.h"

namespace dlcm::models {
namespace {

Checkpoint Sample(ModelKind kind) {
  Checkpoint c;
  c.spec.kind = kind;
  c.spec.num_features = 4;
  c.spec.list_size = 6;
  if (kind == ModelKind::kDlcm) {
    c.spec.beta = 3;
    c.spec.k = 2;
  } else {
    c.spec.hidden = {64, 80};
  }
  c.params = InitParams(c.spec, 17);
  // Values that need every significant digit, plus a subnormal.
  c.params[0].value.data[0] = 1.0f / 3.0f;
  c.params[0].value.data[1] = std::numeric_limits<float>::denorm_min();
  c.params[0].value.data[2] = -0.0f;
  c.initial_ranker = LinearRanker{{0.1, -2.5e-7, 1.0 / 7.0, 3.0}};
  c.metadata = {{"loss", "attrank"}, {"seed", "4"}};
  return c;
}

std::string Write(const Checkpoint& c) {
  std::ostringstream out;
  WriteCheckpoint(out, c);
  return out.str();
}

Checkpoint Read(const std::string& text) {
  std::istringstream in(text);
  return ReadCheckpoint(in);
}

TEST(CheckpointTest, RoundTripIsBitExact) {
  for (ModelKind kind : {ModelKind::kDnn, ModelKind::kLidnn, ModelKind::kDlcm}) {
    const Checkpoint c = Sample(kind);
    const std::string text = Write(c);
    const Checkpoint back = Read(text);
    EXPECT_EQ(back.spec, c.spec);
    EXPECT_EQ(back.params, c.params);
    EXPECT_TRUE(std::signbit(back.params[0].value.data[2]));
    ASSERT_TRUE(back.initial_ranker.has_value());
    EXPECT_EQ(back.initial_ranker->weights, c.initial_ranker->weights);
    EXPECT_EQ(back.metadata, c.metadata);
    EXPECT_EQ(Write(back), text);
  }
}

TEST(CheckpointTest, OptionalRankerAndFiles) {
  Checkpoint c = Sample(ModelKind::kDlcm);
  c.initial_ranker.reset();
  const std::string path = ::testing::TempDir() + "/ckpt.txt";
  SaveCheckpoint(path, c);
  const Checkpoint back = LoadCheckpoint(path);
  EXPECT_FALSE(back.initial_ranker.has_value());
  EXPECT_EQ(back.params, c.params);
  EXPECT_THROW(LoadCheckpoint(::testing::TempDir() + "/missing/ckpt.txt"), IoError);
}

TEST(CheckpointTest, MalformedContainers) {
  const std::string good = Write(Sample(ModelKind::kDlcm));
  EXPECT_THROW(Read("not-a-checkpoint 1\n"), ParseError);
  EXPECT_THROW(Read("dlcm-checkpoint 9\n"), ParseError);
  EXPECT_THROW(Read(good.substr(0, good.size() / 2)), ParseError);
  std::string corrupt = good;
  corrupt.replace(corrupt.find("param w_x"), 9, "param w_?");
  EXPECT_THROW(Read(corrupt), ConfigError);
  try {
    std::string bad_number = good;
    const std::size_t at = bad_number.find('\n', bad_number.find("param wz0")) + 1;
    bad_number.insert(at, "zz ");
    Read(bad_number);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_GT(e.line(), 0u);
  }
}

TEST(CheckpointTest, SpecMismatchIsConfigError) {
  Checkpoint c = Sample(ModelKind::kDlcm);
  c.spec.k = 3;  // stored params were built for k = 2
  try {
    Read(Write(c));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("w_phi"), std::string::npos) << e.what();
  }
}

TEST(CheckpointTest, MetadataKeysMustBeSingleTokens) {
  Checkpoint c = Sample(ModelKind::kDnn);
  c.metadata["note"] = "values may hold spaces";
  EXPECT_EQ(Read(Write(c)).metadata, c.metadata);
  c.metadata["two words"] = "x";
  std::ostringstream out;
  EXPECT_THROW(WriteCheckpoint(out, c), ContractError);
}

}  // namespace
}  // namespace dlcm::models
