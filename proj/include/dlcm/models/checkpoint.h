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

// Text checkpoint container. Layout:
//
//   dlcm-checkpoint 1
//   <key> <value>              model, features, list_size, beta, k, hidden,
//   ...                        plus free-form metadata keys
//   param <name> <rank> <extent>...
//   <value> <value> ...        exactly numel values, shortest round-trip form
//   linear <count>             optional initial ranker weights
//   <value> ...
//   end
//
// Floats are written with the shortest decimal that parses back to the same
// bits, so save/load is exact.

#ifndef DLCM_MODELS_CHECKPOINT_H_
#define DLCM_MODELS_CHECKPOINT_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "dlcm/models/linear_ranker.h"
#include "dlcm/models/networks.h"
#include "dlcm/models/params.h"

namespace dlcm::models {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelSpec spec;
  ParamSet<float> params;
  std::optional<LinearRanker> initial_ranker;
  // Training metadata (loss kind, seed, ...). Keys must be single tokens.
  std::map<std::string, std::string> metadata;
};

void WriteCheckpoint(std::ostream& out, const Checkpoint& ckpt);
// Throws ParseError on a malformed container and ConfigError when the stored
// parameters do not match the stored spec.
Checkpoint ReadCheckpoint(std::istream& in);

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace dlcm::models

#endif  // DLCM_MODELS_CHECKPOINT_H_
