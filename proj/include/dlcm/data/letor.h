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

// LETOR / SVMlight ranking data:
//
//   <label> qid:<id> <idx>:<value> ... [# comment]
//
// Feature indices are 1-based in the file and 0-based in memory. The text
// after '#' (trimmed) becomes the document id; without a comment the id is
// the document's 0-based position within its query.

#ifndef DLCM_DATA_LETOR_H_
#define DLCM_DATA_LETOR_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dlcm/gradcore/array.h"

namespace dlcm::data {

inline constexpr int kMinGrade = 0;
inline constexpr int kMaxGrade = 4;

struct QueryGroup {
  std::string query_id;
  std::vector<std::string> doc_ids;
  grad::Array<float> features;  // [num_docs x num_features]
  std::vector<int> labels;      // clamped to [kMinGrade, kMaxGrade]

  std::size_t num_docs() const { return labels.size(); }
  std::size_t num_features() const { return features.shape.at(1); }
  const float* row(std::size_t doc) const {
    return &features.data[doc * num_features()];
  }
};

struct LetorData {
  std::vector<QueryGroup> groups;  // first-appearance order of qid
  std::size_t num_features = 0;    // max feature index seen
  std::size_t clamped_labels = 0;  // labels moved into [0, 4]
};

LetorData ParseLetor(std::istream& in);
LetorData ReadLetorFile(const std::string& path);

// Zero-extends every group to `num_features` columns. Throws ConfigError if
// a group already has more.
void WidenFeatures(LetorData& data, std::size_t num_features);

// Dense re-emission; ParseLetor(WriteLetor(g)) reproduces g exactly.
void WriteLetor(std::ostream& out, std::span<const QueryGroup> groups);
void WriteLetorFile(const std::string& path,
                    std::span<const QueryGroup> groups);

// Min-max scales every feature column to [0, 1] within the query; constant
// columns become 0.
QueryGroup NormalizePerQuery(const QueryGroup& g);
void NormalizeAll(std::vector<QueryGroup>& groups);

}  // namespace dlcm::data

#endif  // DLCM_DATA_LETOR_H_
