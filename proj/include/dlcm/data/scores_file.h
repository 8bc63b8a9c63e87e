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

// Initial-ranking score files: UTF-8 TSV, one line per document,
//
//   <qid>\t<doc_index>\t<score>
//
// doc_index is 0-based within the query's file order. Every (qid, doc) pair
// of the data must appear exactly once.

#ifndef DLCM_DATA_SCORES_FILE_H_
#define DLCM_DATA_SCORES_FILE_H_

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dlcm/data/letor.h"

namespace dlcm::data {

using ScoreMap = std::map<std::string, std::vector<double>>;

ScoreMap ParseScores(std::istream& in, std::span<const QueryGroup> groups);
ScoreMap LoadExternalScores(const std::string& path,
                            std::span<const QueryGroup> groups);

void WriteScores(std::ostream& out, std::span<const QueryGroup> groups,
                 const ScoreMap& scores);
void WriteScoresFile(const std::string& path,
                     std::span<const QueryGroup> groups,
                     const ScoreMap& scores);

}  // namespace dlcm::data

#endif  // DLCM_DATA_SCORES_FILE_H_
