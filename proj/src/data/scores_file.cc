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

#include "dlcm/data/scores_file.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_map>

#include "dlcm/error.h"

namespace dlcm::data {
namespace {

std::string PairName(std::string_view qid, std::size_t doc) {
  return "(qid " + std::string(qid) + ", doc " + std::to_string(doc) + ")";
}

}  // namespace

ScoreMap ParseScores(std::istream& in, std::span<const QueryGroup> groups) {
  std::unordered_map<std::string, const QueryGroup*> by_qid;
  for (const QueryGroup& g : groups) by_qid.emplace(g.query_id, &g);

  ScoreMap scores;
  std::map<std::string, std::vector<bool>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw ParseError("expected <qid>\\t<doc_index>\\t<score>", line_no);
    }
    const std::string qid = line.substr(0, t1);
    const std::string_view doc_s =
        std::string_view(line).substr(t1 + 1, t2 - t1 - 1);
    const std::string_view score_s = std::string_view(line).substr(t2 + 1);
    std::size_t doc = 0;
    double score = 0.0;
    auto r1 = std::from_chars(doc_s.data(), doc_s.data() + doc_s.size(), doc);
    auto r2 = std::from_chars(score_s.data(), score_s.data() + score_s.size(),
                              score);
    if (r1.ec != std::errc() || r1.ptr != doc_s.data() + doc_s.size() ||
        r2.ec != std::errc() || r2.ptr != score_s.data() + score_s.size() ||
        !std::isfinite(score)) {
      throw ParseError("malformed score line", line_no);
    }

    const auto g = by_qid.find(qid);
    if (g == by_qid.end()) throw CoverageError("unknown qid " + qid);
    const std::size_t nd = g->second->num_docs();
    if (doc >= nd) {
      throw CoverageError("doc index out of range " + PairName(qid, doc));
    }
    auto& mark = seen[qid];
    auto& vals = scores[qid];
    if (mark.empty()) {
      mark.assign(nd, false);
      vals.assign(nd, 0.0);
    }
    if (mark[doc]) throw CoverageError("duplicate score " + PairName(qid, doc));
    mark[doc] = true;
    vals[doc] = score;
  }

  for (const QueryGroup& g : groups) {
    const auto it = seen.find(g.query_id);
    for (std::size_t d = 0; d < g.num_docs(); ++d) {
      if (it == seen.end() || !it->second[d]) {
        throw CoverageError("missing score " + PairName(g.query_id, d));
      }
    }
  }
  return scores;
}

ScoreMap LoadExternalScores(const std::string& path,
                            std::span<const QueryGroup> groups) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ParseScores(in, groups);
}

void WriteScores(std::ostream& out, std::span<const QueryGroup> groups,
                 const ScoreMap& scores) {
  char buf[64];
  for (const QueryGroup& g : groups) {
    const auto& vals = scores.at(g.query_id);
    for (std::size_t d = 0; d < g.num_docs(); ++d) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), vals[d]);
      out << g.query_id << '\t' << d << '\t' << std::string_view(buf, ptr - buf)
          << '\n';
    }
  }
}

void WriteScoresFile(const std::string& path,
                     std::span<const QueryGroup> groups,
                     const ScoreMap& scores) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  WriteScores(out, groups, scores);
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace dlcm::data
