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

#include "dlcm/data/letor.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "dlcm/error.h"

namespace dlcm::data {
namespace {

struct SparseDoc {
  int label;
  std::string doc_id;
  std::vector<std::pair<std::size_t, float>> values;  // 0-based index
};

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename N>
bool ParseNumber(std::string_view s, N& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string FormatFloat(float v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

LetorData ParseLetor(std::istream& in) {
  LetorData result;
  std::vector<std::string> qids;
  std::vector<std::vector<SparseDoc>> docs;
  std::unordered_map<std::string, std::size_t> group_of;
  std::size_t max_index = 0;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    std::string_view comment;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      comment = Trim(line.substr(hash + 1));
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;

    const auto tokens = SplitWhitespace(line);
    if (tokens.size() < 2) {
      throw ParseError("expected '<label> qid:<id> ...'", line_no);
    }
    int label = 0;
    if (!ParseNumber(tokens[0], label)) {
      throw ParseError("non-integer label '" + std::string(tokens[0]) + "'",
                       line_no);
    }
    if (label < kMinGrade || label > kMaxGrade) {
      label = std::clamp(label, kMinGrade, kMaxGrade);
      ++result.clamped_labels;
    }
    if (tokens[1].substr(0, 4) != "qid:" || tokens[1].size() == 4) {
      throw ParseError("missing qid in '" + std::string(tokens[1]) + "'",
                       line_no);
    }
    const std::string qid(tokens[1].substr(4));

    SparseDoc doc{label, std::string(comment), {}};
    for (std::size_t t = 2; t < tokens.size(); ++t) {
      const std::string_view tok = tokens[t];
      const auto colon = tok.find(':');
      std::size_t index = 0;
      float value = 0.0f;
      if (colon == std::string_view::npos ||
          !ParseNumber(tok.substr(0, colon), index) ||
          !ParseNumber(tok.substr(colon + 1), value)) {
        throw ParseError("malformed feature '" + std::string(tok) + "'",
                         line_no);
      }
      if (index == 0) {
        throw ParseError("feature indices are 1-based", line_no);
      }
      for (const auto& [seen, _] : doc.values) {
        if (seen == index - 1) {
          throw ParseError("duplicate feature index " + std::to_string(index),
                           line_no);
        }
      }
      doc.values.emplace_back(index - 1, value);
      max_index = std::max(max_index, index);
    }

    auto [it, inserted] = group_of.try_emplace(qid, qids.size());
    if (inserted) {
      qids.push_back(qid);
      docs.emplace_back();
    }
    docs[it->second].push_back(std::move(doc));
  }
  if (qids.empty()) throw ParseError("no ranking data found", 0);
  if (max_index == 0) throw ParseError("no features found", 0);

  result.num_features = max_index;
  result.groups.reserve(qids.size());
  for (std::size_t q = 0; q < qids.size(); ++q) {
    QueryGroup g;
    g.query_id = qids[q];
    g.features = grad::Array<float>({docs[q].size(), max_index}, 0.0f);
    for (std::size_t d = 0; d < docs[q].size(); ++d) {
      SparseDoc& doc = docs[q][d];
      g.labels.push_back(doc.label);
      g.doc_ids.push_back(doc.doc_id.empty() ? std::to_string(d)
                                             : std::move(doc.doc_id));
      for (const auto& [index, value] : doc.values) {
        g.features.at(d, index) = value;
      }
    }
    result.groups.push_back(std::move(g));
  }
  return result;
}

LetorData ReadLetorFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return ParseLetor(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

void WidenFeatures(LetorData& data, std::size_t num_features) {
  if (num_features < data.num_features) {
    throw ConfigError("cannot narrow features from " +
                      std::to_string(data.num_features) + " to " +
                      std::to_string(num_features));
  }
  if (num_features == data.num_features) return;
  for (QueryGroup& g : data.groups) {
    grad::Array<float> wide({g.num_docs(), num_features}, 0.0f);
    for (std::size_t d = 0; d < g.num_docs(); ++d) {
      std::copy_n(g.row(d), g.num_features(), &wide.at(d, 0));
    }
    g.features = std::move(wide);
  }
  data.num_features = num_features;
}

void WriteLetor(std::ostream& out, std::span<const QueryGroup> groups) {
  for (const QueryGroup& g : groups) {
    for (std::size_t d = 0; d < g.num_docs(); ++d) {
      out << g.labels[d] << " qid:" << g.query_id;
      const float* row = g.row(d);
      for (std::size_t f = 0; f < g.num_features(); ++f) {
        out << ' ' << (f + 1) << ':' << FormatFloat(row[f]);
      }
      out << " #" << g.doc_ids[d] << '\n';
    }
  }
}

void WriteLetorFile(const std::string& path,
                    std::span<const QueryGroup> groups) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  WriteLetor(out, groups);
  if (!out) throw IoError("write failed for " + path);
}

QueryGroup NormalizePerQuery(const QueryGroup& g) {
  QueryGroup out = g;
  const std::size_t nd = g.num_docs(), nf = g.num_features();
  for (std::size_t f = 0; f < nf; ++f) {
    float lo = g.features.at(0, f), hi = lo;
    for (std::size_t d = 1; d < nd; ++d) {
      lo = std::min(lo, g.features.at(d, f));
      hi = std::max(hi, g.features.at(d, f));
    }
    const float range = hi - lo;
    for (std::size_t d = 0; d < nd; ++d) {
      out.features.at(d, f) =
          range > 0.0f ? (g.features.at(d, f) - lo) / range : 0.0f;
    }
  }
  return out;
}

void NormalizeAll(std::vector<QueryGroup>& groups) {
  for (QueryGroup& g : groups) g = NormalizePerQuery(g);
}

}  // namespace dlcm::data
