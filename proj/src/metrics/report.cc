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

#include "dlcm/metrics/report.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dlcm/error.h"

namespace dlcm::metrics {
namespace {

std::string Shortest(double v) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof(buf), v).ptr);
}

std::string Fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) return out;
    start = tab + 1;
  }
}

void WriteHeader(std::ostream& out, const char* first,
                 const std::vector<std::size_t>& cutoffs) {
  out << first;
  for (Metric m : {Metric::kNdcg, Metric::kErr}) {
    for (std::size_t k : cutoffs) out << '\t' << MetricName(m) << '@' << k;
  }
  out << '\n';
}

// Parses "<metric>@<k>" and checks it against the expected metric.
std::size_t ParseColumn(const std::string& col, Metric want, std::size_t line) {
  const std::string prefix = std::string(MetricName(want)) + "@";
  std::size_t k = 0;
  if (col.rfind(prefix, 0) == 0) {
    const char* b = col.data() + prefix.size();
    const char* e = col.data() + col.size();
    const auto res = std::from_chars(b, e, k);
    if (res.ec == std::errc() && res.ptr == e && k > 0) return k;
  }
  throw ParseError("report: bad column '" + col + "'", line);
}

}  // namespace

void WriteReport(std::ostream& out, const EvalReport& report) {
  WriteHeader(out, "qid", report.cutoffs);
  for (const auto& q : report.per_query) {
    out << q.query_id;
    for (double v : q.ndcg) out << '\t' << Shortest(v);
    for (double v : q.err) out << '\t' << Shortest(v);
    out << '\n';
  }
  if (!out) throw IoError("report: write failed");
}

EvalReport ReadReport(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("report: empty input", 0);
  const std::vector<std::string> header = SplitTabs(line);
  if (header.size() < 3 || header[0] != "qid" || (header.size() - 1) % 2 != 0) {
    throw ParseError("report: bad header", 1);
  }
  EvalReport report;
  report.cutoffs.clear();
  const std::size_t nc = (header.size() - 1) / 2;
  for (std::size_t c = 0; c < nc; ++c) {
    report.cutoffs.push_back(ParseColumn(header[1 + c], Metric::kNdcg, 1));
  }
  for (std::size_t c = 0; c < nc; ++c) {
    if (ParseColumn(header[1 + nc + c], Metric::kErr, 1) != report.cutoffs[c]) {
      throw ParseError("report: ndcg and err cutoffs differ", 1);
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cols = SplitTabs(line);
    if (cols.size() != header.size()) {
      throw ParseError("report: expected " + std::to_string(header.size()) +
                       " columns", line_no);
    }
    QueryMetrics q{cols[0], {}, {}};
    for (std::size_t c = 1; c < cols.size(); ++c) {
      double v = 0.0;
      const auto& s = cols[c];
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ParseError("report: bad value '" + s + "'", line_no);
      }
      (c <= nc ? q.ndcg : q.err).push_back(v);
    }
    report.per_query.push_back(std::move(q));
  }
  return report;
}

void WriteReportFile(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  WriteReport(out, report);
}

EvalReport ReadReportFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  return ReadReport(in);
}

void WriteAggregateTable(std::ostream& out, const std::vector<NamedReport>& rows) {
  if (rows.empty()) return;
  const auto& cutoffs = rows.front().second->cutoffs;
  WriteHeader(out, "system", cutoffs);
  for (const auto& [name, report] : rows) {
    if (report->cutoffs != cutoffs) {
      throw ContractError("aggregate table: reports use different cutoffs");
    }
    out << name;
    for (Metric m : {Metric::kNdcg, Metric::kErr}) {
      const std::vector<double> mean = report->Mean(m);
      for (std::size_t c = 0; c < cutoffs.size(); ++c) {
        out << '\t' << Fixed4(mean[c]);
        if (report->significance &&
            report->significance->values(m).at(c) <= kSignificanceLevel) {
          out << '*';
        }
      }
    }
    out << '\n';
  }
}

void WriteSignificance(std::ostream& out, const EvalReport& report) {
  out << "metric\tcutoff\tp_value\tbaseline\n";
  if (!report.significance) return;
  const Significance& s = *report.significance;
  for (Metric m : {Metric::kNdcg, Metric::kErr}) {
    for (std::size_t c = 0; c < report.cutoffs.size(); ++c) {
      out << MetricName(m) << '\t' << report.cutoffs[c] << '\t'
          << Shortest(s.values(m).at(c)) << '\t' << s.baseline << '\n';
    }
  }
}

}  // namespace dlcm::metrics
