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

// EvalReport serialisation.
//
// Per-query TSV:  qid  ndcg@1 ... ndcg@K  err@1 ... err@K
// Aggregate table: one row per system, same metric columns, means printed
// with four decimals and a trailing '*' where the p-value against the
// report's baseline is <= 0.01.

#ifndef DLCM_METRICS_REPORT_H_
#define DLCM_METRICS_REPORT_H_

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dlcm/metrics/metrics.h"

namespace dlcm::metrics {

inline constexpr double kSignificanceLevel = 0.01;

// Values are written in shortest round-trip form, so ReadReport restores
// them exactly.
void WriteReport(std::ostream& out, const EvalReport& report);
EvalReport ReadReport(std::istream& in);  // ParseError on malformed input
void WriteReportFile(const std::string& path, const EvalReport& report);
EvalReport ReadReportFile(const std::string& path);

using NamedReport = std::pair<std::string, const EvalReport*>;
void WriteAggregateTable(std::ostream& out, const std::vector<NamedReport>& rows);

// metric  cutoff  p_value  baseline
void WriteSignificance(std::ostream& out, const EvalReport& report);

}  // namespace dlcm::metrics

#endif  // DLCM_METRICS_REPORT_H_
