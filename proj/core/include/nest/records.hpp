// Copyright 2026 The nestvqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "nest/metrics.hpp"
#include "nest/runner.hpp"

namespace nest {

/// Minimal RFC-4180 style table: comma separated, quotes around cells that
/// contain commas, quotes or newlines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const CsvTable& table);
/// Throws ParseError on ragged rows or unterminated quotes.
CsvTable parse_csv(const std::string& text);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Per-iteration rows: iter, cycle, energy, esp, depth, map ("1;2;5").
CsvTable records_table(const RunRecord& record);

struct RecordRow {
  int iter = 0;
  int cycle = 0;
  double energy = 0.0;
  double esp = 0.0;
  int depth = 0;
  std::vector<PhysicalQubit> map;  // sorted physical set
};

std::vector<RecordRow> parse_records_csv(const std::string& text);

/// Run metadata and derived values, without the per-iteration rows.
std::string record_summary_json(const RunRecord& record, double ideal_min, double c = 1.0);

/// Experiment-level summary: aggregate statistics plus one entry per run.
std::string experiment_summary_json(const std::string& experiment,
                                    std::span<const RunRecord> records, double ideal_min,
                                    const MetricReport& report, double c = 1.0);

}  // namespace nest
