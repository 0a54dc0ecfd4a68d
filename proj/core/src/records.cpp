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

#include "nest/records.hpp"

#include <charconv>
#include <cmath>
#include "json.hpp"
#include <sstream>

#include "nest/error.hpp"

namespace nest {

using json = nlohmann::ordered_json;

namespace {

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

void write_cell(std::string& out, const std::string& cell) {
  if (!needs_quotes(cell)) {
    out += cell;
    return;
  }
  out.push_back('"');
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

void write_line(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out.push_back(',');
    write_cell(out, cells[i]);
  }
  out.push_back('\n');
}

template <typename T>
T parse_number(const std::string& s, const char* column) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(std::string("bad ") + column + " value '" + s + "'");
  }
  return v;
}

json stat_json(const Stat& s) { return {{"mean", s.mean}, {"std", s.std}, {"n", s.n}}; }

json map_json(const CircuitMap& m) {
  return json(std::vector<PhysicalQubit>(m.assignment().begin(), m.assignment().end()));
}

json record_json(const RunRecord& r, double ideal_min, double c) {
  json j;
  j["technique"] = r.technique;
  j["benchmark"] = r.benchmark;
  j["device"] = r.device;
  j["seed"] = r.seed;
  j["num_qubits"] = r.num_qubits;
  j["iterations"] = r.iterations;
  j["best_energy"] = r.best_energy;
  j["energy_gap_pct"] = energy_gap(ideal_min, r.best_energy);
  j["mean_esp"] = r.mean_esp;
  j["mean_depth"] = r.mean_depth;
  j["user_cost"] = user_cost(c, r.num_qubits, r.mean_esp, r.mean_depth, r.iterations);
  j["terminated_by"] = std::string(stop_reason_name(r.terminated_by));
  json maps = json::array();
  for (const auto& m : r.maps_used) maps.push_back(map_json(m));
  j["maps_used"] = maps;
  if (!r.cycle_targets.empty()) j["cycle_targets"] = r.cycle_targets;
  if (!r.phases.empty()) {
    json phases = json::array();
    for (const auto& p : r.phases) {
      phases.push_back({{"device", p.device},
                        {"map", map_json(p.map)},
                        {"esp", p.esp},
                        {"fidelity_estimate", p.fidelity_estimate},
                        {"initial_step", p.initial_step},
                        {"tolerance", p.termination.tol},
                        {"iterations", p.iterations},
                        {"terminated_by", std::string(stop_reason_name(p.terminated_by))}});
    }
    j["phases"] = phases;
  }
  j["mapping_ms"] = r.mapping_ms;
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  write_line(out, table.header);
  for (const auto& row : table.rows) write_line(out, row);
  return out;
}

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> cur;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      cur.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        cur.push_back(std::move(cell));
        lines.push_back(std::move(cur));
      }
      cur.clear();
      cell.clear();
      any = false;
    } else {
      cell.push_back(c);
      any = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV cell");
  if (any || !cell.empty()) {
    cur.push_back(std::move(cell));
    lines.push_back(std::move(cur));
  }
  CsvTable t;
  if (lines.empty()) return t;
  t.header = std::move(lines.front());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != t.header.size()) {
      throw ParseError("CSV row " + std::to_string(i) + " has " + std::to_string(lines[i].size()) +
                       " cells, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(lines[i]));
  }
  return t;
}

CsvTable records_table(const RunRecord& record) {
  CsvTable t;
  t.header = {"iter", "cycle", "energy", "esp", "depth", "map"};
  for (const auto& r : record.rows) {
    t.rows.push_back({std::to_string(r.iter), std::to_string(r.cycle), format_double(r.energy),
                      format_double(r.esp), std::to_string(r.depth), r.map.csv_cell()});
  }
  return t;
}

std::vector<RecordRow> parse_records_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  const std::vector<std::string> want{"iter", "cycle", "energy", "esp", "depth", "map"};
  if (t.header != want) throw ParseError("unexpected records header");
  std::vector<RecordRow> out;
  for (const auto& row : t.rows) {
    RecordRow r;
    r.iter = parse_number<int>(row[0], "iter");
    r.cycle = parse_number<int>(row[1], "cycle");
    r.energy = parse_number<double>(row[2], "energy");
    r.esp = parse_number<double>(row[3], "esp");
    r.depth = parse_number<int>(row[4], "depth");
    std::stringstream ss(row[5]);
    std::string item;
    while (std::getline(ss, item, ';')) r.map.push_back(parse_number<int>(item, "map"));
    out.push_back(std::move(r));
  }
  return out;
}

std::string record_summary_json(const RunRecord& record, double ideal_min, double c) {
  return record_json(record, ideal_min, c).dump(2) + "\n";
}

std::string experiment_summary_json(const std::string& experiment,
                                    std::span<const RunRecord> records, double ideal_min,
                                    const MetricReport& report, double c) {
  json j;
  j["experiment"] = experiment;
  j["ideal_min"] = ideal_min;
  j["runs"] = records.size();
  j["energy_gap_pct"] = stat_json(report.energy_gap_pct);
  j["iterations"] = stat_json(report.iterations);
  j["user_cost"] = stat_json(report.user_cost);
  j["best_energy"] = stat_json(report.best_energy);
  j["mean_esp"] = stat_json(report.mean_esp);
  j["mean_depth"] = stat_json(report.mean_depth);
  if (report.approximation_ratio) j["approximation_ratio"] = stat_json(*report.approximation_ratio);
  if (report.single_run) j["note"] = "single run: std reported as 0";
  json runs = json::array();
  for (const auto& r : records) runs.push_back(record_json(r, ideal_min, c));
  j["records"] = runs;
  return j.dump(2) + "\n";
}

}  // namespace nest
