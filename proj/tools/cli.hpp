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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nest/device.hpp"
#include "nest/runner.hpp"

namespace nest::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitRuntime = 3,
  kExitTooLarge = 4,
  kExitAllocation = 5,
};

struct BenchmarkSpec {
  std::string name;
  std::filesystem::path hamiltonian;  // VQE
  std::filesystem::path graph;        // MaxCut
  int reps = 3;
};

struct ExperimentSpec {
  std::string name;
  TechniqueConfig cfg;
  std::string benchmark;
  /// Fixed devices (one, or two for Qoncord) ...
  std::vector<std::string> devices;
  /// ... or the availability protocol: `pick` of these sampled per seed.
  std::vector<std::string> device_pool;
  int pick = 2;
  std::vector<std::uint64_t> seeds;
  double cost_c = 1.0;
  int cut_shots = 4096;
};

struct MultiprogSpec {
  std::string benchmark;
  std::string device;
  std::vector<std::uint64_t> seeds;
  TechniqueConfig cfg;
};

struct Suite {
  std::filesystem::path base_dir;  // directory of the config file
  std::filesystem::path output_dir = "out";
  int parallel_seeds = 1;
  std::string baseline;  // experiment name for throughput ratios
  std::map<std::string, std::filesystem::path> devices;
  std::map<std::string, BenchmarkSpec> benchmarks;
  std::vector<ExperimentSpec> experiments;
  std::optional<MultiprogSpec> multiprog;
};

/// Command-line flags that override the config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> shots;
  std::optional<int> parallel;
  std::optional<std::filesystem::path> out;
};

/// Throws ConfigError (or ParseError) for anything malformed.
Suite parse_suite(const std::string& json_text, const std::filesystem::path& base_dir = {});
Suite load_suite(const std::filesystem::path& path);
void apply_overrides(Suite& suite, const Overrides& o);

/// Ideal minimum of a problem: exact eigenvalue, or minus the brute-force cut
/// for MaxCut problems beyond the eigensolver bound.
double ideal_minimum(const Problem& problem);

int cmd_run(const std::filesystem::path& config, const Overrides& o, std::ostream& out,
            std::ostream& err);
int cmd_multiprog(const std::filesystem::path& config, int k, const Overrides& o,
                  std::ostream& out, std::ostream& err);
int cmd_schedules(const EspSchedule& schedule, std::ostream& out, std::ostream& err);
/// `kind` is "hamiltonian", "graph" or empty to sniff the file.
int cmd_oracle(const std::filesystem::path& file, const std::string& kind, std::ostream& out,
               std::ostream& err);
int cmd_maps(const std::filesystem::path& device, int qubits, int reps,
             const std::filesystem::path& graph, std::ostream& out, std::ostream& err);
int cmd_score_map(const std::filesystem::path& device, const std::vector<int>& assignment,
                  int reps, const std::filesystem::path& graph, std::ostream& out,
                  std::ostream& err);

/// Full command line: parse with CLI11 and dispatch.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nest::cli
