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
#include <optional>
#include <span>
#include <vector>

#include "nest/circuits.hpp"
#include "nest/device.hpp"
#include "nest/runner.hpp"

namespace nest {

inline constexpr int kMaxExactCutVertices = 24;

/// (ideal - achieved) / ideal * 100.
double energy_gap(double ideal_min, double achieved_min);

double user_cost(double c, double q, double mean_esp, double mean_depth, double iterations);

/// Jobs per iteration tick: k / mean_iterations.
double throughput(int k, double mean_iterations);

/// Cut weight of the partition encoded by `bits` (bit v = side of vertex v).
double cut_value(const WeightedGraph& graph, std::uint64_t bits);
double brute_force_max_cut(const WeightedGraph& graph);
double approximation_ratio(double cut, const WeightedGraph& graph);
double best_sampled_cut(const WeightedGraph& graph, std::span<const std::uint64_t> samples);

/**
 * Best cut among `shots` samples of the final parameters on the run's last
 * map, under the same noise model the run used.
 */
double sampled_cut_of_run(const Problem& problem, const DeviceSnapshot& snapshot,
                          const RunRecord& record, const TechniqueConfig& cfg, int shots = 4096);

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample std (n-1); 0 for n == 1
  int n = 0;
};

Stat mean_std(std::span<const double> values);

struct MetricReport {
  Stat energy_gap_pct;
  Stat iterations;
  Stat user_cost;
  Stat best_energy;
  Stat mean_esp;
  Stat mean_depth;
  std::optional<Stat> approximation_ratio;
  /// True for a single record, where std is reported as 0 by convention.
  bool single_run = false;
};

/// Aggregates over seeds. `approx_ratios` is per record when given.
MetricReport aggregate(std::span<const RunRecord> records, double ideal_min, double c = 1.0,
                       std::span<const double> approx_ratios = {});

}  // namespace nest
