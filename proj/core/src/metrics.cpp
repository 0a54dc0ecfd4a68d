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

#include "nest/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "nest/error.hpp"
#include "nest/simulator.hpp"

namespace nest {

double energy_gap(double ideal_min, double achieved_min) {
  if (ideal_min == 0.0) throw DivisionByZero("energy gap needs a nonzero ideal minimum");
  return (ideal_min - achieved_min) / ideal_min * 100.0;
}

double user_cost(double c, double q, double mean_esp, double mean_depth, double iterations) {
  return c * q * mean_esp * mean_depth * iterations;
}

double throughput(int k, double mean_iterations) {
  if (k < 1) throw DomainError("throughput needs k >= 1");
  if (!(mean_iterations > 0.0)) throw DivisionByZero("throughput needs positive iterations");
  return k / mean_iterations;
}

double cut_value(const WeightedGraph& graph, std::uint64_t bits) {
  double cut = 0.0;
  for (const auto& e : graph.edges) {
    if (((bits >> e.u) ^ (bits >> e.v)) & 1u) cut += e.weight;
  }
  return cut;
}

double brute_force_max_cut(const WeightedGraph& graph) {
  const int n = graph.num_vertices;
  if (n > kMaxExactCutVertices) {
    throw TooLargeForExact(std::to_string(n) + " vertices exceed the brute-force bound of " +
                           std::to_string(kMaxExactCutVertices));
  }
  if (n <= 1) return 0.0;
  // Vertex n-1 stays on side 0, which enumerates each partition once.
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  double best = 0.0;
  for (std::uint64_t bits = 0; bits < count; ++bits) best = std::max(best, cut_value(graph, bits));
  return best;
}

double approximation_ratio(double cut, const WeightedGraph& graph) {
  const double best = brute_force_max_cut(graph);
  if (best == 0.0) throw DivisionByZero("graph has zero maximum cut");
  return cut / best;
}

double best_sampled_cut(const WeightedGraph& graph, std::span<const std::uint64_t> samples) {
  double best = 0.0;
  for (auto s : samples) best = std::max(best, cut_value(graph, s));
  return best;
}

double sampled_cut_of_run(const Problem& problem, const DeviceSnapshot& snapshot,
                          const RunRecord& record, const TechniqueConfig& cfg, int shots) {
  if (!problem.graph) throw DomainError("problem has no graph");
  if (record.maps_used.empty()) throw EmptyInput("record has no maps");
  const CircuitMap& map = record.maps_used.back();
  const NoiseBinding noise = NoiseBinding::from_snapshot(snapshot);
  Executor exec(route(problem.ansatz, map, snapshot), problem.hamiltonian,
                cfg.noisy ? &noise : nullptr, cfg.backend);
  const auto samples = exec.sample(record.final_params, shots, record.seed);
  return best_sampled_cut(*problem.graph, samples);
}

Stat mean_std(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("no values to aggregate");
  Stat s;
  s.n = static_cast<int>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / (s.n - 1));
  }
  return s;
}

MetricReport aggregate(std::span<const RunRecord> records, double ideal_min, double c,
                       std::span<const double> approx_ratios) {
  if (records.empty()) throw EmptyInput("no records to aggregate");
  std::vector<double> gap, iters, cost, best, esp, depth;
  for (const auto& r : records) {
    gap.push_back(energy_gap(ideal_min, r.best_energy));
    iters.push_back(r.iterations);
    cost.push_back(user_cost(c, r.num_qubits, r.mean_esp, r.mean_depth, r.iterations));
    best.push_back(r.best_energy);
    esp.push_back(r.mean_esp);
    depth.push_back(r.mean_depth);
  }
  MetricReport m;
  m.energy_gap_pct = mean_std(gap);
  m.iterations = mean_std(iters);
  m.user_cost = mean_std(cost);
  m.best_energy = mean_std(best);
  m.mean_esp = mean_std(esp);
  m.mean_depth = mean_std(depth);
  if (!approx_ratios.empty()) {
    if (approx_ratios.size() != records.size()) {
      throw LengthMismatch("one approximation ratio per record expected");
    }
    m.approximation_ratio = mean_std(approx_ratios);
  }
  m.single_run = records.size() == 1;
  return m;
}

}  // namespace nest
