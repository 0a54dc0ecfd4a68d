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
#include <string>
#include <vector>

#include "nest/circuit_map.hpp"
#include "nest/circuits.hpp"
#include "nest/device.hpp"
#include "nest/optimizer.hpp"
#include "nest/schedule.hpp"
#include "nest/simulator.hpp"

namespace nest {

struct Problem {
  std::string name;
  ParamCircuit ansatz;  // no measurements; ESP is scored with measure_all appended
  PauliHamiltonian hamiltonian;
  std::optional<WeightedGraph> graph;  // set for MaxCut problems
};

Problem make_vqe_problem(std::string name, PauliHamiltonian h, int reps = 3);
Problem make_qaoa_problem(std::string name, const WeightedGraph& graph);

enum class Technique { Nest, BestMap, Qoncord, RawSchedule };
std::string_view technique_name(Technique t);

enum class TransitionMode { Walk, Jump };

struct TechniqueConfig {
  Technique technique = Technique::Nest;
  /// Kind and fractions; sigma bounds come from the seed maps unless
  /// `explicit_bounds` is set. NEST forces InvertedReLU.
  EspSchedule schedule;
  bool explicit_bounds = false;
  int cycles = kDefaultCycles;
  int iters_per_cycle = kDefaultItersPerCycle;
  TransitionMode transition = TransitionMode::Walk;
  int shots = 4096;
  Backend backend = Backend::Auto;
  bool noisy = true;
  /// NEST: each cycle restarts the optimizer from the incumbent parameters, since
  /// values recorded on the previous map are not comparable with the new one.
  bool restart_each_cycle = true;

  OptimizerConfig nest_optimizer{Method::Cobyla, 1.0, 0,
                                 Termination::sliding_window(100, 0.04), kDefaultTol, {}};
  OptimizerConfig bestmap_optimizer{Method::Cobyla, 1.0, kDefaultMaxEvals,
                                    Termination::default_tol(kDefaultTol), kDefaultTol, {}};
  OptimizerConfig qoncord_phase1{Method::Cobyla, 1.0, kDefaultMaxEvals,
                                 Termination::default_tol(0.1), kDefaultTol, {}};
  OptimizerConfig qoncord_phase2{Method::Cobyla, 0.1, kDefaultMaxEvals,
                                 Termination::default_tol(kDefaultTol), kDefaultTol, {}};
  double qoncord_c = 1.0;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

struct IterationRow {
  int iter = 0;
  int cycle = 0;  // NEST cycle, or Qoncord phase
  double energy = 0.0;
  CircuitMap map;
  double esp = 0.0;
  int depth = 0;
};

struct PhaseInfo {
  std::string device;
  CircuitMap map;
  double esp = 0.0;
  double fidelity_estimate = 0.0;  // Qoncord estimator on that device
  double initial_step = 0.0;
  Termination termination;
  int iterations = 0;
  StopReason terminated_by = StopReason::Budget;
};

struct RunRecord {
  std::string technique;
  std::string benchmark;
  std::string device;
  std::uint64_t seed = 0;
  int num_qubits = 0;
  std::vector<IterationRow> rows;
  double best_energy = 0.0;
  int iterations = 0;
  /// NEST: successive distinct maps. BestMap: one. Qoncord: one per phase.
  std::vector<CircuitMap> maps_used;
  /// NEST only: the map of every cycle that was entered, and its target.
  std::vector<CircuitMap> cycle_maps;
  std::vector<double> cycle_targets;
  double mean_esp = 0.0;
  double mean_depth = 0.0;
  StopReason terminated_by = StopReason::Budget;
  std::vector<double> final_params;
  std::vector<PhaseInfo> phases;
  double mapping_ms = 0.0;
};

/// Uniform in [-pi, pi) per parameter from the run seed.
std::vector<double> initial_params(int count, std::uint64_t seed);

RunRecord run_nest(const Problem& problem, const DeviceSnapshot& snapshot,
                   const TechniqueConfig& cfg, std::uint64_t seed);
RunRecord run_bestmap(const Problem& problem, const DeviceSnapshot& snapshot,
                      const TechniqueConfig& cfg, std::uint64_t seed);
RunRecord run_qoncord(const Problem& problem, const DeviceSnapshot& first,
                      const DeviceSnapshot& second, const TechniqueConfig& cfg,
                      std::uint64_t seed);

/// Dispatches on cfg.technique. Qoncord needs exactly two snapshots, the others one.
RunRecord run_technique(const Problem& problem, std::span<const DeviceSnapshot* const> snapshots,
                        const TechniqueConfig& cfg, std::uint64_t seed);

struct ConcurrencyReport {
  int k = 0;
  std::vector<int> iterations;
  double mean_iterations = 0.0;
  double throughput = 0.0;
  int ticks = 0;
  /// True when the active maps were pairwise disjoint at every tick.
  bool disjoint = true;
  std::vector<CircuitMap> initial_maps;
};

struct ConcurrentResult {
  std::vector<RunRecord> records;
  ConcurrencyReport report;
};

/**
 * Co-located NEST jobs on one device with a shared lockstep iteration clock.
 * Job j uses seed_for_job(seed, j); job 0 keeps `seed`, so k=1 equals run_nest.
 */
ConcurrentResult run_concurrent(std::span<const Problem> jobs, const DeviceSnapshot& snapshot,
                                const TechniqueConfig& cfg, std::uint64_t seed);

std::uint64_t seed_for_job(std::uint64_t seed, int job);

/// Resource protocol: indices of the devices available in one repetition,
/// `pick` distinct ones out of `pool`, in sampled order.
std::vector<int> sample_available_devices(int pool, int pick, std::uint64_t seed);

}  // namespace nest
