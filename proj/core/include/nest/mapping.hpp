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

#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nest/circuit_map.hpp"
#include "nest/circuits.hpp"
#include "nest/device.hpp"

namespace nest {

/// ESP differences at or below this are treated as ties.
inline constexpr double kEspTieTolerance = 1e-12;

/**
 * Memoized ESP of one circuit on one snapshot, keyed by the full assignment
 * (routing depends on it, not only on the physical set). Not thread-safe;
 * give each run its own scorer.
 */
class MapScorer {
 public:
  MapScorer(const ParamCircuit& circuit, const DeviceSnapshot& snapshot)
      : circuit_(&circuit), snapshot_(&snapshot) {}

  double esp(const CircuitMap& map);
  const ParamCircuit& circuit() const noexcept { return *circuit_; }
  const DeviceSnapshot& snapshot() const noexcept { return *snapshot_; }
  std::size_t cache_size() const noexcept { return cache_.size(); }

 private:
  const ParamCircuit* circuit_;
  const DeviceSnapshot* snapshot_;
  std::unordered_map<std::string, double> cache_;
};

struct ScoredMap {
  CircuitMap map;
  double esp = 0.0;
};

/// One BFS-grown candidate per non-excluded start qubit, deduplicated by
/// physical set, in order of first discovery.
std::vector<CircuitMap> enumerate_seed_maps(const DeviceSnapshot& snapshot, int n,
                                            std::span<const PhysicalQubit> exclude = {});

std::vector<ScoredMap> score_maps(std::span<const CircuitMap> candidates, MapScorer& scorer);

/// Highest ESP; ties go to the smallest map (sorted set, then assignment).
CircuitMap best_map(std::span<const CircuitMap> candidates, MapScorer& scorer);

/// Closest ESP to `target`; ties go to higher ESP, then the smallest map.
CircuitMap jump_to_target(std::span<const CircuitMap> candidates, MapScorer& scorer,
                          double target);

/**
 * Maps reachable by swapping one physical qubit of `map` for one unused,
 * non-excluded qubit adjacent to it, keeping the set connected. The departing
 * logical qubit moves to the new physical qubit. Sorted ascending.
 */
std::vector<CircuitMap> walk_neighbors(const CircuitMap& map, const DeviceSnapshot& snapshot,
                                       std::span<const PhysicalQubit> exclude = {});

/// Greedy single step over neighbors plus the current map. Staying wins ties.
CircuitMap walk_step(const CircuitMap& current, double target, MapScorer& scorer,
                     std::span<const PhysicalQubit> exclude = {});

/// Chooses a map from the feasible candidates of one job.
using MapPolicy = std::function<CircuitMap(std::span<const CircuitMap>, MapScorer&)>;

struct ZoneRequest {
  const ParamCircuit* circuit = nullptr;  // logical width taken from the circuit
  MapPolicy policy;                       // empty: best_map
};

struct Zone {
  int owner = 0;
  CircuitMap map;
  std::vector<PhysicalQubit> claimed;  // sorted
};

/**
 * Owner table of claimed physical qubits. The single writer in concurrent
 * runs; it never lets two owners hold the same qubit.
 */
class ZoneRegistry {
 public:
  explicit ZoneRegistry(int num_qubits) : owner_(num_qubits, -1) {}

  /// Replaces `job`'s claim. Throws AllocationFailure on overlap with another owner.
  void claim(int job, std::span<const PhysicalQubit> qubits);
  void release(int job);
  /// Qubits held by any owner other than `job`, ascending.
  std::vector<PhysicalQubit> excluded_for(int job) const;
  std::vector<PhysicalQubit> claimed_by(int job) const;
  int owner_of(PhysicalQubit q) const { return owner_.at(q); }

 private:
  std::vector<int> owner_;
};

/// First-come-first-served: job j chooses among seed maps that avoid all
/// qubits claimed by jobs before it.
std::vector<Zone> allocate_zones(std::span<const ZoneRequest> jobs,
                                 const DeviceSnapshot& snapshot,
                                 ZoneRegistry* registry = nullptr);

}  // namespace nest
