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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace nest {

using PhysicalQubit = int;

/// Returned by coupling_distance for qubits in different components.
inline constexpr int kDisconnected = std::numeric_limits<int>::max();

/// Unordered coupling-graph edge, stored with u < v.
struct Edge {
  PhysicalQubit u = 0;
  PhysicalQubit v = 0;

  Edge() = default;
  Edge(PhysicalQubit a, PhysicalQubit b) : u(a < b ? a : b), v(a < b ? b : a) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct QubitProps {
  double t1_us = 0.0;
  double t2_us = 0.0;
  double readout_error = 0.0;
  double sq_error = 0.0;
  double sq_duration_us = 0.0;

  friend bool operator==(const QubitProps&, const QubitProps&) = default;
};

/// Two-qubit gate calibration. Symmetric in the edge direction.
struct EdgeProps {
  double tq_error = 0.0;
  double tq_duration_us = 0.0;

  friend bool operator==(const EdgeProps&, const EdgeProps&) = default;
};

/**
 * Immutable calibration snapshot of one device: coupling graph, per-qubit
 * coherence and readout data, per-edge two-qubit gate data.
 *
 * All durations and coherence times are in microseconds. The constructor
 * validates every invariant and throws ValidationError naming the field.
 */
class DeviceSnapshot {
 public:
  DeviceSnapshot(std::string name, int num_qubits,
                 std::vector<QubitProps> qubits,
                 std::vector<std::pair<Edge, EdgeProps>> edges,
                 std::string calibration_date = {});

  const std::string& name() const noexcept { return name_; }
  const std::string& calibration_date() const noexcept { return date_; }
  int num_qubits() const noexcept { return num_qubits_; }

  const QubitProps& qubit(PhysicalQubit q) const;
  std::span<const QubitProps> qubits() const noexcept { return qubits_; }

  /// Edges in ascending (u, v) order.
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const EdgeProps> edge_props() const noexcept { return edge_props_; }

  bool has_edge(PhysicalQubit a, PhysicalQubit b) const noexcept;
  /// nullptr when (a, b) is not a coupling edge.
  const EdgeProps* find_edge(PhysicalQubit a, PhysicalQubit b) const noexcept;

  /// Neighbors of q in ascending order.
  std::span<const PhysicalQubit> neighbors(PhysicalQubit q) const;

  /// Hop distances from `source` to every qubit (kDisconnected if unreachable).
  std::vector<int> distances_from(PhysicalQubit source) const;

  friend bool operator==(const DeviceSnapshot& a, const DeviceSnapshot& b);

 private:
  static std::uint64_t key(PhysicalQubit a, PhysicalQubit b) noexcept;

  std::string name_;
  int num_qubits_;
  std::string date_;
  std::vector<QubitProps> qubits_;
  std::vector<Edge> edges_;
  std::vector<EdgeProps> edge_props_;
  std::vector<std::vector<PhysicalQubit>> adjacency_;
  std::unordered_map<std::uint64_t, std::size_t> edge_index_;
};

/// Shortest-path hop count; kDisconnected across components.
int coupling_distance(const DeviceSnapshot& snapshot, PhysicalQubit u,
                      PhysicalQubit v);

DeviceSnapshot parse_snapshot(const std::string& json_text);
std::string snapshot_to_json(const DeviceSnapshot& snapshot);
DeviceSnapshot load_snapshot(const std::filesystem::path& path);
void save_snapshot(const DeviceSnapshot& snapshot,
                   const std::filesystem::path& path);

/// Whitespace-separated "u v" per line, '#' comments.
std::vector<Edge> parse_edge_list(const std::string& text);
std::vector<Edge> load_edge_list(const std::filesystem::path& path);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

enum class TopologyKind { EdgeFile, HeavyHex27, HeavyHex127, Path, Ring };

struct Topology {
  TopologyKind kind = TopologyKind::Path;
  int num_qubits = 0;             // Path / Ring
  std::filesystem::path file;    // EdgeFile; resolved against data_dir()

  static Topology path(int q) { return {TopologyKind::Path, q, {}}; }
  static Topology ring(int q) { return {TopologyKind::Ring, q, {}}; }
  static Topology heavy_hex_27() { return {TopologyKind::HeavyHex27, 27, {}}; }
  static Topology heavy_hex_127() { return {TopologyKind::HeavyHex127, 127, {}}; }
  static Topology edge_file(std::filesystem::path p) {
    return {TopologyKind::EdgeFile, 0, std::move(p)};
  }
};

/**
 * Noise draw ranges for a synthetic device. Each quantity is drawn inside its
 * range through a latent Gaussian field; `spatial_correlation` mixes a field
 * smoothed over graph distance (1) with independent per-site noise (0).
 */
struct NoiseProfile {
  std::uint64_t seed = 0;
  Range sq_error{5e-5, 3e-4};
  Range tq_error{1.5e-3, 8e-3};
  Range readout{5e-3, 2e-2};
  Range t1_us{150.0, 400.0};
  Range t2_us{100.0, 350.0};
  Range sq_duration_us{0.035, 0.035};
  Range tq_duration_us{0.3, 0.5};
  double spatial_correlation = 0.5;
  /// Gaussian kernel width (hops) of the correlated field.
  double correlation_length = 2.0;
};

struct SyntheticDeviceSpec {
  std::string name = "synthetic";
  Topology topology;
  NoiseProfile noise;
};

DeviceSnapshot synthesize_device(const SyntheticDeviceSpec& spec);

/**
 * Synthetic spec file: {"name", "topology", "noise": {...}}. `topology` is
 * "heavy_hex_27", "heavy_hex_127", {"path": Q}, {"ring": Q} or
 * {"edge_file": "topologies/x.txt"}; noise keys mirror NoiseProfile with
 * two-element [lo, hi] arrays for ranges. Omitted keys keep their defaults.
 */
SyntheticDeviceSpec parse_synthetic_spec(const std::string& json_text);

/// A snapshot file, or a {"synthetic": spec} file that is synthesized on load.
DeviceSnapshot load_device(const std::filesystem::path& path);

std::vector<Edge> topology_edges(const Topology& topology, int* num_qubits);

}  // namespace nest
