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
#include <span>
#include <string>
#include <vector>

#include "nest/device.hpp"

namespace nest {

/**
 * Injective assignment of logical qubits 0..n-1 to physical qubits.
 *
 * Ordering and equality of maps used for tie-breaking compare the sorted
 * physical set first, then the assignment itself.
 */
class CircuitMap {
 public:
  CircuitMap() = default;
  explicit CircuitMap(std::vector<PhysicalQubit> assignment);

  int size() const noexcept { return static_cast<int>(assignment_.size()); }
  PhysicalQubit physical(int logical) const { return assignment_.at(logical); }
  std::span<const PhysicalQubit> assignment() const noexcept { return assignment_; }
  /// Image set in ascending order.
  std::span<const PhysicalQubit> physical_set() const noexcept { return sorted_; }
  bool contains(PhysicalQubit p) const noexcept;
  /// Logical index placed on p, or -1.
  int logical_of(PhysicalQubit p) const noexcept;

  bool same_set(const CircuitMap& other) const noexcept {
    return sorted_ == other.sorted_;
  }

  /// "{1,2}" style rendering of the physical set.
  std::string set_string() const;
  /// "1;2" style rendering of physical set, for CSV cells.
  std::string csv_cell() const;

  friend bool operator==(const CircuitMap& a, const CircuitMap& b) {
    return a.assignment_ == b.assignment_;
  }
  friend std::strong_ordering operator<=>(const CircuitMap& a,
                                          const CircuitMap& b) {
    if (auto c = a.sorted_ <=> b.sorted_; c != 0) return c;
    return a.assignment_ <=> b.assignment_;
  }

 private:
  std::vector<PhysicalQubit> assignment_;
  std::vector<PhysicalQubit> sorted_;
};

/// True iff the physical set induces a connected subgraph (empty set: false).
bool is_connected_set(std::span<const PhysicalQubit> set,
                      const DeviceSnapshot& snapshot);

/// Injective, in range, and connected on the snapshot.
bool is_valid_map(const CircuitMap& map, const DeviceSnapshot& snapshot);

/// Number of physical qubits in `a` that are not in `b`.
int set_difference_size(const CircuitMap& a, const CircuitMap& b);

}  // namespace nest
