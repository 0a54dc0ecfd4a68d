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

#include "nest/circuit_map.hpp"

#include <algorithm>
#include <queue>

#include "nest/error.hpp"

namespace nest {

CircuitMap::CircuitMap(std::vector<PhysicalQubit> assignment)
    : assignment_(std::move(assignment)), sorted_(assignment_) {
  std::sort(sorted_.begin(), sorted_.end());
  if (std::adjacent_find(sorted_.begin(), sorted_.end()) != sorted_.end()) {
    throw ValidationError("assignment", "circuit map is not injective");
  }
}

bool CircuitMap::contains(PhysicalQubit p) const noexcept {
  return std::binary_search(sorted_.begin(), sorted_.end(), p);
}

int CircuitMap::logical_of(PhysicalQubit p) const noexcept {
  auto it = std::find(assignment_.begin(), assignment_.end(), p);
  return it == assignment_.end() ? -1 : static_cast<int>(it - assignment_.begin());
}

std::string CircuitMap::set_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(sorted_[i]);
  }
  return s + "}";
}

std::string CircuitMap::csv_cell() const {
  std::string s;
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    if (i) s += ";";
    s += std::to_string(sorted_[i]);
  }
  return s;
}

bool is_connected_set(std::span<const PhysicalQubit> set,
                      const DeviceSnapshot& snapshot) {
  if (set.empty()) return false;
  std::vector<PhysicalQubit> members(set.begin(), set.end());
  std::sort(members.begin(), members.end());
  auto in_set = [&](PhysicalQubit p) {
    return std::binary_search(members.begin(), members.end(), p);
  };
  std::vector<PhysicalQubit> seen{members.front()};
  std::queue<PhysicalQubit> frontier;
  frontier.push(members.front());
  while (!frontier.empty()) {
    auto q = frontier.front();
    frontier.pop();
    for (auto r : snapshot.neighbors(q)) {
      if (in_set(r) && std::find(seen.begin(), seen.end(), r) == seen.end()) {
        seen.push_back(r);
        frontier.push(r);
      }
    }
  }
  return seen.size() == members.size();
}

bool is_valid_map(const CircuitMap& map, const DeviceSnapshot& snapshot) {
  for (auto p : map.physical_set()) {
    if (p < 0 || p >= snapshot.num_qubits()) return false;
  }
  return is_connected_set(map.physical_set(), snapshot);
}

int set_difference_size(const CircuitMap& a, const CircuitMap& b) {
  int count = 0;
  for (auto p : a.physical_set()) {
    if (!b.contains(p)) ++count;
  }
  return count;
}

}  // namespace nest
