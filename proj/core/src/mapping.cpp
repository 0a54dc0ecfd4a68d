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

#include "nest/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "nest/error.hpp"
#include "nest/fidelity.hpp"

namespace nest {

namespace {

std::string assignment_key(const CircuitMap& m) {
  std::string key;
  for (auto p : m.assignment()) {
    key += std::to_string(p);
    key.push_back(',');
  }
  return key;
}

std::vector<char> make_mask(int q, std::span<const PhysicalQubit> exclude) {
  std::vector<char> mask(q, 0);
  for (auto p : exclude) {
    if (p < 0 || p >= q) throw IndexError("excluded qubit out of range");
    mask[p] = 1;
  }
  return mask;
}

void require_nonempty(std::span<const CircuitMap> candidates) {
  if (candidates.empty()) throw EmptyCandidates("no candidate maps");
}

}  // namespace

double MapScorer::esp(const CircuitMap& map) {
  auto key = assignment_key(map);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  double v = map_esp(*circuit_, map, *snapshot_);
  cache_.emplace(std::move(key), v);
  return v;
}

std::vector<CircuitMap> enumerate_seed_maps(const DeviceSnapshot& snapshot, int n,
                                            std::span<const PhysicalQubit> exclude) {
  const int q = snapshot.num_qubits();
  if (n < 1) throw NoFeasibleMap("map width must be at least 1");
  auto blocked = make_mask(q, exclude);
  int free_count = q - static_cast<int>(std::count(blocked.begin(), blocked.end(), 1));
  if (n > free_count) {
    throw NoFeasibleMap("need " + std::to_string(n) + " qubits, only " +
                        std::to_string(free_count) + " available");
  }

  // Visit stamps avoid clearing an O(Q) array per BFS, keeping the total
  // cost proportional to n per start qubit.
  std::vector<int> stamp(q, -1);
  std::vector<PhysicalQubit> order;
  std::vector<CircuitMap> out;
  std::set<std::vector<PhysicalQubit>> seen;
  order.reserve(n);
  for (PhysicalQubit start = 0; start < q; ++start) {
    if (blocked[start]) continue;
    order.clear();
    order.push_back(start);
    stamp[start] = start;
    for (std::size_t head = 0; head < order.size() && static_cast<int>(order.size()) < n;
         ++head) {
      for (auto nb : snapshot.neighbors(order[head])) {
        if (blocked[nb] || stamp[nb] == start) continue;
        stamp[nb] = start;
        order.push_back(nb);
        if (static_cast<int>(order.size()) == n) break;
      }
    }
    if (static_cast<int>(order.size()) < n) continue;
    std::vector<PhysicalQubit> key(order);
    std::sort(key.begin(), key.end());
    if (seen.insert(std::move(key)).second) out.emplace_back(order);
  }
  if (out.empty()) {
    throw NoFeasibleMap("no connected set of " + std::to_string(n) +
                        " free qubits on " + snapshot.name());
  }
  return out;
}

std::vector<ScoredMap> score_maps(std::span<const CircuitMap> candidates, MapScorer& scorer) {
  std::vector<ScoredMap> out;
  out.reserve(candidates.size());
  for (const auto& m : candidates) out.push_back({m, scorer.esp(m)});
  return out;
}

CircuitMap best_map(std::span<const CircuitMap> candidates, MapScorer& scorer) {
  require_nonempty(candidates);
  const CircuitMap* best = &candidates[0];
  double best_esp = scorer.esp(*best);
  for (const auto& m : candidates.subspan(1)) {
    double e = scorer.esp(m);
    if (e > best_esp + kEspTieTolerance ||
        (std::abs(e - best_esp) <= kEspTieTolerance && m < *best)) {
      best = &m;
      best_esp = std::max(e, best_esp);
    }
  }
  return *best;
}

namespace {

// True when (dist, esp, map) should replace the incumbent under the
// "closest, then higher ESP, then smallest map" order.
bool closer(double dist, double esp, const CircuitMap& m, double best_dist, double best_esp,
            const CircuitMap& best) {
  if (dist < best_dist - kEspTieTolerance) return true;
  if (dist > best_dist + kEspTieTolerance) return false;
  if (esp > best_esp + kEspTieTolerance) return true;
  if (esp < best_esp - kEspTieTolerance) return false;
  return m < best;
}

}  // namespace

CircuitMap jump_to_target(std::span<const CircuitMap> candidates, MapScorer& scorer,
                          double target) {
  require_nonempty(candidates);
  const CircuitMap* best = &candidates[0];
  double best_esp = scorer.esp(*best);
  double best_dist = std::abs(best_esp - target);
  for (const auto& m : candidates.subspan(1)) {
    double e = scorer.esp(m);
    double d = std::abs(e - target);
    if (closer(d, e, m, best_dist, best_esp, *best)) {
      best = &m;
      best_esp = e;
      best_dist = d;
    }
  }
  return *best;
}

std::vector<CircuitMap> walk_neighbors(const CircuitMap& map, const DeviceSnapshot& snapshot,
                                       std::span<const PhysicalQubit> exclude) {
  const int q = snapshot.num_qubits();
  auto blocked = make_mask(q, exclude);
  std::vector<char> in_map(q, 0);
  for (auto p : map.assignment()) in_map[p] = 1;

  std::vector<PhysicalQubit> frontier;
  for (auto p : map.physical_set()) {
    for (auto nb : snapshot.neighbors(p)) {
      if (!in_map[nb] && !blocked[nb]) frontier.push_back(nb);
    }
  }
  std::sort(frontier.begin(), frontier.end());
  frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());

  std::vector<CircuitMap> out;
  std::vector<PhysicalQubit> assign(map.assignment().begin(), map.assignment().end());
  std::vector<PhysicalQubit> set;
  for (int l = 0; l < map.size(); ++l) {
    const PhysicalQubit leaving = assign[l];
    for (auto incoming : frontier) {
      set.clear();
      for (auto p : map.physical_set()) {
        if (p != leaving) set.push_back(p);
      }
      set.push_back(incoming);
      if (map.size() == 1) {
        if (!snapshot.has_edge(leaving, incoming)) continue;
      } else if (!is_connected_set(set, snapshot)) {
        continue;
      }
      auto next = assign;
      next[l] = incoming;
      out.emplace_back(std::move(next));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

CircuitMap walk_step(const CircuitMap& current, double target, MapScorer& scorer,
                     std::span<const PhysicalQubit> exclude) {
  const double cur_esp = scorer.esp(current);
  const double cur_dist = std::abs(cur_esp - target);
  const CircuitMap* best = &current;
  double best_esp = cur_esp, best_dist = cur_dist;
  const auto neighbors = walk_neighbors(current, scorer.snapshot(), exclude);
  for (const auto& m : neighbors) {
    double e = scorer.esp(m);
    double d = std::abs(e - target);
    // A move has to be strictly closer than staying.
    if (best == &current) {
      if (d < cur_dist - kEspTieTolerance) {
        best = &m;
        best_esp = e;
        best_dist = d;
      }
    } else if (closer(d, e, m, best_dist, best_esp, *best)) {
      best = &m;
      best_esp = e;
      best_dist = d;
    }
  }
  return *best;
}

void ZoneRegistry::claim(int job, std::span<const PhysicalQubit> qubits) {
  for (auto p : qubits) {
    int o = owner_.at(p);
    if (o != -1 && o != job) {
      throw AllocationFailure(job, "qubit " + std::to_string(p) + " already held by job " +
                                       std::to_string(o));
    }
  }
  release(job);
  for (auto p : qubits) owner_[p] = job;
}

void ZoneRegistry::release(int job) {
  for (auto& o : owner_) {
    if (o == job) o = -1;
  }
}

std::vector<PhysicalQubit> ZoneRegistry::excluded_for(int job) const {
  std::vector<PhysicalQubit> out;
  for (int p = 0; p < static_cast<int>(owner_.size()); ++p) {
    if (owner_[p] != -1 && owner_[p] != job) out.push_back(p);
  }
  return out;
}

std::vector<PhysicalQubit> ZoneRegistry::claimed_by(int job) const {
  std::vector<PhysicalQubit> out;
  for (int p = 0; p < static_cast<int>(owner_.size()); ++p) {
    if (owner_[p] == job) out.push_back(p);
  }
  return out;
}

std::vector<Zone> allocate_zones(std::span<const ZoneRequest> jobs,
                                 const DeviceSnapshot& snapshot, ZoneRegistry* registry) {
  ZoneRegistry local(snapshot.num_qubits());
  ZoneRegistry& reg = registry ? *registry : local;
  std::vector<Zone> zones;
  for (int j = 0; j < static_cast<int>(jobs.size()); ++j) {
    const auto& job = jobs[j];
    if (job.circuit == nullptr) throw InvalidSpec("zone request without a circuit");
    std::vector<CircuitMap> candidates;
    try {
      candidates = enumerate_seed_maps(snapshot, job.circuit->num_qubits(), reg.excluded_for(j));
    } catch (const NoFeasibleMap& e) {
      throw AllocationFailure(j, "job " + std::to_string(j) + ": " + e.what());
    }
    MapScorer scorer(*job.circuit, snapshot);
    CircuitMap chosen = job.policy ? job.policy(candidates, scorer) : best_map(candidates, scorer);
    reg.claim(j, chosen.physical_set());
    Zone z;
    z.owner = j;
    z.claimed.assign(chosen.physical_set().begin(), chosen.physical_set().end());
    z.map = std::move(chosen);
    zones.push_back(std::move(z));
  }
  return zones;
}

}  // namespace nest
