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

#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "nest/circuits.hpp"
#include "nest/error.hpp"
#include "nest/fidelity.hpp"
#include "nest/mapping.hpp"

using namespace nest;

namespace {

using Set = std::vector<PhysicalQubit>;

Set set_of(const CircuitMap& m) { return {m.physical_set().begin(), m.physical_set().end()}; }

std::vector<Set> sets_of(const std::vector<CircuitMap>& maps) {
  std::vector<Set> out;
  for (const auto& m : maps) out.push_back(set_of(m));
  return out;
}

ParamCircuit one_cx() {
  ParamCircuit c(2);
  c.cx(0, 1);
  return c;
}

}  // namespace

TEST_CASE("seed maps on line5") {
  const auto d = nest::test::line5();
  CHECK(sets_of(enumerate_seed_maps(d, 2)) == std::vector<Set>{{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  const auto all = enumerate_seed_maps(d, 5);
  REQUIRE(all.size() == 1);
  CHECK(set_of(all[0]) == Set{0, 1, 2, 3, 4});
  // BFS from 0 visits 0,1,2 in order; logical order follows.
  const auto three = enumerate_seed_maps(d, 3);
  CHECK(std::vector<int>(three[0].assignment().begin(), three[0].assignment().end()) ==
        std::vector<int>{0, 1, 2});
  // Start 1 repeats {0,1,2} and is dropped; from 2 the frontier ties break
  // toward the smaller index.
  CHECK(std::vector<int>(three[1].assignment().begin(), three[1].assignment().end()) ==
        std::vector<int>{2, 1, 3});
}

TEST_CASE("exclusion can leave no feasible map") {
  const auto d = nest::test::line5();
  const std::vector<PhysicalQubit> ex{2};
  CHECK_THROWS_AS(enumerate_seed_maps(d, 3, ex), NoFeasibleMap);
  CHECK(sets_of(enumerate_seed_maps(d, 2, ex)) == std::vector<Set>{{0, 1}, {3, 4}});
  CHECK_THROWS_AS(enumerate_seed_maps(d, 6), NoFeasibleMap);
}

TEST_CASE("seed maps are valid on random synthetic devices") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = nest::test::synthetic(Topology::heavy_hex_27(), seed);
    for (int n = 1; n <= 6; ++n) {
      const auto maps = enumerate_seed_maps(d, n);
      std::set<Set> unique;
      for (const auto& m : maps) {
        CHECK(m.size() == n);
        CHECK(is_valid_map(m, d));
        unique.insert(set_of(m));
      }
      CHECK(unique.size() == maps.size());
    }
  }
}

TEST_CASE("best map with lexicographic tie break") {
  const auto d = nest::test::line5();
  const auto c = one_cx();
  MapScorer scorer(c, d);
  const auto maps = enumerate_seed_maps(d, 2);
  CHECK(set_of(best_map(maps, scorer)) == Set{1, 2});
  CHECK(scorer.esp(maps[1]) == doctest::Approx(0.99));
  CHECK(scorer.esp(maps[2]) == doctest::Approx(0.99));

  const auto h = nest::test::homogeneous(Topology::path(6));
  MapScorer hs(c, h);
  auto hmaps = enumerate_seed_maps(h, 2);
  std::reverse(hmaps.begin(), hmaps.end());
  CHECK(set_of(best_map(hmaps, hs)) == Set{0, 1});

  const std::vector<CircuitMap> single{CircuitMap({3, 4})};
  CHECK(best_map(single, scorer) == single[0]);
  CHECK_THROWS_AS(best_map(std::vector<CircuitMap>{}, scorer), EmptyCandidates);
}

TEST_CASE("jump to target") {
  const auto d = nest::test::line5();
  const auto c = one_cx();
  MapScorer scorer(c, d);
  const auto maps = enumerate_seed_maps(d, 2);
  CHECK(set_of(jump_to_target(maps, scorer, 1.0)) == Set{1, 2});
  CHECK(set_of(jump_to_target(maps, scorer, 0.0)) == Set{0, 1});
  // {0,1} and {3,4} score the same; the smaller set wins the tie.
  CHECK(set_of(jump_to_target(maps, scorer, scorer.esp(maps[3]))) == Set{0, 1});
  // Equidistant from 0.95 and 0.99: higher ESP wins.
  CHECK(set_of(jump_to_target(maps, scorer, 0.97)) == Set{1, 2});
  CHECK_THROWS_AS(jump_to_target(std::vector<CircuitMap>{}, scorer, 0.5), EmptyCandidates);
}

TEST_CASE("walk neighbors on line5") {
  const auto d = nest::test::line5();
  CHECK(sets_of(walk_neighbors(CircuitMap({1, 2}), d)) == std::vector<Set>{{0, 1}, {2, 3}});
  CHECK(walk_neighbors(CircuitMap({0, 1, 2, 3, 4}), d).empty());
  const std::vector<PhysicalQubit> ex{0};
  CHECK(sets_of(walk_neighbors(CircuitMap({1, 2}), d, ex)) == std::vector<Set>{{2, 3}});
  // The departing logical qubit takes the new physical qubit.
  for (const auto& n : walk_neighbors(CircuitMap({1, 2}), d)) {
    if (set_of(n) == Set{2, 3}) CHECK(n == CircuitMap({3, 2}));
    if (set_of(n) == Set{0, 1}) CHECK(n == CircuitMap({1, 0}));
  }
}

TEST_CASE("walk step examples") {
  const auto d = nest::test::line5();
  const auto c = one_cx();
  MapScorer scorer(c, d);
  CHECK(set_of(walk_step(CircuitMap({0, 1}), 0.99, scorer)) == Set{1, 2});
  const CircuitMap cur({1, 2});
  CHECK(walk_step(cur, scorer.esp(cur), scorer) == cur);
  // Neighbours are {0,1} (0.95) and {2,3} (0.99); staying at 0.99 is best for 0.995.
  CHECK(walk_step(cur, 0.995, scorer) == cur);
}

TEST_CASE("walk properties on fuzzed devices") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = nest::test::synthetic(Topology::heavy_hex_27(), 1000 + trial, (rng() % 3) / 2.0);
    const int n = 2 + static_cast<int>(rng() % 4);
    ParamCircuit c = efficient_su2(n, 1);
    c.measure_all();
    MapScorer scorer(c, d);
    const auto seeds = enumerate_seed_maps(d, n);
    CircuitMap cur = seeds[rng() % seeds.size()];
    for (int step = 0; step < 8; ++step) {
      const double target = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
      const CircuitMap next = walk_step(cur, target, scorer);
      CHECK(is_valid_map(next, d));
      CHECK(std::abs(scorer.esp(next) - target) <= std::abs(scorer.esp(cur) - target) + 1e-15);
      if (!next.same_set(cur)) CHECK(set_difference_size(next, cur) == 1);
      for (const auto& nb : walk_neighbors(cur, d)) {
        CHECK(is_valid_map(nb, d));
        CHECK(set_difference_size(nb, cur) == 1);
        int moved = 0;
        for (int l = 0; l < n; ++l) moved += nb.physical(l) != cur.physical(l);
        CHECK(moved == 1);
      }
      cur = next;
    }
  }
}

TEST_CASE("zone allocation is first come first served") {
  const auto d = nest::test::line5();
  const auto c = one_cx();
  std::vector<ZoneRequest> two{{&c, {}}, {&c, {}}};
  ZoneRegistry reg(d.num_qubits());
  const auto zones = allocate_zones(two, d, &reg);
  REQUIRE(zones.size() == 2);
  CHECK(set_of(zones[0].map) == Set{1, 2});
  CHECK(set_of(zones[1].map) == Set{3, 4});
  CHECK(zones[1].owner == 1);
  CHECK(reg.owner_of(3) == 1);
  CHECK(reg.owner_of(0) == -1);
  CHECK(reg.excluded_for(0) == std::vector<PhysicalQubit>{3, 4});

  std::vector<ZoneRequest> three{{&c, {}}, {&c, {}}, {&c, {}}};
  try {
    allocate_zones(three, d);
    FAIL("expected AllocationFailure");
  } catch (const AllocationFailure& e) {
    CHECK(e.job() == 2);
  }

  ParamCircuit wide(5);
  std::vector<ZoneRequest> whole{{&wide, {}}};
  const auto z = allocate_zones(whole, d);
  CHECK(set_of(z[0].map) == Set{0, 1, 2, 3, 4});
}

TEST_CASE("zone registry refuses overlapping claims") {
  ZoneRegistry reg(5);
  const std::vector<PhysicalQubit> a{0, 1}, b{1, 2}, c{2, 3};
  reg.claim(0, a);
  CHECK_THROWS_AS(reg.claim(1, b), AllocationFailure);
  reg.claim(1, c);
  reg.claim(0, std::vector<PhysicalQubit>{0});
  CHECK(reg.claimed_by(0) == std::vector<PhysicalQubit>{0});
  reg.release(1);
  CHECK(reg.excluded_for(0).empty());
}

TEST_CASE("circuit map invariants") {
  const auto d = nest::test::line5();
  CHECK_THROWS(CircuitMap({1, 1}));
  CHECK_FALSE(is_valid_map(CircuitMap({0, 2}), d));
  CHECK_FALSE(is_valid_map(CircuitMap({4, 5}), d));
  CHECK(is_valid_map(CircuitMap({2, 1, 3}), d));
  CHECK(CircuitMap({2, 1}).csv_cell() == "1;2");
  CHECK(CircuitMap({2, 1}).set_string() == "{1,2}");
  CHECK(CircuitMap({2, 1}).logical_of(1) == 1);
  CHECK(CircuitMap({2, 1}) < CircuitMap({1, 3}));
}
