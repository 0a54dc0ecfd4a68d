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
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "nest/error.hpp"
#include "nest/mapping.hpp"
#include "nest/runner.hpp"

using namespace nest;

namespace {

using Set = std::vector<PhysicalQubit>;

Set set_of(const CircuitMap& m) { return {m.physical_set().begin(), m.physical_set().end()}; }

Problem zz() { return make_vqe_problem("zz", parse_hamiltonian("1.0 ZZ"), 1); }

TechniqueConfig quick(Technique t) {
  TechniqueConfig c;
  c.technique = t;
  c.shots = 128;
  c.cycles = 3;
  c.iters_per_cycle = 8;
  c.bestmap_optimizer.max_evals = 24;
  c.qoncord_phase1.max_evals = 12;
  c.qoncord_phase2.max_evals = 12;
  return c;
}

int symmetric_difference(const Set& a, const Set& b) {
  Set d;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(d));
  return static_cast<int>(d.size());
}

void check_best_energy(const RunRecord& r) {
  REQUIRE_FALSE(r.rows.empty());
  double m = r.rows.front().energy;
  double esp = 0.0;
  for (const auto& row : r.rows) {
    m = std::min(m, row.energy);
    esp += row.esp;
  }
  CHECK(r.best_energy == m);
  CHECK(r.iterations == static_cast<int>(r.rows.size()));
  CHECK(r.mean_esp == doctest::Approx(esp / r.rows.size()));
}

}  // namespace

TEST_CASE("bestmap on line5 uses {1,2} throughout") {
  const auto d = nest::test::line5();
  const auto r = run_bestmap(zz(), d, quick(Technique::BestMap), 3);
  REQUIRE(r.maps_used.size() == 1);
  CHECK(set_of(r.maps_used[0]) == Set{1, 2});
  for (const auto& row : r.rows) CHECK(set_of(row.map) == Set{1, 2});
  CHECK(r.iterations <= 24);
  check_best_energy(r);
  CHECK(r.technique == "bestmap");
}

TEST_CASE("bestmap on a homogeneous device picks the smallest map") {
  const auto d = nest::test::homogeneous(Topology::path(6));
  const auto r = run_bestmap(zz(), d, quick(Technique::BestMap), 3);
  CHECK(set_of(r.maps_used[0]) == Set{0, 1});
  for (const auto& row : r.rows) CHECK(row.esp == r.rows.front().esp);
}

TEST_CASE("runs are deterministic for a fixed seed") {
  const auto d = nest::test::line5();
  for (Technique t : {Technique::BestMap, Technique::Nest}) {
    const auto cfg = quick(t);
    const DeviceSnapshot* s[] = {&d};
    const auto a = run_technique(zz(), s, cfg, 9);
    const auto b = run_technique(zz(), s, cfg, 9);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].energy == b.rows[i].energy);
      CHECK(a.rows[i].map == b.rows[i].map);
    }
    CHECK(a.final_params == b.final_params);
  }
}

TEST_CASE("flat schedule with one cycle degenerates to bestmap maps") {
  const auto d = nest::test::synthetic(Topology::heavy_hex_27(), 4);
  auto cfg = quick(Technique::RawSchedule);
  cfg.schedule.kind = ScheduleKind::Flat;
  cfg.cycles = 1;
  cfg.iters_per_cycle = 20;
  const auto n = run_nest(zz(), d, cfg, 2);
  const auto b = run_bestmap(zz(), d, quick(Technique::BestMap), 2);
  REQUIRE(n.maps_used.size() == 1);
  CHECK(n.maps_used[0] == b.maps_used[0]);
}

TEST_CASE("nest on line5 walks one qubit at a time and keeps maps per cycle") {
  const auto d = nest::test::line5();
  auto cfg = quick(Technique::Nest);
  cfg.cycles = 6;
  cfg.iters_per_cycle = 6;
  const auto r = run_nest(zz(), d, cfg, 5);
  check_best_energy(r);
  for (std::size_t i = 1; i < r.maps_used.size(); ++i) {
    CHECK(symmetric_difference(set_of(r.maps_used[i - 1]), set_of(r.maps_used[i])) == 2);
  }
  // map constant inside a cycle
  for (const auto& row : r.rows) {
    REQUIRE(row.cycle < static_cast<int>(r.cycle_maps.size()));
    CHECK(row.map == r.cycle_maps[row.cycle]);
    CHECK(row.cycle == row.iter / cfg.iters_per_cycle);
  }
  CHECK(r.cycle_targets.size() == 6);
}

TEST_CASE("nest with an empty budget") {
  const auto d = nest::test::line5();
  auto cfg = quick(Technique::Nest);
  cfg.cycles = 0;
  CHECK_THROWS_AS(run_nest(zz(), d, cfg, 1), InvalidBudget);
  cfg.cycles = 3;
  cfg.iters_per_cycle = 0;
  CHECK_THROWS_AS(run_nest(zz(), d, cfg, 1), InvalidBudget);
}

TEST_CASE("qoncord on identical snapshots runs two phases") {
  const auto d = nest::test::line5();
  const auto cfg = quick(Technique::Qoncord);
  const auto r = run_qoncord(zz(), d, d, cfg, 4);
  REQUIRE(r.maps_used.size() == 2);
  REQUIRE(r.phases.size() == 2);
  CHECK(r.phases[0].initial_step == 1.0);
  CHECK(r.phases[1].initial_step == doctest::Approx(0.1));
  CHECK(r.phases[0].termination.tol == doctest::Approx(0.1));
  CHECK(r.phases[0].iterations + r.phases[1].iterations == r.iterations);
  for (const auto& row : r.rows) {
    CHECK(row.cycle == (row.iter < r.phases[0].iterations ? 0 : 1));
  }
  check_best_energy(r);
}

TEST_CASE("qoncord explores on the lower fidelity device first") {
  const auto good = nest::test::homogeneous(Topology::path(4));
  SyntheticDeviceSpec s;
  s.name = "bad";
  s.topology = Topology::path(4);
  s.noise.tq_error = {5e-2, 5e-2};
  s.noise.readout = {5e-2, 5e-2};
  const auto bad = synthesize_device(s);
  const auto r = run_qoncord(zz(), good, bad, quick(Technique::Qoncord), 1);
  CHECK(r.phases[0].device == "bad");
  CHECK(r.phases[1].device == "homog");
  CHECK(r.phases[0].fidelity_estimate < r.phases[1].fidelity_estimate);
}

TEST_CASE("run_technique checks the snapshot count") {
  const auto d = nest::test::line5();
  const DeviceSnapshot* one[] = {&d};
  CHECK_THROWS_AS(run_technique(zz(), one, quick(Technique::Qoncord), 1), ConfigError);
  const DeviceSnapshot* two[] = {&d, &d};
  CHECK_THROWS_AS(run_technique(zz(), two, quick(Technique::Nest), 1), ConfigError);
}

TEST_CASE("concurrent k=1 equals run_nest") {
  const auto d = nest::test::line5();
  const auto cfg = quick(Technique::Nest);
  const Problem p[] = {zz()};
  const auto c = run_concurrent(p, d, cfg, 6);
  const auto r = run_nest(zz(), d, cfg, 6);
  REQUIRE(c.records.size() == 1);
  REQUIRE(c.records[0].rows.size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(c.records[0].rows[i].energy == r.rows[i].energy);
    CHECK(c.records[0].rows[i].map == r.rows[i].map);
  }
  CHECK(c.report.k == 1);
  CHECK(c.report.throughput == doctest::Approx(1.0 / r.iterations));
}

TEST_CASE("two concurrent jobs on line5 stay disjoint") {
  const auto d = nest::test::line5();
  const auto cfg = quick(Technique::Nest);
  const Problem p[] = {zz(), zz()};
  const auto c = run_concurrent(p, d, cfg, 1);
  REQUIRE(c.report.initial_maps.size() == 2);
  CHECK(c.report.disjoint);
  CHECK(seed_for_job(1, 0) == 1);
  CHECK(c.records[1].seed == seed_for_job(1, 1));
  // disjoint along the shared clock
  const auto& a = c.records[0].rows;
  const auto& b = c.records[1].rows;
  for (std::size_t t = 0; t < std::min(a.size(), b.size()); ++t) {
    const auto sa = set_of(a[t].map), sb = set_of(b[t].map);
    Set both;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(both));
    CHECK(both.empty());
  }
}

TEST_CASE("too many concurrent jobs") {
  const auto d = nest::test::line5();
  const Problem p[] = {zz(), zz(), zz()};
  CHECK_THROWS_AS(run_concurrent(p, d, quick(Technique::Nest), 1), AllocationFailure);
}

TEST_CASE("device availability sampling") {
  const auto a = sample_available_devices(5, 2, 17);
  REQUIRE(a.size() == 2);
  CHECK(a[0] != a[1]);
  CHECK(a == sample_available_devices(5, 2, 17));
  std::set<std::vector<int>> seen;
  for (std::uint64_t s = 0; s < 50; ++s) seen.insert(sample_available_devices(5, 2, s));
  CHECK(seen.size() > 10);
  CHECK_THROWS_AS(sample_available_devices(5, 6, 1), ConfigError);
}

TEST_CASE("initial parameters lie in [-pi, pi)") {
  const auto x = initial_params(200, 3);
  for (double v : x) {
    CHECK(v >= -3.14159265358979);
    CHECK(v < 3.14159265358980);
  }
  CHECK(x == initial_params(200, 3));
  CHECK(x != initial_params(200, 4));
}
