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

// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria (0 when all pass). Pass criterion numbers as arguments to
// run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "nest/circuits.hpp"
#include "nest/device.hpp"
#include "nest/fidelity.hpp"
#include "nest/mapping.hpp"
#include "nest/metrics.hpp"
#include "nest/paths.hpp"
#include "nest/runner.hpp"
#include "nest/schedule.hpp"
#include "nest/simulator.hpp"

using namespace nest;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::max(std::abs(got), std::abs(want)));
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared benchmark: H2 (4 qubits, EfficientSU2 reps 3) on 27-qubit devices.

struct H2Bench {
  Problem problem;
  double ideal = 0.0;
  std::vector<DeviceSnapshot> devices;  // synth27 a..e
};

const H2Bench& h2() {
  static const H2Bench b = [] {
    H2Bench x;
    auto h = load_hamiltonian(resolve_data_path("hamiltonians/h2.txt"));
    x.ideal = exact_ground_energy(h);
    x.problem = make_vqe_problem("h2", std::move(h), 3);
    for (const char* n : {"a", "b", "c", "d", "e"}) {
      x.devices.push_back(load_device(resolve_data_path(std::string("devices/synth27_") + n + ".json")));
    }
    return x;
  }();
  return b;
}

constexpr int kShots = 1024;

TechniqueConfig base_cfg(Technique t) {
  TechniqueConfig c;
  c.technique = t;
  c.shots = kShots;
  return c;
}

// ---------------------------------------------------------------------------
// 1. Formula exactness

double closed_sigma(ScheduleKind k, double lo, double hi, double T, double t, double a,
                    double b, double g) {
  const double x = t / T, span = hi - lo;
  switch (k) {
    case ScheduleKind::Flat: return hi;
    case ScheduleKind::StepUp: return x < a ? lo : hi;
    case ScheduleKind::Linear: return lo + x * span;
    case ScheduleKind::VShape: return x < 0.5 ? hi - 2 * t / T * span : lo + 2 * (t - T / 2) / T * span;
    case ScheduleKind::ReLU: return x < b ? lo : lo + (t - b * T) / ((1 - b) * T) * span;
    case ScheduleKind::InvertedReLU: return x < g ? lo + t / (g * T) * span : hi;
  }
  return NAN;
}

Verdict criterion1() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  const int n = 100;

  for (int i = 0; i < n; ++i) {  // esp
    CircuitProfile p;
    const int gates = 1 + static_cast<int>(u(rng) * 60);
    double logp = 0.0;
    for (int g = 0; g < gates; ++g) {
      GateInstance gi;
      gi.success_prob = 0.9 + 0.1 * u(rng);
      logp += std::log(gi.success_prob);
      p.gates.push_back(gi);
    }
    p.depth = 1 + static_cast<int>(u(rng) * 40);
    p.avg_gate_time_us = 0.01 + u(rng);
    p.mean_t1_us = 20 + 400 * u(rng);
    p.mean_t2_us = 20 + 400 * u(rng);
    const double want = std::exp(logp - p.depth * p.avg_gate_time_us * (1 / p.mean_t1_us + 1 / p.mean_t2_us));
    worst = std::max(worst, rel_err(esp(p), want));
  }
  for (int i = 0; i < n; ++i) {  // qoncord
    CircuitProfile p;
    p.g1 = static_cast<int>(u(rng) * 80);
    p.g2 = static_cast<int>(u(rng) * 30);
    p.m = static_cast<int>(u(rng) * 8);
    p.depth = 1 + static_cast<int>(u(rng) * 40);
    p.mu1_us = 0.02 + 0.1 * u(rng);
    p.mu2_us = 0.2 + 0.5 * u(rng);
    QoncordParams q;
    q.c = 0.5 + 2 * u(rng);
    q.sq_error = 1e-3 * u(rng);
    q.tq_error = 3e-2 * u(rng);
    q.readout_error = 5e-2 * u(rng);
    q.t1_us = 50 + 300 * u(rng);
    q.t2_us = 50 + 300 * u(rng);
    const double want =
        std::exp(-(q.c * p.depth * (p.mu1_us * p.g1 + p.mu2_us * p.g2) / 2) / (q.t1_us * q.t2_us) +
                 p.g1 * std::log1p(-q.sq_error) + p.g2 * std::log1p(-q.tq_error) +
                 p.m * std::log1p(-q.readout_error));
    worst = std::max(worst, rel_err(qoncord_fidelity(p, q), want));
  }
  for (int i = 0; i < n; ++i) {  // sigma_at
    EspSchedule s;
    s.kind = kAllScheduleKinds[i % 6];
    s.sigma_min = 0.5 * u(rng);
    s.sigma_max = s.sigma_min + 0.01 + (1 - s.sigma_min - 0.01) * u(rng);
    s.total_iters = 10 + static_cast<int>(u(rng) * 500);
    s.alpha = 0.05 + 0.9 * u(rng);
    s.beta = 0.05 + 0.9 * u(rng);
    s.gamma = 0.05 + 0.9 * u(rng);
    s.reversed = u(rng) < 0.3;
    const int t = static_cast<int>(u(rng) * (s.total_iters + 1));
    const double T = s.total_iters;
    const double at = s.reversed ? T - t : t;
    const double want = closed_sigma(s.kind, s.sigma_min, s.sigma_max, T, at, s.alpha, s.beta, s.gamma);
    worst = std::max(worst, rel_err(sigma_at(s, t), want));
  }
  for (int i = 0; i < n; ++i) {  // energy gap
    const double ideal = -(0.1 + 5 * u(rng));
    const double got = ideal * (0.5 + 0.6 * u(rng));
    worst = std::max(worst, rel_err(energy_gap(ideal, got), 100.0 * (1.0 - got / ideal)));
  }
  for (int i = 0; i < n; ++i) {  // user cost
    const double c = 10 * u(rng), q = 1 + std::floor(20 * u(rng)), e = u(rng), d = 100 * u(rng),
                 it = std::floor(1000 * u(rng)) + 1;
    worst = std::max(worst, rel_err(user_cost(c, q, e, d, it), std::exp(std::log(c) + std::log(q) + std::log(e) + std::log(d) + std::log(it))));
  }
  for (int i = 0; i < n; ++i) {  // throughput
    const int k = 1 + static_cast<int>(u(rng) * 5);
    const double it = 1 + 1000 * u(rng);
    worst = std::max(worst, rel_err(throughput(k, it), std::exp(std::log(k) - std::log(it))));
  }
  for (int i = 0; i < n; ++i) {  // approximation ratio
    const int nv = 2 + static_cast<int>(u(rng) * 9);
    WeightedGraph g;
    g.num_vertices = nv;
    for (int a = 0; a < nv; ++a)
      for (int b = a + 1; b < nv; ++b)
        if (u(rng) < 0.5 || b == a + 1) g.edges.push_back({a, b, 0.1 + 2 * u(rng)});
    auto cut = [&](std::uint64_t bits) {
      double c = 0.0;
      for (const auto& e : g.edges) c += ((bits >> e.u & 1) != (bits >> e.v & 1)) ? e.weight : 0.0;
      return c;
    };
    double best = 0.0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << nv); ++bits) best = std::max(best, cut(bits));
    const double c = cut(rng() & ((std::uint64_t{1} << nv) - 1));
    worst = std::max(worst, rel_err(approximation_ratio(c, g), c / best));
  }
  return {worst <= 1e-10, fmt("worst relative error %.3g over 700 inputs", worst)};
}

// ---------------------------------------------------------------------------
// 2. Walk properties

bool connected_injective(const CircuitMap& m, const DeviceSnapshot& d) {
  const auto set = m.physical_set();
  if (static_cast<int>(set.size()) != m.size()) return false;
  std::set<int> in(set.begin(), set.end()), seen{set[0]};
  std::queue<int> q;
  q.push(set[0]);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int nb : d.neighbors(v)) {
      if (in.count(nb) && seen.insert(nb).second) q.push(nb);
    }
  }
  return seen.size() == in.size();
}

Verdict criterion2() {
  std::mt19937_64 rng(2002);
  int bad_step = 0, bad_map = 0, bad_dist = 0, steps = 0, runs = 0;
  for (int trial = 0; trial < 200; ++trial) {
    SyntheticDeviceSpec s;
    s.name = "fuzz" + std::to_string(trial);
    switch (trial % 4) {
      case 0: s.topology = Topology::heavy_hex_27(); break;
      case 1: s.topology = Topology::path(6 + static_cast<int>(rng() % 10)); break;
      case 2: s.topology = Topology::ring(6 + static_cast<int>(rng() % 10)); break;
      default: s.topology = Topology::heavy_hex_127(); break;
    }
    s.noise.seed = rng();
    s.noise.spatial_correlation = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto dev = synthesize_device(s);

    const int n = 2 + static_cast<int>(rng() % 3);
    PauliHamiltonian h(n);
    for (int q = 0; q + 1 < n; ++q) {
      std::string p(n, 'I');
      p[q] = p[q + 1] = 'Z';
      h.add(1.0, p);
    }
    const Problem prob = make_vqe_problem("fuzz", h, 1 + static_cast<int>(rng() % 2));

    TechniqueConfig cfg;
    cfg.technique = trial % 3 == 0 ? Technique::Nest : Technique::RawSchedule;
    cfg.schedule.kind = kAllScheduleKinds[rng() % 6];
    cfg.schedule.reversed = rng() % 4 == 0;
    cfg.cycles = 3 + static_cast<int>(rng() % 6);
    cfg.iters_per_cycle = 2;
    cfg.noisy = false;
    cfg.shots = 32;
    const auto r = run_nest(prob, dev, cfg, trial);
    ++runs;

    for (const auto& m : r.maps_used) bad_map += !connected_injective(m, dev);
    for (std::size_t i = 1; i < r.maps_used.size(); ++i) {
      const auto a = r.maps_used[i - 1].physical_set(), b = r.maps_used[i].physical_set();
      std::vector<int> diff;
      std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
      bad_step += diff.size() != 2;
    }
    ParamCircuit measured = prob.ansatz;
    measured.measure_all();
    MapScorer scorer(measured, dev);
    for (std::size_t c = 1; c < r.cycle_maps.size(); ++c) {
      const double t = r.cycle_targets[c];
      ++steps;
      bad_dist += std::abs(scorer.esp(r.cycle_maps[c]) - t) > std::abs(scorer.esp(r.cycle_maps[c - 1]) - t) + 1e-15;
    }
  }
  const bool ok = bad_step == 0 && bad_map == 0 && bad_dist == 0 && steps > 0;
  return {ok, std::to_string(runs) + " runs, " + std::to_string(steps) + " walk steps; " +
                  std::to_string(bad_step) + " non-local steps, " + std::to_string(bad_map) +
                  " bad maps, " + std::to_string(bad_dist) + " steps moving away from target"};
}

// ---------------------------------------------------------------------------
// 3. Simulator soundness

Verdict criterion3() {
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> ang(-3.14159, 3.14159);
  int within = 0;
  const int trials = 50;
  const char letters[] = {'I', 'X', 'Y', 'Z'};
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 1 + trial % 3;
    SyntheticDeviceSpec s;
    s.topology = Topology::path(n + 2);
    s.noise.seed = rng();
    // Exaggerated noise so every channel matters at this precision.
    s.noise.sq_error = {5e-3, 3e-2};
    s.noise.tq_error = {2e-2, 8e-2};
    s.noise.readout = {1e-2, 5e-2};
    s.noise.t1_us = {10.0, 40.0};
    s.noise.t2_us = {8.0, 30.0};
    const auto dev = synthesize_device(s);
    ParamCircuit c = efficient_su2(n, 1 + static_cast<int>(rng() % 2));
    std::vector<double> params(c.num_params());
    for (auto& x : params) x = ang(rng);
    std::vector<PhysicalQubit> assign(n);
    const int off = static_cast<int>(rng() % 3);
    for (int q = 0; q < n; ++q) assign[q] = off + q;
    if (n > 1 && rng() % 2) std::reverse(assign.begin(), assign.end());
    const auto routed = route(c, CircuitMap(assign), dev);
    PauliHamiltonian h(n);
    for (int t = 0; t < 4; ++t) {
      std::string p(n, 'I');
      for (auto& ch : p) ch = letters[rng() % 4];
      h.add(std::uniform_real_distribution<double>(-1.0, 1.0)(rng), p);
    }
    const auto nb = NoiseBinding::from_snapshot(dev);
    const double exact = exact_noisy_expectation(routed, params, h, &nb);
    const auto e = expectation(routed, params, h, 100000, trial, &nb, Backend::Trajectory);
    within += std::abs(e.value - exact) <= 3.0 * e.std_error + 1e-12;
  }
  const double frac = static_cast<double>(within) / trials;

  // Ideal VQE on ZZ.
  const auto line = load_snapshot(resolve_data_path("fixtures/line5.json"));
  const Problem zz = make_vqe_problem("zz", parse_hamiltonian("1.0 ZZ"), 1);
  TechniqueConfig cfg = base_cfg(Technique::BestMap);
  cfg.noisy = false;
  cfg.shots = 4096;
  cfg.bestmap_optimizer.max_evals = 300;
  const auto r = run_bestmap(zz, line, cfg, 1);
  const bool vqe_ok = std::abs(r.best_energy - -1.0) <= 0.02 && r.iterations <= 300;

  return {frac >= 0.94 && vqe_ok,
          std::to_string(within) + "/50 within 3 std errors; ZZ best " + fmt("%.4f", r.best_energy) +
              " in " + std::to_string(r.iterations) + " iterations"};
}

// ---------------------------------------------------------------------------
// 4 and 7. Technique comparison under the availability protocol

struct Comparison {
  std::vector<double> iters[3], gap[3], cost[3];
};

const Comparison& comparison() {
  static const Comparison cmp = [] {
    const auto& b = h2();
    Comparison c;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto pair = sample_available_devices(5, 2, seed);
      const DeviceSnapshot& first = b.devices[pair[0]];
      const DeviceSnapshot& second = b.devices[pair[1]];
      const RunRecord rs[3] = {run_nest(b.problem, first, base_cfg(Technique::Nest), seed),
                               run_bestmap(b.problem, first, base_cfg(Technique::BestMap), seed),
                               run_qoncord(b.problem, first, second, base_cfg(Technique::Qoncord), seed)};
      for (int k = 0; k < 3; ++k) {
        c.iters[k].push_back(rs[k].iterations);
        c.gap[k].push_back(energy_gap(b.ideal, rs[k].best_energy));
        c.cost[k].push_back(user_cost(1.0, rs[k].num_qubits, rs[k].mean_esp, rs[k].mean_depth, rs[k].iterations));
      }
    }
    return c;
  }();
  return cmp;
}

Verdict criterion4() {
  const auto& c = comparison();
  const double in = mean_of(c.iters[0]), ib = mean_of(c.iters[1]), iq = mean_of(c.iters[2]);
  const double gn = mean_of(c.gap[0]), gb = mean_of(c.gap[1]), gq = mean_of(c.gap[2]);
  const bool a = in <= ib, b = in <= 0.8 * iq, d = gn <= gb + 1.0, e = gn < gq;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "iterations nest %.1f bestmap %.1f qoncord %.1f [%s %s]; gap%% nest %.2f bestmap "
                "%.2f qoncord %.2f [%s %s]",
                in, ib, iq, a ? "ok" : "x", b ? "ok" : "x", gn, gb, gq, d ? "ok" : "x", e ? "ok" : "x");
  return {a && b && d && e, buf};
}

Verdict criterion7() {
  const auto& c = comparison();
  const double n = mean_of(c.cost[0]), b = mean_of(c.cost[1]), q = mean_of(c.cost[2]);
  char buf[200];
  std::snprintf(buf, sizeof buf, "user cost nest %.1f bestmap %.1f qoncord %.1f (nest/qoncord %.3f)",
                n, b, q, n / q);
  return {n < b && n <= 0.75 * q, buf};
}

// ---------------------------------------------------------------------------
// 5. Schedules

Verdict criterion5() {
  const auto& b = h2();
  std::map<ScheduleKind, double> gap;
  for (ScheduleKind k : kAllScheduleKinds) {
    TechniqueConfig cfg = base_cfg(Technique::RawSchedule);
    cfg.schedule.kind = k;
    std::vector<double> g;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      g.push_back(energy_gap(b.ideal, run_nest(b.problem, b.devices[0], cfg, seed).best_energy));
    }
    gap[k] = mean_of(g);
  }
  double best = INFINITY;
  for (const auto& [k, g] : gap) best = std::min(best, g);
  std::string detail;
  for (const auto& [k, g] : gap) detail += std::string(schedule_name(k)) + fmt(" %.2f ", g);
  return {gap[ScheduleKind::InvertedReLU] <= best + 0.5, "mean gap % by schedule: " + detail};
}

// ---------------------------------------------------------------------------
// 6. Multi-programming

Verdict criterion6() {
  const auto& b = h2();
  const int seeds = 10;
  double thr[4] = {0}, gap[4] = {0};
  bool disjoint = true;
  for (int k = 1; k <= 3; ++k) {
    std::vector<double> iters, gaps;
    const std::vector<Problem> jobs(static_cast<std::size_t>(k), b.problem);
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
      const auto res = run_concurrent(jobs, b.devices[0], base_cfg(Technique::Nest), seed);
      disjoint = disjoint && res.report.disjoint;
      for (const auto& r : res.records) {
        iters.push_back(r.iterations);
        gaps.push_back(energy_gap(b.ideal, r.best_energy));
      }
    }
    thr[k] = throughput(k, mean_of(iters));
    gap[k] = mean_of(gaps);
  }
  const double ratio = thr[2] / thr[1];
  const bool gap_ok = gap[2] <= gap[1] + 1.0 && gap[3] <= gap[1] + 1.0;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "throughput ratio k2/k1 %.3f, k3/k1 %.3f; gap%% k1 %.2f k2 %.2f k3 %.2f; disjoint %s",
                ratio, thr[3] / thr[1], gap[1], gap[2], gap[3], disjoint ? "yes" : "no");
  return {ratio >= 1.7 && gap_ok && disjoint, buf};
}

// ---------------------------------------------------------------------------
// 8. Jump versus walk

// Largest E[t] - E[t-1] over cycle boundaries t; `switches_only` skips
// boundaries where the walk stayed on its map.
double max_boundary_increase(const RunRecord& r, bool switches_only) {
  double worst = 0.0;
  for (std::size_t t = 1; t < r.rows.size(); ++t) {
    if (r.rows[t].cycle == r.rows[t - 1].cycle) continue;
    if (switches_only && r.rows[t].map == r.rows[t - 1].map) continue;
    worst = std::max(worst, r.rows[t].energy - r.rows[t - 1].energy);
  }
  return worst;
}

Verdict criterion8() {
  const auto& b = h2();
  std::vector<double> walk, jump, walk_all, jump_all;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TechniqueConfig cfg = base_cfg(Technique::Nest);
    const auto w = run_nest(b.problem, b.devices[0], cfg, seed);
    cfg.transition = TransitionMode::Jump;
    const auto j = run_nest(b.problem, b.devices[0], cfg, seed);
    walk.push_back(max_boundary_increase(w, true));
    jump.push_back(max_boundary_increase(j, true));
    walk_all.push_back(max_boundary_increase(w, false));
    jump_all.push_back(max_boundary_increase(j, false));
  }
  const double wm = mean_of(walk), jm = mean_of(jump);
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "mean max increase at map switches: jump %.4f, walk %.4f (all cycle boundaries: "
                "jump %.4f, walk %.4f)",
                jm, wm, mean_of(jump_all), mean_of(walk_all));
  return {jm > wm, buf};
}

// ---------------------------------------------------------------------------
// 9. Mapping-stage scaling

Verdict criterion9() {
  const ParamCircuit ansatz = [] {
    ParamCircuit c = efficient_su2(4, 3);
    c.measure_all();
    return c;
  }();
  std::vector<double> qs, ts;
  for (const char* f : {"devices/synth27_a.json", "devices/synth127.json", "devices/synth508.json"}) {
    const auto dev = load_device(resolve_data_path(f));
    double best = INFINITY;
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = Clock::now();
      MapScorer scorer(ansatz, dev);
      const auto seeds = enumerate_seed_maps(dev, 4);
      std::vector<double> esps;
      for (const auto& m : seeds) esps.push_back(scorer.esp(m));
      EspSchedule s;
      std::tie(s.sigma_min, s.sigma_max) = default_sigma_bounds(esps);
      const auto plan = discretize(s, 6, kDefaultItersPerCycle);
      CircuitMap m = jump_to_target(seeds, scorer, plan.targets[0]);
      for (int c = 1; c < plan.cycles; ++c) m = walk_step(m, plan.targets[c], scorer);
      best = std::min(best, seconds_since(t0));
    }
    qs.push_back(dev.num_qubits());
    ts.push_back(best);
  }
  const double mq = mean_of(qs), mt = mean_of(ts);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    sxy += (qs[i] - mq) * (ts[i] - mt);
    sxx += (qs[i] - mq) * (qs[i] - mq);
    syy += (ts[i] - mt) * (ts[i] - mt);
  }
  const double r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 0.0;
  char buf[200];
  std::snprintf(buf, sizeof buf, "mapping ms Q=27 %.2f Q=127 %.2f Q=508 %.2f; R^2 %.4f",
                ts[0] * 1e3, ts[1] * 1e3, ts[2] * 1e3, r2);
  return {r2 >= 0.9 && sxy > 0, buf};
}

// ---------------------------------------------------------------------------
// 10. Oracle suite

Verdict criterion10() {
  std::mt19937_64 rng(1010);
  int agree = 0;
  for (int i = 0; i < 50; ++i) {
    const int nv = 2 + static_cast<int>(rng() % 9);
    WeightedGraph g;
    g.num_vertices = nv;
    for (int a = 0; a < nv; ++a)
      for (int b = a + 1; b < nv; ++b)
        if (rng() % 2 || b == a + 1) g.edges.push_back({a, b, static_cast<double>(1 + rng() % 3)});
    const auto q = qaoa_maxcut(g, 1);
    agree += brute_force_max_cut(g) == -exact_ground_energy(q.hamiltonian);
  }
  return {agree == 50, std::to_string(agree) + "/50 graphs agree exactly"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::function<Verdict()> criteria[] = {criterion1, criterion2, criterion3, criterion4,
                                               criterion5, criterion6, criterion7, criterion8,
                                               criterion9, criterion10};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (int c = 1; c <= 10; ++c) {
    if (!only.empty() && !only.count(c)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[c - 1]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("criterion %2d: %s  %s  (%.1fs)\n", c, v.pass ? "PASS" : "FAIL", v.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed;
}
