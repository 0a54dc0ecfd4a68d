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

#include "nest/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>
#include <unordered_map>

#include "nest/error.hpp"
#include "nest/fidelity.hpp"
#include "nest/mapping.hpp"

namespace nest {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix(mix(mix(seed) ^ (a + 0x51ED2701ull)) ^ (b + 0x2545F491ull));
}

constexpr std::uint64_t kShotStream = 1;
constexpr std::uint64_t kDeviceStream = 2;
constexpr std::uint64_t kJobStream = 3;
constexpr std::uint64_t kInitStream = 4;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string key_of(const CircuitMap& m) {
  std::string k;
  for (auto p : m.assignment()) k += std::to_string(p) + ",";
  return k;
}

// Everything needed to evaluate one problem on one device: ESP scoring of
// candidate maps plus a compiled executor per visited map.
class MapEvaluator {
 public:
  MapEvaluator(const Problem& problem, const DeviceSnapshot& snapshot, const TechniqueConfig& cfg)
      : problem_(problem),
        snapshot_(snapshot),
        cfg_(cfg),
        measured_(with_measurements(problem.ansatz)),
        scorer_(measured_, snapshot),
        noise_(NoiseBinding::from_snapshot(snapshot)) {}

  MapScorer& scorer() { return scorer_; }
  const DeviceSnapshot& snapshot() const { return snapshot_; }
  int width() const { return problem_.ansatz.num_qubits(); }

  struct Context {
    Executor executor;
    double esp;
    int depth;
  };

  Context& context(const CircuitMap& map) {
    auto key = key_of(map);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    const RoutedCircuit routed = route(problem_.ansatz, map, snapshot_);
    const CircuitProfile prof = profile_circuit(route(measured_, map, snapshot_), map, snapshot_);
    auto ctx = std::make_unique<Context>(Context{
        Executor(routed, problem_.hamiltonian, cfg_.noisy ? &noise_ : nullptr, cfg_.backend),
        esp(prof), prof.depth});
    return *cache_.emplace(std::move(key), std::move(ctx)).first->second;
  }

  IterationRow evaluate(const CircuitMap& map, std::span<const double> x, int iter, int cycle,
                        std::uint64_t seed) {
    Context& ctx = context(map);
    const auto est = ctx.executor.expectation(x, cfg_.shots, derive(seed, kShotStream, iter));
    return {iter, cycle, est.value, map, ctx.esp, ctx.depth};
  }

 private:
  static ParamCircuit with_measurements(const ParamCircuit& c) {
    ParamCircuit m = c;
    m.measure_all();
    return m;
  }

  const Problem& problem_;
  const DeviceSnapshot& snapshot_;
  const TechniqueConfig& cfg_;
  ParamCircuit measured_;
  MapScorer scorer_;
  NoiseBinding noise_;
  std::unordered_map<std::string, std::unique_ptr<Context>> cache_;
};

void summarize(RunRecord& rec) {
  rec.iterations = static_cast<int>(rec.rows.size());
  if (rec.rows.empty()) return;
  double esp_sum = 0.0, depth_sum = 0.0;
  rec.best_energy = rec.rows.front().energy;
  for (const auto& r : rec.rows) {
    esp_sum += r.esp;
    depth_sum += r.depth;
    rec.best_energy = std::min(rec.best_energy, r.energy);
  }
  rec.mean_esp = esp_sum / rec.rows.size();
  rec.mean_depth = depth_sum / rec.rows.size();
}

OptimizerConfig nest_optimizer(const TechniqueConfig& cfg) {
  OptimizerConfig o = cfg.nest_optimizer;
  const int budget = cfg.cycles * cfg.iters_per_cycle;
  o.max_evals = o.max_evals > 0 ? std::min(o.max_evals, budget) : budget;
  if (cfg.restart_each_cycle && o.restart_at.empty()) {
    for (int c = 1; c < cfg.cycles; ++c) o.restart_at.push_back(c * cfg.iters_per_cycle);
  }
  return o;
}

// One NEST job: cycle plan, current map and walk transitions.
class NestJob {
 public:
  NestJob(const Problem& problem, const DeviceSnapshot& snapshot, const TechniqueConfig& cfg,
          std::uint64_t seed)
      : problem_(problem), cfg_(cfg), seed_(seed), eval_(problem, snapshot, cfg) {
    const auto t0 = Clock::now();
    seed_maps_ = enumerate_seed_maps(snapshot, eval_.width());
    EspSchedule s = cfg.schedule;
    if (cfg.technique == Technique::Nest) s.kind = ScheduleKind::InvertedReLU;
    if (!cfg.explicit_bounds) {
      std::vector<double> esps;
      esps.reserve(seed_maps_.size());
      for (const auto& m : seed_maps_) esps.push_back(eval_.scorer().esp(m));
      std::tie(s.sigma_min, s.sigma_max) = default_sigma_bounds(esps);
    }
    plan_ = discretize(s, cfg.cycles, cfg.iters_per_cycle);
    record_.technique = cfg.technique == Technique::RawSchedule
                            ? "schedule:" + std::string(schedule_name(s.kind))
                            : std::string(technique_name(cfg.technique));
    record_.benchmark = problem.name;
    record_.device = snapshot.name();
    record_.seed = seed;
    record_.num_qubits = eval_.width();
    record_.cycle_targets = plan_.targets;
    mapping_ms_ += ms_since(t0);
  }

  /// The map a fresh run starts from: closest ESP to the first target.
  CircuitMap initial_choice(std::span<const CircuitMap> candidates) {
    return jump_to_target(candidates, eval_.scorer(), plan_.targets[0]);
  }

  double first_target() const { return plan_.targets[0]; }
  MapScorer& scorer() { return eval_.scorer(); }
  const std::vector<CircuitMap>& seed_maps() const { return seed_maps_; }

  void start(CircuitMap map) {
    map_ = std::move(map);
    record_.cycle_maps.push_back(map_);
    record_.maps_used.push_back(map_);
    cycle_ = 0;
  }

  bool at_boundary() const {
    const int t = static_cast<int>(record_.rows.size());
    return t > 0 && t % plan_.iters_per_cycle == 0 && t / plan_.iters_per_cycle < plan_.cycles;
  }

  void transition(std::span<const PhysicalQubit> exclude) {
    const auto t0 = Clock::now();
    cycle_ = static_cast<int>(record_.rows.size()) / plan_.iters_per_cycle;
    const double target = plan_.targets[cycle_];
    CircuitMap next;
    if (cfg_.transition == TransitionMode::Walk) {
      next = walk_step(map_, target, eval_.scorer(), exclude);
    } else {
      std::vector<CircuitMap> pool;
      try {
        pool = exclude.empty() ? seed_maps_
                               : enumerate_seed_maps(eval_.snapshot(), eval_.width(), exclude);
      } catch (const NoFeasibleMap&) {
        pool = {map_};
      }
      next = jump_to_target(pool, eval_.scorer(), target);
    }
    if (!(next == map_)) record_.maps_used.push_back(next);
    map_ = std::move(next);
    record_.cycle_maps.push_back(map_);
    mapping_ms_ += ms_since(t0);
  }

  double evaluate(std::span<const double> x) {
    const int t = static_cast<int>(record_.rows.size());
    record_.rows.push_back(eval_.evaluate(map_, x, t, cycle_, seed_));
    return record_.rows.back().energy;
  }

  const CircuitMap& map() const { return map_; }

  RunRecord finish(const OptTrace& trace) {
    record_.terminated_by = trace.terminated_by;
    record_.final_params = trace.best_params;
    record_.mapping_ms = mapping_ms_;
    summarize(record_);
    return std::move(record_);
  }

 private:
  const Problem& problem_;
  const TechniqueConfig& cfg_;
  std::uint64_t seed_;
  MapEvaluator eval_;
  std::vector<CircuitMap> seed_maps_;
  CyclePlan plan_;
  CircuitMap map_;
  int cycle_ = 0;
  RunRecord record_;
  double mapping_ms_ = 0.0;
};

/**
 * Turns the blocking minimize() call into ask/tell steps. The optimizer runs on
 * a worker thread whose objective hands each point to the coordinator and
 * waits for the value, so several jobs can be advanced in lockstep from one
 * thread without touching the optimizer's internals.
 */
class SteppedOptimizer {
 public:
  SteppedOptimizer(std::vector<double> x0, OptimizerConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)) {
    worker_ = std::thread([this, x0 = std::move(x0), seed]() mutable {
      try {
        OptTrace t = minimize([this](std::span<const double> x) { return request(x); },
                              std::move(x0), cfg_, seed);
        std::lock_guard lk(mu_);
        trace_ = std::move(t);
      } catch (...) {
        std::lock_guard lk(mu_);
        error_ = std::current_exception();
      }
      std::lock_guard lk(mu_);
      done_ = true;
      cv_.notify_all();
    });
  }

  ~SteppedOptimizer() {
    {
      std::lock_guard lk(mu_);
      abort_ = true;
      cv_.notify_all();
    }
    if (worker_.joinable()) worker_.join();
  }

  /// Next point to evaluate, or nullopt once the optimizer has stopped.
  std::optional<std::vector<double>> ask() {
    std::unique_lock lk(mu_);
    cv_.wait(lk, [&] { return pending_ || done_; });
    if (pending_) return point_;
    if (error_) std::rethrow_exception(error_);
    return std::nullopt;
  }

  void tell(double value) {
    std::lock_guard lk(mu_);
    value_ = value;
    pending_ = false;
    answered_ = true;
    cv_.notify_all();
  }

  const OptTrace& trace() const { return trace_; }

 private:
  struct Aborted {};

  double request(std::span<const double> x) {
    std::unique_lock lk(mu_);
    point_.assign(x.begin(), x.end());
    pending_ = true;
    answered_ = false;
    cv_.notify_all();
    cv_.wait(lk, [&] { return answered_ || abort_; });
    if (!answered_) throw Aborted{};
    return value_;
  }

  OptimizerConfig cfg_;
  std::thread worker_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<double> point_;
  double value_ = 0.0;
  bool pending_ = false, answered_ = false, done_ = false, abort_ = false;
  OptTrace trace_;
  std::exception_ptr error_;
};

}  // namespace

// ---------------------------------------------------------------------------

Problem make_vqe_problem(std::string name, PauliHamiltonian h, int reps) {
  Problem p;
  p.name = std::move(name);
  p.ansatz = efficient_su2(h.num_qubits(), reps);
  p.hamiltonian = std::move(h);
  return p;
}

Problem make_qaoa_problem(std::string name, const WeightedGraph& graph) {
  auto q = qaoa_maxcut(graph, 1);
  Problem p;
  p.name = std::move(name);
  p.ansatz = std::move(q.circuit);
  p.hamiltonian = std::move(q.hamiltonian);
  p.graph = graph;
  return p;
}

std::string_view technique_name(Technique t) {
  switch (t) {
    case Technique::Nest: return "nest";
    case Technique::BestMap: return "bestmap";
    case Technique::Qoncord: return "qoncord";
    case Technique::RawSchedule: return "schedule";
  }
  return "?";
}

void TechniqueConfig::validate() const {
  if (cycles < 1 || iters_per_cycle < 1) throw ConfigError("cycles and iters_per_cycle must be >= 1");
  if (shots < 1) throw ConfigError("shots must be >= 1");
  try {
    if (explicit_bounds) {
      EspSchedule s = schedule;
      s.total_iters = cycles * iters_per_cycle;
      s.validate();
    } else {
      auto frac = [](double f) { return f > 0.0 && f < 1.0; };
      if (!frac(schedule.alpha) || !frac(schedule.beta) || !frac(schedule.gamma)) {
        throw InvalidSpec("schedule fractions must lie in (0,1)");
      }
    }
    {
      OptimizerConfig o = nest_optimizer;
      if (o.max_evals == 0) o.max_evals = 1;
      o.validate();
    }
    bestmap_optimizer.validate();
    qoncord_phase1.validate();
    qoncord_phase2.validate();
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  }
}

std::vector<double> initial_params(int count, std::uint64_t seed) {
  std::mt19937_64 rng(derive(seed, kInitStream));
  std::vector<double> x(count);
  // Explicit mapping of 53 random bits keeps this identical across standard
  // library implementations.
  for (auto& v : x) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = -std::numbers::pi + 2.0 * std::numbers::pi * u;
  }
  return x;
}

std::uint64_t seed_for_job(std::uint64_t seed, int job) {
  return job == 0 ? seed : derive(seed, kJobStream, static_cast<std::uint64_t>(job));
}

std::vector<int> sample_available_devices(int pool, int pick, std::uint64_t seed) {
  if (pick < 0 || pick > pool) throw ConfigError("cannot pick " + std::to_string(pick) +
                                                 " of " + std::to_string(pool) + " devices");
  std::vector<int> idx(pool);
  for (int i = 0; i < pool; ++i) idx[i] = i;
  std::uint64_t state = derive(seed, kDeviceStream);
  for (int i = 0; i < pick; ++i) {
    state = mix(state);
    const int j = i + static_cast<int>(state % static_cast<std::uint64_t>(pool - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(pick);
  return idx;
}

RunRecord run_nest(const Problem& problem, const DeviceSnapshot& snapshot,
                   const TechniqueConfig& cfg, std::uint64_t seed) {
  if (cfg.cycles * cfg.iters_per_cycle <= 0) throw InvalidBudget("C*I must be positive");
  cfg.validate();
  NestJob job(problem, snapshot, cfg, seed);
  job.start(job.initial_choice(job.seed_maps()));
  auto objective = [&](std::span<const double> x) {
    if (job.at_boundary()) job.transition({});
    return job.evaluate(x);
  };
  OptTrace trace = minimize(objective, initial_params(problem.ansatz.num_params(), seed),
                            nest_optimizer(cfg), seed);
  return job.finish(trace);
}

RunRecord run_bestmap(const Problem& problem, const DeviceSnapshot& snapshot,
                      const TechniqueConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto t0 = Clock::now();
  MapEvaluator eval(problem, snapshot, cfg);
  const auto candidates = enumerate_seed_maps(snapshot, eval.width());
  const CircuitMap map = best_map(candidates, eval.scorer());
  RunRecord rec;
  rec.mapping_ms = ms_since(t0);
  rec.technique = technique_name(Technique::BestMap);
  rec.benchmark = problem.name;
  rec.device = snapshot.name();
  rec.seed = seed;
  rec.num_qubits = eval.width();
  rec.maps_used = {map};
  auto objective = [&](std::span<const double> x) {
    rec.rows.push_back(eval.evaluate(map, x, static_cast<int>(rec.rows.size()), 0, seed));
    return rec.rows.back().energy;
  };
  OptTrace trace = minimize(objective, initial_params(problem.ansatz.num_params(), seed),
                            cfg.bestmap_optimizer, seed);
  rec.terminated_by = trace.terminated_by;
  rec.final_params = trace.best_params;
  summarize(rec);
  return rec;
}

RunRecord run_qoncord(const Problem& problem, const DeviceSnapshot& first,
                      const DeviceSnapshot& second, const TechniqueConfig& cfg,
                      std::uint64_t seed) {
  cfg.validate();
  const auto t0 = Clock::now();
  const DeviceSnapshot* devices[2] = {&first, &second};
  std::unique_ptr<MapEvaluator> evals[2];
  CircuitMap maps[2];
  double fidelity[2];
  for (int d = 0; d < 2; ++d) {
    evals[d] = std::make_unique<MapEvaluator>(problem, *devices[d], cfg);
    const auto candidates = enumerate_seed_maps(*devices[d], evals[d]->width());
    maps[d] = best_map(candidates, evals[d]->scorer());
    ParamCircuit measured = problem.ansatz;
    measured.measure_all();
    const auto prof = profile_circuit(route(measured, maps[d], *devices[d]), maps[d], *devices[d]);
    fidelity[d] = qoncord_fidelity(prof, QoncordParams::from_snapshot(*devices[d], cfg.qoncord_c));
  }
  // Lower estimated fidelity explores first; ties keep file order.
  const int low = fidelity[1] < fidelity[0] ? 1 : 0;
  const int order[2] = {low, 1 - low};

  RunRecord rec;
  rec.mapping_ms = ms_since(t0);
  rec.technique = technique_name(Technique::Qoncord);
  rec.benchmark = problem.name;
  rec.device = devices[order[0]]->name() + "+" + devices[order[1]]->name();
  rec.seed = seed;
  rec.num_qubits = problem.ansatz.num_qubits();

  std::vector<double> x = initial_params(problem.ansatz.num_params(), seed);
  const OptimizerConfig* phase_cfg[2] = {&cfg.qoncord_phase1, &cfg.qoncord_phase2};
  for (int phase = 0; phase < 2; ++phase) {
    const int d = order[phase];
    MapEvaluator& ev = *evals[d];
    auto objective = [&](std::span<const double> p) {
      rec.rows.push_back(ev.evaluate(maps[d], p, static_cast<int>(rec.rows.size()), phase, seed));
      return rec.rows.back().energy;
    };
    const int before = static_cast<int>(rec.rows.size());
    OptTrace trace = minimize(objective, x, *phase_cfg[phase], seed);
    x = trace.best_params;

    PhaseInfo info;
    info.device = devices[d]->name();
    info.map = maps[d];
    info.esp = ev.scorer().esp(maps[d]);
    info.fidelity_estimate = fidelity[d];
    info.initial_step = phase_cfg[phase]->initial_step;
    info.termination = phase_cfg[phase]->termination;
    info.iterations = static_cast<int>(rec.rows.size()) - before;
    info.terminated_by = trace.terminated_by;
    rec.phases.push_back(info);
    rec.maps_used.push_back(maps[d]);
    rec.terminated_by = trace.terminated_by;
  }
  rec.final_params = x;
  summarize(rec);
  return rec;
}

RunRecord run_technique(const Problem& problem, std::span<const DeviceSnapshot* const> snapshots,
                        const TechniqueConfig& cfg, std::uint64_t seed) {
  const std::size_t need = cfg.technique == Technique::Qoncord ? 2 : 1;
  if (snapshots.size() != need) {
    throw ConfigError(std::string(technique_name(cfg.technique)) + " needs exactly " +
                      std::to_string(need) + " snapshot(s), got " +
                      std::to_string(snapshots.size()));
  }
  switch (cfg.technique) {
    case Technique::Nest:
    case Technique::RawSchedule: return run_nest(problem, *snapshots[0], cfg, seed);
    case Technique::BestMap: return run_bestmap(problem, *snapshots[0], cfg, seed);
    case Technique::Qoncord: return run_qoncord(problem, *snapshots[0], *snapshots[1], cfg, seed);
  }
  throw ConfigError("unknown technique");
}

ConcurrentResult run_concurrent(std::span<const Problem> problems, const DeviceSnapshot& snapshot,
                                const TechniqueConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const int k = static_cast<int>(problems.size());
  if (k == 0) throw EmptyInput("no jobs");

  std::vector<std::unique_ptr<NestJob>> jobs;
  std::vector<ZoneRequest> requests;
  for (int j = 0; j < k; ++j) {
    jobs.push_back(std::make_unique<NestJob>(problems[j], snapshot, cfg, seed_for_job(seed, j)));
  }
  for (int j = 0; j < k; ++j) {
    NestJob* job = jobs[j].get();
    requests.push_back({&problems[j].ansatz,
                        [job](std::span<const CircuitMap> c, MapScorer&) { return job->initial_choice(c); }});
  }
  ZoneRegistry registry(snapshot.num_qubits());
  const auto zones = allocate_zones(requests, snapshot, &registry);

  ConcurrentResult out;
  out.report.k = k;
  std::vector<std::unique_ptr<SteppedOptimizer>> opts;
  for (int j = 0; j < k; ++j) {
    jobs[j]->start(zones[j].map);
    out.report.initial_maps.push_back(zones[j].map);
    const std::uint64_t s = seed_for_job(seed, j);
    opts.push_back(std::make_unique<SteppedOptimizer>(
        initial_params(problems[j].ansatz.num_params(), s), nest_optimizer(cfg), s));
  }

  std::vector<char> active(k, 1);
  int remaining = k;
  std::vector<char> used(snapshot.num_qubits());
  while (remaining > 0) {
    // Finished jobs drop out first so their qubits are free for this tick's walks.
    std::vector<std::optional<std::vector<double>>> asks(k);
    for (int j = 0; j < k; ++j) {
      if (!active[j]) continue;
      asks[j] = opts[j]->ask();
      if (!asks[j]) {
        active[j] = 0;
        --remaining;
        registry.release(j);
      }
    }
    if (remaining == 0) break;
    std::fill(used.begin(), used.end(), 0);
    for (int j = 0; j < k; ++j) {
      if (!active[j]) continue;
      if (jobs[j]->at_boundary()) {
        jobs[j]->transition(registry.excluded_for(j));
        registry.claim(j, jobs[j]->map().physical_set());
      }
      for (auto p : jobs[j]->map().physical_set()) {
        if (used[p]) out.report.disjoint = false;
        used[p] = 1;
      }
    }
    for (int j = 0; j < k; ++j) {
      if (active[j]) opts[j]->tell(jobs[j]->evaluate(*asks[j]));
    }
    ++out.report.ticks;
  }

  double iters = 0.0;
  for (int j = 0; j < k; ++j) {
    out.records.push_back(jobs[j]->finish(opts[j]->trace()));
    out.report.iterations.push_back(out.records.back().iterations);
    iters += out.records.back().iterations;
  }
  out.report.mean_iterations = iters / k;
  out.report.throughput = out.report.mean_iterations > 0 ? k / out.report.mean_iterations : 0.0;
  return out;
}

}  // namespace nest
