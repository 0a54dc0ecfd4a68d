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

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "nest/circuit_map.hpp"
#include "nest/circuits.hpp"
#include "nest/error.hpp"
#include "nest/fidelity.hpp"
#include "nest/mapping.hpp"
#include "nest/metrics.hpp"
#include "nest/paths.hpp"
#include "nest/records.hpp"
#include "nest/schedule.hpp"
#include "nest/simulator.hpp"

namespace nest::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

template <class T>
T get(const json& obj, const char* key, const std::string& where, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    bad(where + ": bad value for '" + key + "'");
  }
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      bad(where + ": unknown key '" + key + "'");
    }
  }
}

Technique parse_technique(const std::string& s, const std::string& where) {
  const auto t = lower(s);
  if (t == "nest") return Technique::Nest;
  if (t == "bestmap" || t == "best_map") return Technique::BestMap;
  if (t == "qoncord") return Technique::Qoncord;
  if (t == "schedule" || t == "raw_schedule") return Technique::RawSchedule;
  bad(where + ": unknown technique '" + s + "'");
}

Backend parse_backend(const std::string& s, const std::string& where) {
  const auto b = lower(s);
  if (b == "auto") return Backend::Auto;
  if (b == "trajectory") return Backend::Trajectory;
  if (b == "density" || b == "density_matrix") return Backend::DensityMatrix;
  bad(where + ": unknown backend '" + s + "'");
}

void parse_schedule(const json& j, EspSchedule& s, bool& explicit_bounds, const std::string& where) {
  if (j.is_string()) {
    auto k = parse_schedule_kind(j.get<std::string>());
    if (!k) bad(where + ": unknown schedule '" + j.get<std::string>() + "'");
    s.kind = *k;
    return;
  }
  if (!j.is_object()) bad(where + ": schedule must be a name or an object");
  check_keys(j, where + ".schedule",
             {"kind", "alpha", "beta", "gamma", "reversed", "sigma_min", "sigma_max"});
  if (j.contains("kind")) parse_schedule(j["kind"], s, explicit_bounds, where);
  s.alpha = get(j, "alpha", where, s.alpha);
  s.beta = get(j, "beta", where, s.beta);
  s.gamma = get(j, "gamma", where, s.gamma);
  s.reversed = get(j, "reversed", where, s.reversed);
  if (j.contains("sigma_min") != j.contains("sigma_max")) {
    bad(where + ": give both sigma_min and sigma_max or neither");
  }
  if (j.contains("sigma_min")) {
    explicit_bounds = true;
    s.sigma_min = get(j, "sigma_min", where, 0.0);
    s.sigma_max = get(j, "sigma_max", where, 1.0);
  }
}

void parse_optimizer(const json& j, OptimizerConfig& o, const std::string& where) {
  if (!j.is_object()) bad(where + ": optimizer override must be an object");
  check_keys(j, where, {"method", "initial_step", "max_evals", "tol", "window", "min_rel", "min_step"});
  if (j.contains("method")) {
    const auto m = lower(get<std::string>(j, "method", where, ""));
    if (m == "cobyla") o.method = Method::Cobyla;
    else if (m == "nelder_mead" || m == "nelder-mead") o.method = Method::NelderMead;
    else bad(where + ": unknown method '" + m + "'");
  }
  o.initial_step = get(j, "initial_step", where, o.initial_step);
  o.max_evals = get(j, "max_evals", where, o.max_evals);
  o.min_step = get(j, "min_step", where, o.min_step);
  if (j.contains("tol") && (j.contains("window") || j.contains("min_rel"))) {
    bad(where + ": tol and window/min_rel are exclusive");
  }
  if (j.contains("tol")) o.termination = Termination::default_tol(get(j, "tol", where, kDefaultTol));
  if (j.contains("window") || j.contains("min_rel")) {
    o.termination = Termination::sliding_window(get(j, "window", where, 100),
                                                get(j, "min_rel", where, 0.04));
  }
}

std::vector<std::uint64_t> parse_seeds(const json& j, const std::string& where) {
  std::vector<std::uint64_t> seeds;
  if (j.contains("seeds") && j.contains("num_seeds")) bad(where + ": seeds and num_seeds are exclusive");
  if (j.contains("seeds")) {
    seeds = get<std::vector<std::uint64_t>>(j, "seeds", where, {});
  } else {
    const int n = get(j, "num_seeds", where, 1);
    if (n < 1) bad(where + ": num_seeds must be positive");
    for (int i = 0; i < n; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
  }
  if (seeds.empty()) bad(where + ": no seeds");
  std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
  if (uniq.size() != seeds.size()) bad(where + ": seeds must be unique");
  return seeds;
}

void parse_technique_fields(const json& j, TechniqueConfig& cfg, const std::string& where) {
  if (j.contains("schedule")) parse_schedule(j["schedule"], cfg.schedule, cfg.explicit_bounds, where);
  cfg.cycles = get(j, "cycles", where, cfg.cycles);
  cfg.iters_per_cycle = get(j, "iters_per_cycle", where, cfg.iters_per_cycle);
  if (j.contains("transition")) {
    const auto t = lower(get<std::string>(j, "transition", where, ""));
    if (t == "walk") cfg.transition = TransitionMode::Walk;
    else if (t == "jump") cfg.transition = TransitionMode::Jump;
    else bad(where + ": transition must be walk or jump");
  }
  cfg.shots = get(j, "shots", where, cfg.shots);
  if (j.contains("backend")) cfg.backend = parse_backend(get<std::string>(j, "backend", where, ""), where);
  cfg.noisy = get(j, "noisy", where, cfg.noisy);
  cfg.restart_each_cycle = get(j, "restart_each_cycle", where, cfg.restart_each_cycle);
  cfg.qoncord_c = get(j, "qoncord_c", where, cfg.qoncord_c);
  if (j.contains("optimizer")) {
    const auto& o = j["optimizer"];
    if (!o.is_object()) bad(where + ": optimizer must be an object");
    check_keys(o, where + ".optimizer", {"nest", "bestmap", "qoncord_phase1", "qoncord_phase2"});
    if (o.contains("nest")) parse_optimizer(o["nest"], cfg.nest_optimizer, where + ".optimizer.nest");
    if (o.contains("bestmap")) parse_optimizer(o["bestmap"], cfg.bestmap_optimizer, where + ".optimizer.bestmap");
    if (o.contains("qoncord_phase1")) parse_optimizer(o["qoncord_phase1"], cfg.qoncord_phase1, where + ".optimizer.qoncord_phase1");
    if (o.contains("qoncord_phase2")) parse_optimizer(o["qoncord_phase2"], cfg.qoncord_phase2, where + ".optimizer.qoncord_phase2");
  }
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.is_relative() && !base.empty() && fs::exists(base / p)) return base / p;
  return resolve_data_path(p);
}

/// Everything an experiment needs, loaded and checked before any run starts.
struct Loaded {
  std::map<std::string, DeviceSnapshot> devices;
  std::map<std::string, Problem> problems;
  std::map<std::string, double> ideal;
};

Problem build_problem(const BenchmarkSpec& b, const fs::path& base) {
  if (!b.graph.empty()) {
    return make_qaoa_problem(b.name, load_graph(resolve(b.graph, base)));
  }
  return make_vqe_problem(b.name, load_hamiltonian(resolve(b.hamiltonian, base)), b.reps);
}

std::vector<const DeviceSnapshot*> devices_for(const ExperimentSpec& e, std::uint64_t seed,
                                               const Loaded& l) {
  std::vector<std::string> names = e.devices;
  if (!e.device_pool.empty()) {
    names.clear();
    for (int i : sample_available_devices(static_cast<int>(e.device_pool.size()), e.pick, seed)) {
      names.push_back(e.device_pool[static_cast<std::size_t>(i)]);
    }
    // NEST and BestMap use the first available device of the pair.
    if (e.cfg.technique != Technique::Qoncord) names.resize(1);
  }
  std::vector<const DeviceSnapshot*> out;
  for (const auto& n : names) out.push_back(&l.devices.at(n));
  return out;
}

Loaded load_and_validate(const Suite& s) {
  Loaded l;
  auto need_device = [&](const std::string& name, const std::string& where) {
    if (!s.devices.count(name)) bad(where + ": unknown device '" + name + "'");
    if (l.devices.count(name)) return;
    try {
      l.devices.emplace(name, load_device(resolve(s.devices.at(name), s.base_dir)));
    } catch (const Error& e) {
      bad(where + ": device '" + name + "': " + e.what());
    }
  };
  auto need_problem = [&](const std::string& name, const std::string& where) {
    if (!s.benchmarks.count(name)) bad(where + ": unknown benchmark '" + name + "'");
    if (l.problems.count(name)) return;
    try {
      Problem p = build_problem(s.benchmarks.at(name), s.base_dir);
      const double ideal = ideal_minimum(p);
      if (ideal == 0.0) bad(where + ": benchmark '" + name + "' has a zero ideal minimum");
      l.ideal.emplace(name, ideal);
      l.problems.emplace(name, std::move(p));
    } catch (const TooManyQubits&) {
      throw;
    } catch (const TooLargeForExact&) {
      throw;
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      bad(where + ": benchmark '" + name + "': " + e.what());
    }
  };
  for (const auto& e : s.experiments) {
    const std::string where = "experiment '" + e.name + "'";
    try {
      e.cfg.validate();
    } catch (const Error& err) {
      bad(where + ": " + err.what());
    }
    need_problem(e.benchmark, where);
    for (const auto& d : e.devices) need_device(d, where);
    for (const auto& d : e.device_pool) need_device(d, where);
    const Problem& p = l.problems.at(e.benchmark);
    for (const auto seed : e.seeds) {
      for (const auto* snap : devices_for(e, seed, l)) {
        if (snap->num_qubits() < p.ansatz.num_qubits()) {
          bad(where + ": device '" + snap->name() + "' has fewer qubits than the benchmark");
        }
      }
    }
  }
  if (s.multiprog) {
    need_problem(s.multiprog->benchmark, "multiprog");
    need_device(s.multiprog->device, "multiprog");
    try {
      s.multiprog->cfg.validate();
    } catch (const Error& err) {
      bad(std::string("multiprog: ") + err.what());
    }
  }
  return l;
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
}

std::string seed_file(const std::string& experiment, std::uint64_t seed) {
  return experiment + "_seed" + std::to_string(seed) + ".csv";
}

/// Runs f(i) for i in [0, n) on up to `workers` threads; first error wins.
template <class F>
void parallel_for(int n, int workers, F&& f) {
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto body = [&]() {
    for (int i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lk(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int w = std::max(1, std::min(workers, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < w; ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct RunFailure : Error {
  RunFailure(const std::string& what) : Error(what) {}
};

int report(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  if (dynamic_cast<const AllocationFailure*>(&e)) return kExitAllocation;
  if (dynamic_cast<const TooManyQubits*>(&e) || dynamic_cast<const TooLargeForExact*>(&e)) {
    return kExitTooLarge;
  }
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const InvalidSpec*>(&e)) {
    return kExitConfig;
  }
  return kExitRuntime;
}

ParamCircuit scored_circuit(const Problem& p) {
  ParamCircuit c = p.ansatz;
  c.measure_all();
  return c;
}

Problem problem_for_cli(int qubits, int reps, const fs::path& graph) {
  if (!graph.empty()) return make_qaoa_problem("graph", load_graph(graph));
  if (qubits < 1) throw ConfigError("--qubits must be positive");
  Problem p;
  p.name = "efficient_su2";
  p.ansatz = efficient_su2(qubits, reps);
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Suite config
// ---------------------------------------------------------------------------

Suite parse_suite(const std::string& json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("config must be a JSON object");
  check_keys(doc, "config",
             {"output_dir", "parallel_seeds", "baseline", "devices", "benchmarks", "experiments",
              "multiprog"});
  Suite s;
  s.base_dir = base_dir;
  s.output_dir = get<std::string>(doc, "output_dir", "config", "out");
  s.parallel_seeds = get(doc, "parallel_seeds", "config", 1);
  if (s.parallel_seeds < 1) bad("parallel_seeds must be positive");
  s.baseline = get<std::string>(doc, "baseline", "config", "");

  const json devs = get<json>(doc, "devices", "config", json::object());
  if (!devs.is_object()) bad("devices must be an object");
  for (const auto& [name, path] : devs.items()) {
    if (!path.is_string()) bad("devices." + name + " must be a file path");
    s.devices[name] = path.get<std::string>();
  }
  const json benches = get<json>(doc, "benchmarks", "config", json::object());
  if (!benches.is_object()) bad("benchmarks must be an object");
  for (const auto& [name, b] : benches.items()) {
    const std::string where = "benchmark '" + name + "'";
    if (!b.is_object()) bad(where + " must be an object");
    check_keys(b, where, {"hamiltonian", "graph", "reps"});
    BenchmarkSpec spec;
    spec.name = name;
    spec.hamiltonian = get<std::string>(b, "hamiltonian", where, "");
    spec.graph = get<std::string>(b, "graph", where, "");
    spec.reps = get(b, "reps", where, 3);
    if (spec.hamiltonian.empty() == spec.graph.empty()) {
      bad(where + ": give exactly one of hamiltonian or graph");
    }
    if (spec.reps < 1) bad(where + ": reps must be positive");
    s.benchmarks[name] = spec;
  }

  const json exps = get<json>(doc, "experiments", "config", json::array());
  if (!exps.is_array()) bad("experiments must be an array");
  std::set<std::string> names;
  for (const auto& e : exps) {
    if (!e.is_object()) bad("experiments entries must be objects");
    ExperimentSpec x;
    x.name = get<std::string>(e, "name", "experiment", "");
    if (x.name.empty()) bad("experiment without a name");
    const std::string where = "experiment '" + x.name + "'";
    if (!names.insert(x.name).second) bad(where + ": duplicate name");
    if (x.name.find_first_of("/\\") != std::string::npos) bad(where + ": name must not contain path separators");
    check_keys(e, where,
               {"name", "technique", "benchmark", "devices", "device_pool", "pick", "seeds",
                "num_seeds", "cost_c", "cut_shots", "schedule", "cycles", "iters_per_cycle",
                "transition", "shots", "backend", "noisy", "restart_each_cycle", "qoncord_c",
                "optimizer"});
    x.cfg.technique = parse_technique(get<std::string>(e, "technique", where, "nest"), where);
    x.benchmark = get<std::string>(e, "benchmark", where, "");
    if (x.benchmark.empty()) bad(where + ": missing benchmark");
    x.devices = get<std::vector<std::string>>(e, "devices", where, {});
    x.device_pool = get<std::vector<std::string>>(e, "device_pool", where, {});
    x.pick = get(e, "pick", where, 2);
    if (x.devices.empty() == x.device_pool.empty()) bad(where + ": give exactly one of devices or device_pool");
    const std::size_t want = x.cfg.technique == Technique::Qoncord ? 2 : 1;
    if (!x.devices.empty() && x.devices.size() != want) {
      bad(where + ": technique needs exactly " + std::to_string(want) + " device(s)");
    }
    if (!x.device_pool.empty() &&
        (x.pick < static_cast<int>(want) || x.pick > static_cast<int>(x.device_pool.size()))) {
      bad(where + ": pick must lie in [" + std::to_string(want) + ", pool size]");
    }
    x.seeds = parse_seeds(e, where);
    x.cost_c = get(e, "cost_c", where, 1.0);
    x.cut_shots = get(e, "cut_shots", where, 4096);
    if (x.cut_shots < 1) bad(where + ": cut_shots must be positive");
    parse_technique_fields(e, x.cfg, where);
    s.experiments.push_back(std::move(x));
  }
  if (!s.baseline.empty() && !names.count(s.baseline)) bad("baseline names no experiment");

  if (doc.contains("multiprog")) {
    const auto& m = doc["multiprog"];
    if (!m.is_object()) bad("multiprog must be an object");
    check_keys(m, "multiprog",
               {"benchmark", "device", "seeds", "num_seeds", "schedule", "cycles",
                "iters_per_cycle", "transition", "shots", "backend", "noisy",
                "restart_each_cycle", "optimizer"});
    MultiprogSpec mp;
    mp.benchmark = get<std::string>(m, "benchmark", "multiprog", "");
    mp.device = get<std::string>(m, "device", "multiprog", "");
    if (mp.benchmark.empty() || mp.device.empty()) bad("multiprog needs benchmark and device");
    mp.seeds = parse_seeds(m, "multiprog");
    parse_technique_fields(m, mp.cfg, "multiprog");
    s.multiprog = std::move(mp);
  }
  return s;
}

Suite load_suite(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  Suite s = parse_suite(read_text_file(path), path.parent_path());
  if (s.output_dir.is_relative()) s.output_dir = fs::current_path() / s.output_dir;
  return s;
}

void apply_overrides(Suite& s, const Overrides& o) {
  if (o.out) s.output_dir = *o.out;
  if (o.parallel) {
    if (*o.parallel < 1) throw ConfigError("--parallel must be positive");
    s.parallel_seeds = *o.parallel;
  }
  for (auto& e : s.experiments) {
    if (o.seed) e.seeds = {*o.seed};
    if (o.shots) e.cfg.shots = *o.shots;
  }
  if (s.multiprog) {
    if (o.seed) s.multiprog->seeds = {*o.seed};
    if (o.shots) s.multiprog->cfg.shots = *o.shots;
  }
}

double ideal_minimum(const Problem& p) {
  if (p.graph && p.hamiltonian.num_qubits() > kMaxExactQubits) {
    return -brute_force_max_cut(*p.graph);
  }
  return exact_ground_energy(p.hamiltonian);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_run(const fs::path& config, const Overrides& o, std::ostream& out, std::ostream& err) {
  try {
    Suite s = load_suite(config);
    apply_overrides(s, o);
    if (s.experiments.empty()) throw ConfigError("config has no experiments");
    const Loaded l = load_and_validate(s);

    struct Job {
      std::size_t exp;
      std::size_t seed_idx;
    };
    std::vector<Job> jobs;
    for (std::size_t e = 0; e < s.experiments.size(); ++e) {
      for (std::size_t k = 0; k < s.experiments[e].seeds.size(); ++k) jobs.push_back({e, k});
    }
    std::vector<std::vector<RunRecord>> records(s.experiments.size());
    std::vector<std::vector<double>> ratios(s.experiments.size());
    for (std::size_t e = 0; e < s.experiments.size(); ++e) {
      records[e].resize(s.experiments[e].seeds.size());
      ratios[e].resize(s.experiments[e].seeds.size());
    }

    parallel_for(static_cast<int>(jobs.size()), s.parallel_seeds, [&](int i) {
      const auto [e, k] = jobs[static_cast<std::size_t>(i)];
      const ExperimentSpec& x = s.experiments[e];
      const std::uint64_t seed = x.seeds[k];
      try {
        const Problem& p = l.problems.at(x.benchmark);
        const auto devs = devices_for(x, seed, l);
        RunRecord r = run_technique(p, devs, x.cfg, seed);
        if (p.graph) {
          const DeviceSnapshot& last = *devs.back();
          ratios[e][k] = approximation_ratio(sampled_cut_of_run(p, last, r, x.cfg, x.cut_shots), *p.graph);
        }
        records[e][k] = std::move(r);
      } catch (const std::exception& ex) {
        throw RunFailure("experiment '" + x.name + "' seed " + std::to_string(seed) + ": " + ex.what());
      }
    });

    // All runs succeeded; now write everything.
    CsvTable cmp;
    cmp.header = {"experiment", "technique", "benchmark", "runs",
                  "energy_gap_pct_mean", "energy_gap_pct_std", "iterations_mean", "iterations_std",
                  "user_cost_mean", "user_cost_std", "best_energy_mean", "best_energy_std",
                  "mean_esp", "mean_depth", "throughput", "throughput_vs_baseline",
                  "approximation_ratio_mean", "approximation_ratio_std"};
    std::vector<MetricReport> reports;
    for (std::size_t e = 0; e < s.experiments.size(); ++e) {
      const ExperimentSpec& x = s.experiments[e];
      const double ideal = l.ideal.at(x.benchmark);
      const bool graph = l.problems.at(x.benchmark).graph.has_value();
      reports.push_back(aggregate(records[e], ideal, x.cost_c,
                                  graph ? std::span<const double>(ratios[e]) : std::span<const double>{}));
      const fs::path dir = s.output_dir / x.name;
      for (std::size_t k = 0; k < x.seeds.size(); ++k) {
        write_file(dir / seed_file(x.name, x.seeds[k]), to_csv(records_table(records[e][k])));
      }
      write_file(dir / "summary.json",
                 experiment_summary_json(x.name, records[e], ideal, reports.back(), x.cost_c));
    }
    double base_thr = 0.0;
    for (std::size_t e = 0; e < s.experiments.size(); ++e) {
      if (s.experiments[e].name == s.baseline) base_thr = throughput(1, reports[e].iterations.mean);
    }
    for (std::size_t e = 0; e < s.experiments.size(); ++e) {
      const ExperimentSpec& x = s.experiments[e];
      const MetricReport& m = reports[e];
      const double thr = throughput(1, m.iterations.mean);
      std::vector<std::string> row = {
          x.name, records[e].front().technique, x.benchmark, std::to_string(m.iterations.n)};
      for (const Stat* st : {&m.energy_gap_pct, &m.iterations, &m.user_cost, &m.best_energy}) {
        row.push_back(format_double(st->mean));
        row.push_back(format_double(st->std));
      }
      row.push_back(format_double(m.mean_esp.mean));
      row.push_back(format_double(m.mean_depth.mean));
      row.push_back(format_double(thr));
      row.push_back(base_thr > 0.0 ? format_double(thr / base_thr) : "");
      row.push_back(m.approximation_ratio ? format_double(m.approximation_ratio->mean) : "");
      row.push_back(m.approximation_ratio ? format_double(m.approximation_ratio->std) : "");
      cmp.rows.push_back(std::move(row));
    }
    write_file(s.output_dir / "comparison.csv", to_csv(cmp));
    out << to_csv(cmp);
    return kExitOk;
  } catch (const RunFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

int cmd_multiprog(const fs::path& config, int k, const Overrides& o, std::ostream& out,
                  std::ostream& err) {
  try {
    if (k < 1) throw ConfigError("k must be at least 1");
    Suite s = load_suite(config);
    apply_overrides(s, o);
    if (!s.multiprog) throw ConfigError("config has no multiprog section");
    s.experiments.clear();
    const Loaded l = load_and_validate(s);
    const MultiprogSpec& mp = *s.multiprog;
    const Problem& p = l.problems.at(mp.benchmark);
    const DeviceSnapshot& dev = l.devices.at(mp.device);
    const double ideal = l.ideal.at(mp.benchmark);

    std::vector<std::vector<ConcurrentResult>> results(static_cast<std::size_t>(k));
    for (int kk = 1; kk <= k; ++kk) {
      results[static_cast<std::size_t>(kk - 1)].resize(mp.seeds.size());
      const std::vector<Problem> jobs(static_cast<std::size_t>(kk), p);
      parallel_for(static_cast<int>(mp.seeds.size()), s.parallel_seeds, [&](int i) {
        results[static_cast<std::size_t>(kk - 1)][static_cast<std::size_t>(i)] =
            run_concurrent(jobs, dev, mp.cfg, mp.seeds[static_cast<std::size_t>(i)]);
      });
    }

    CsvTable table;
    table.header = {"k", "seeds", "mean_iterations", "throughput", "throughput_ratio",
                    "energy_gap_pct_mean", "energy_gap_pct_std", "disjoint"};
    double thr1 = 0.0;
    for (int kk = 1; kk <= k; ++kk) {
      const auto& rs = results[static_cast<std::size_t>(kk - 1)];
      std::vector<double> iters, gaps;
      bool disjoint = true;
      for (std::size_t i = 0; i < rs.size(); ++i) {
        disjoint = disjoint && rs[i].report.disjoint;
        for (std::size_t j = 0; j < rs[i].records.size(); ++j) {
          const RunRecord& r = rs[i].records[j];
          iters.push_back(r.iterations);
          gaps.push_back(energy_gap(ideal, r.best_energy));
          write_file(s.output_dir / "multiprog" /
                         ("k" + std::to_string(kk) + "_seed" + std::to_string(mp.seeds[i]) +
                          "_job" + std::to_string(j) + ".csv"),
                     to_csv(records_table(r)));
        }
      }
      const double mean_it = mean_std(iters).mean;
      const double thr = throughput(kk, mean_it);
      if (kk == 1) thr1 = thr;
      const Stat g = mean_std(gaps);
      table.rows.push_back({std::to_string(kk), std::to_string(rs.size()), format_double(mean_it),
                            format_double(thr), format_double(thr / thr1), format_double(g.mean),
                            format_double(g.std), disjoint ? "true" : "false"});
    }
    write_file(s.output_dir / "multiprog.csv", to_csv(table));
    out << to_csv(table);
    return kExitOk;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

int cmd_schedules(const EspSchedule& schedule, std::ostream& out, std::ostream& err) {
  try {
    schedule.validate();
    CsvTable t;
    t.header = {"t", "sigma"};
    for (int i = 0; i <= schedule.total_iters; ++i) {
      t.rows.push_back({std::to_string(i), format_double(sigma_at(schedule, i))});
    }
    out << to_csv(t);
    return kExitOk;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

int cmd_oracle(const fs::path& file, const std::string& kind, std::ostream& out, std::ostream& err) {
  try {
    const std::string text = read_text_file(resolve_data_path(file));
    std::string k = lower(kind);
    if (k.empty()) {
      // A Hamiltonian line is "<coeff> <pauli letters>"; anything else is a graph.
      std::istringstream in(text);
      std::string line;
      k = "graph";
      while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string a, b;
        if (!(ls >> a)) continue;
        if ((ls >> b) && b.find_first_not_of("IXYZ") == std::string::npos) k = "hamiltonian";
        break;
      }
    }
    char buf[64];
    if (k == "hamiltonian") {
      std::snprintf(buf, sizeof buf, "%.12g", exact_ground_energy(parse_hamiltonian(text)));
    } else if (k == "graph") {
      std::snprintf(buf, sizeof buf, "%.12g", brute_force_max_cut(parse_graph(text)));
    } else {
      throw ConfigError("--kind must be hamiltonian or graph");
    }
    out << buf << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

int cmd_maps(const fs::path& device, int qubits, int reps, const fs::path& graph, std::ostream& out,
             std::ostream& err) {
  try {
    const DeviceSnapshot snap = load_device(device);
    const Problem p = problem_for_cli(qubits, reps, graph);
    const ParamCircuit c = scored_circuit(p);
    MapScorer scorer(c, snap);
    const auto maps = enumerate_seed_maps(snap, c.num_qubits());
    CsvTable t;
    t.header = {"index", "assignment", "physical_set", "esp", "depth", "swaps"};
    int i = 0;
    for (const auto& sm : score_maps(maps, scorer)) {
      const RoutedCircuit r = route(c, sm.map, snap);
      const int depth = profile_circuit(r, sm.map, snap).depth;
      std::string assign;
      for (auto q : sm.map.assignment()) assign += (assign.empty() ? "" : ";") + std::to_string(q);
      t.rows.push_back({std::to_string(i++), assign, sm.map.csv_cell(), format_double(sm.esp),
                        std::to_string(depth), std::to_string(r.inserted_swap_count)});
    }
    out << to_csv(t);
    return kExitOk;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

int cmd_score_map(const fs::path& device, const std::vector<int>& assignment, int reps,
                  const fs::path& graph, std::ostream& out, std::ostream& err) {
  try {
    const DeviceSnapshot snap = load_device(device);
    const Problem p = problem_for_cli(static_cast<int>(assignment.size()), reps, graph);
    const ParamCircuit c = scored_circuit(p);
    const CircuitMap map(assignment);
    if (!is_valid_map(map, snap)) throw ConfigError("map is not injective and connected on the device");
    const RoutedCircuit r = route(c, map, snap);
    const CircuitProfile prof = profile_circuit(r, map, snap);
    json j;
    j["device"] = snap.name();
    j["map"] = assignment;
    j["esp"] = esp(prof);
    j["depth"] = prof.depth;
    j["swaps"] = r.inserted_swap_count;
    j["qoncord_fidelity"] = qoncord_fidelity(prof, QoncordParams::from_snapshot(snap));
    out << j.dump(2) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"nest: fidelity-scheduled VQA experiments on synthetic devices"};
  app.require_subcommand(1);

  Overrides o;
  std::string config, out_dir;
  std::uint64_t seed = 0;
  int shots = 0, parallel = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "suite config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "run a single seed");
    sub->add_option("--shots", shots, "shots per expectation");
    sub->add_option("--parallel", parallel, "seeds run in parallel");
  };

  auto* run = app.add_subcommand("run", "run every experiment of a suite");
  add_common(run);

  int k = 3;
  auto* multi = app.add_subcommand("multiprog", "co-located NEST jobs for k = 1..K");
  add_common(multi);
  multi->add_option("-k,--k", k, "largest concurrency to run")->capture_default_str();

  EspSchedule sched;
  std::string kind = "inverted_relu";
  auto* schedules = app.add_subcommand("schedules", "print sigma_t for t = 0..T as CSV");
  schedules->add_option("--kind", kind)->capture_default_str();
  schedules->add_option("--sigma-min", sched.sigma_min)->required();
  schedules->add_option("--sigma-max", sched.sigma_max)->required();
  schedules->add_option("--total", sched.total_iters, "T")->capture_default_str();
  schedules->add_option("--alpha", sched.alpha)->capture_default_str();
  schedules->add_option("--beta", sched.beta)->capture_default_str();
  schedules->add_option("--gamma", sched.gamma)->capture_default_str();
  schedules->add_flag("--reversed", sched.reversed);

  std::string oracle_file, oracle_kind;
  auto* oracle = app.add_subcommand("oracle", "exact ground energy or brute-force max cut");
  oracle->add_option("file", oracle_file, "Hamiltonian or graph file")->required();
  oracle->add_option("--kind", oracle_kind, "hamiltonian or graph (default: sniff)");

  std::string device, graph;
  int qubits = 0, reps = 3;
  auto* maps = app.add_subcommand("maps", "candidate maps with ESPs as CSV");
  maps->add_option("--device", device)->required();
  maps->add_option("--qubits", qubits, "EfficientSU2 width");
  maps->add_option("--reps", reps)->capture_default_str();
  maps->add_option("--graph", graph, "score the QAOA circuit of this graph instead");

  std::vector<int> assignment;
  auto* score = app.add_subcommand("score-map", "ESP, depth and fidelity estimate of one map");
  score->add_option("--device", device)->required();
  score->add_option("--map", assignment, "physical qubit per logical qubit")->required()->delimiter(',');
  score->add_option("--reps", reps)->capture_default_str();
  score->add_option("--graph", graph);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  auto fill = [&](CLI::App* sub) {
    if (!out_dir.empty()) o.out = fs::path(out_dir);
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--shots")) o.shots = shots;
    if (sub->count("--parallel")) o.parallel = parallel;
  };
  if (*run) {
    fill(run);
    return cmd_run(config, o, out, err);
  }
  if (*multi) {
    fill(multi);
    return cmd_multiprog(config, k, o, out, err);
  }
  if (*schedules) {
    auto kk = parse_schedule_kind(kind);
    if (!kk) {
      err << "error: unknown schedule '" << kind << "'\n";
      return kExitConfig;
    }
    sched.kind = *kk;
    return cmd_schedules(sched, out, err);
  }
  if (*oracle) return cmd_oracle(oracle_file, oracle_kind, out, err);
  if (*maps) return cmd_maps(device, qubits, reps, graph, out, err);
  if (*score) return cmd_score_map(device, assignment, reps, graph, out, err);
  return kExitUsage;
}

}  // namespace nest::cli
