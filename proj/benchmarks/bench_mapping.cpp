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

#include <benchmark/benchmark.h>

#include <string>
#include <tuple>

#include "nest/circuits.hpp"
#include "nest/device.hpp"
#include "nest/fidelity.hpp"
#include "nest/mapping.hpp"
#include "nest/paths.hpp"
#include "nest/schedule.hpp"

namespace {

using namespace nest;

const char* device_file(int q) {
  switch (q) {
    case 27: return "devices/synth27_a.json";
    case 127: return "devices/synth127.json";
    default: return "devices/synth508.json";
  }
}

ParamCircuit measured_su2(int n) {
  ParamCircuit c = efficient_su2(n, 3);
  c.measure_all();
  return c;
}

// Seed enumeration, bounds, an initial jump and five walk steps (n = 4, C = 6).
void BM_MappingStage(benchmark::State& state) {
  const auto dev = load_device(resolve_data_path(device_file(static_cast<int>(state.range(0)))));
  const auto circuit = measured_su2(4);
  for (auto _ : state) {
    MapScorer scorer(circuit, dev);
    const auto seeds = enumerate_seed_maps(dev, 4);
    std::vector<double> esps;
    for (const auto& m : seeds) esps.push_back(scorer.esp(m));
    EspSchedule s;
    std::tie(s.sigma_min, s.sigma_max) = default_sigma_bounds(esps);
    const auto plan = discretize(s, 6, kDefaultItersPerCycle);
    CircuitMap m = jump_to_target(seeds, scorer, plan.targets[0]);
    for (int c = 1; c < plan.cycles; ++c) m = walk_step(m, plan.targets[c], scorer);
    benchmark::DoNotOptimize(m);
  }
  state.counters["Q"] = static_cast<double>(dev.num_qubits());
}
BENCHMARK(BM_MappingStage)->Arg(27)->Arg(127)->Arg(508)->Unit(benchmark::kMillisecond);

void BM_MapEsp(benchmark::State& state) {
  const auto dev = load_device(resolve_data_path("devices/synth27_a.json"));
  const auto circuit = measured_su2(static_cast<int>(state.range(0)));
  const auto maps = enumerate_seed_maps(dev, static_cast<int>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(map_esp(circuit, maps[i++ % maps.size()], dev));
  }
}
BENCHMARK(BM_MapEsp)->Arg(2)->Arg(4)->Arg(8);

void BM_WalkNeighbors(benchmark::State& state) {
  const auto dev = load_device(resolve_data_path("devices/synth127.json"));
  const auto maps = enumerate_seed_maps(dev, 4);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(walk_neighbors(maps[i++ % maps.size()], dev));
}
BENCHMARK(BM_WalkNeighbors);

}  // namespace
