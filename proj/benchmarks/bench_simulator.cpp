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

#include <vector>

#include "nest/circuit_map.hpp"
#include "nest/circuits.hpp"
#include "nest/device.hpp"
#include "nest/paths.hpp"
#include "nest/simulator.hpp"

namespace {

using namespace nest;

struct H2Setup {
  DeviceSnapshot dev = load_device(resolve_data_path("devices/synth27_a.json"));
  PauliHamiltonian h = load_hamiltonian(resolve_data_path("hamiltonians/h2.txt"));
  ParamCircuit ansatz = efficient_su2(4, 3);
  RoutedCircuit routed = route(ansatz, CircuitMap({0, 1, 2, 3}), dev);
  NoiseBinding noise = NoiseBinding::from_snapshot(dev);
  std::vector<double> params = std::vector<double>(static_cast<std::size_t>(ansatz.num_params()), 0.3);
};

const H2Setup& setup() {
  static const H2Setup s;
  return s;
}

void BM_Expectation(benchmark::State& state) {
  const auto& s = setup();
  const auto backend = static_cast<Backend>(state.range(0));
  const Executor exec(s.routed, s.h, &s.noise, backend);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(exec.expectation(s.params, 1024, seed++));
}
BENCHMARK(BM_Expectation)
    ->Arg(static_cast<int>(Backend::DensityMatrix))
    ->Arg(static_cast<int>(Backend::Trajectory))
    ->Unit(benchmark::kMillisecond);

void BM_IdealStatevector(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ParamCircuit c = efficient_su2(n, 3);
  const std::vector<double> params(static_cast<std::size_t>(c.num_params()), 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ideal(c, params));
}
BENCHMARK(BM_IdealStatevector)->Arg(4)->Arg(10)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_ExactGroundEnergy(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(exact_ground_energy(s.h));
}
BENCHMARK(BM_ExactGroundEnergy);

}  // namespace
