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

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "nest/circuits.hpp"
#include "nest/error.hpp"
#include "nest/simulator.hpp"

using namespace nest;

namespace {

DeviceSnapshot uniform_path(int n, double sq, double tq, double readout, double t1 = 1e9,
                            double t2 = 1e9) {
  std::vector<QubitProps> qs(n, QubitProps{t1, t2, readout, sq, 0.05});
  std::vector<std::pair<Edge, EdgeProps>> es;
  for (int q = 0; q + 1 < n; ++q) es.push_back({Edge(q, q + 1), EdgeProps{tq, 0.3}});
  return DeviceSnapshot("uniform", n, qs, es);
}

PauliHamiltonian ham(std::initializer_list<std::pair<double, const char*>> terms) {
  PauliHamiltonian h(static_cast<int>(std::string(terms.begin()->second).size()));
  for (const auto& [c, p] : terms) h.add(c, p);
  return h;
}

}  // namespace

TEST_CASE("ideal statevector basics") {
  const auto empty = simulate_ideal(ParamCircuit(1), {});
  CHECK(empty[0] == Amplitude(1.0));
  CHECK(empty[1] == Amplitude(0.0));

  ParamCircuit h(1);
  h.h(0);
  const auto plus = simulate_ideal(h, {});
  CHECK(plus[0].real() == doctest::Approx(std::numbers::sqrt2 / 2));
  CHECK(plus[1].real() == doctest::Approx(std::numbers::sqrt2 / 2));

  ParamCircuit bell(2);
  bell.h(0).cx(0, 1);
  const auto b = simulate_ideal(bell, {});
  CHECK(std::abs(b[0] - Amplitude(std::numbers::sqrt2 / 2)) < 1e-15);
  CHECK(std::abs(b[1]) < 1e-15);
  CHECK(std::abs(b[2]) < 1e-15);
  CHECK(std::abs(b[3] - Amplitude(std::numbers::sqrt2 / 2)) < 1e-15);
}

TEST_CASE("ideal simulation errors") {
  ParamCircuit c(1, 1);
  c.rotation(GateOp::RY, 0, 0);
  CHECK_THROWS_AS(simulate_ideal(c, std::vector<double>{}), ParamLengthMismatch);
  CHECK_THROWS_AS(simulate_ideal(ParamCircuit(kMaxStatevectorQubits + 1), {}), TooManyQubits);
}

TEST_CASE("normalization survives a thousand gates") {
  std::mt19937_64 rng(2);
  ParamCircuit c(5, 1000);
  for (int p = 0; p < 1000; ++p) {
    const int q = static_cast<int>(rng() % 5);
    c.rotation(p % 3 == 0 ? GateOp::RX : p % 3 == 1 ? GateOp::RY : GateOp::RZ, q, p);
    if (p % 2) c.cx(q, (q + 1) % 5);
  }
  std::vector<double> params(1000);
  for (auto& x : params) x = std::uniform_real_distribution<double>(-3, 3)(rng);
  double norm = 0.0;
  for (const auto& a : simulate_ideal(c, params)) norm += std::norm(a);
  CHECK(std::abs(norm - 1.0) <= 1e-10);
}

TEST_CASE("expectation examples without noise") {
  const auto z = ham({{1.0, "Z"}});
  const auto r0 = trivial_route(ParamCircuit(1));
  for (int shots : {1, 17, 4096}) CHECK(expectation(r0, {}, z, shots, 3).value == 1.0);

  ParamCircuit bell(2);
  bell.h(0).cx(0, 1);
  const auto rb = trivial_route(bell);
  const auto zz = ham({{1.0, "ZZ"}});
  for (auto backend : {Backend::Trajectory, Backend::DensityMatrix}) {
    const auto e = expectation(rb, {}, zz, 4096, 9, nullptr, backend);
    CHECK(e.value == 1.0);
    CHECK(e.std_error == 0.0);
    CHECK(e.shots == 4096);
  }
  CHECK_THROWS_AS(expectation(rb, {}, z, 10, 1), DimensionMismatch);
  CHECK_THROWS_AS(expectation(rb, {}, zz, 0, 1), DomainError);
}

TEST_CASE("fully random readout averages to zero") {
  const auto d = uniform_path(1, 0.0, 0.0, 0.5);
  ParamCircuit x(1);
  x.rotation(GateOp::RX, 0, -1, 1.0, std::numbers::pi);
  RoutedCircuit r = trivial_route(x);
  const NoiseBinding nb{&d, false, false, true};
  CHECK(exact_noisy_expectation(r, {}, ham({{1.0, "Z"}}), &nb) == doctest::Approx(0.0).epsilon(1e-12));
  const auto e = expectation(r, {}, ham({{1.0, "Z"}}), 200000, 4, &nb, Backend::Trajectory);
  CHECK(std::abs(e.value) < 4.0 * e.std_error + 1e-3);
}

TEST_CASE("depolarizing at 3/4 fully mixes one qubit") {
  const auto d = uniform_path(1, 0.75, 0.0, 0.0);
  ParamCircuit c(1);
  c.rotation(GateOp::RZ, 0, -1, 1.0, 0.3);
  const auto r = trivial_route(c);
  const NoiseBinding nb{&d, true, false, false};
  CHECK(std::abs(exact_noisy_expectation(r, {}, ham({{1.0, "Z"}}), &nb)) <= 1e-12);
}

TEST_CASE("noise-free oracle equals the ideal expectation") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    ParamCircuit c = efficient_su2(3, 2);
    std::vector<double> params(c.num_params());
    for (auto& x : params) x = std::uniform_real_distribution<double>(-3, 3)(rng);
    const auto h = ham({{0.7, "ZZI"}, {-0.4, "XIX"}, {0.2, "IYZ"}, {0.3, "III"}});
    const auto psi = simulate_ideal(c, params);
    // <psi|H|psi> from the dense matrix of each Pauli string.
    double want = 0.3;
    const Amplitude i1(0.0, 1.0);
    for (const auto& t : h.terms()) {
      if (t.pauli == "III") continue;
      Amplitude acc = 0.0;
      for (std::size_t col = 0; col < psi.size(); ++col) {
        std::size_t row = col;
        Amplitude phase = 1.0;
        for (int q = 0; q < 3; ++q) {
          const int bit = col >> q & 1;
          switch (t.pauli[q]) {
            case 'X': row ^= std::size_t{1} << q; break;
            case 'Y': row ^= std::size_t{1} << q; phase *= bit ? -i1 : i1; break;
            case 'Z': phase *= bit ? -1.0 : 1.0; break;
            default: break;
          }
        }
        acc += std::conj(psi[row]) * phase * psi[col];
      }
      want += t.coeff * acc.real();
    }
    const auto r = trivial_route(c);
    CHECK(exact_noisy_expectation(r, params, h, nullptr) == doctest::Approx(want).epsilon(1e-9));
    const auto d = uniform_path(3, 0.0, 0.0, 0.0);
    const NoiseBinding off{&d, false, false, false};
    CHECK(exact_noisy_expectation(r, params, h, &off) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("trajectories agree with the density-matrix oracle") {
  std::mt19937_64 rng(12);
  int within = 0;
  const int trials = 12;
  for (int trial = 0; trial < trials; ++trial) {
    const auto d = uniform_path(2, 0.01 + 0.05 * (trial % 3), 0.05, 0.03, 30.0, 20.0);
    ParamCircuit c = efficient_su2(2, 1);
    std::vector<double> params(c.num_params());
    for (auto& x : params) x = std::uniform_real_distribution<double>(-3, 3)(rng);
    const auto routed = route(c, CircuitMap({0, 1}), d);
    const auto h = ham({{0.5, "ZZ"}, {0.8, "XI"}, {-0.3, "IY"}, {0.2, "ZI"}});
    const auto nb = NoiseBinding::from_snapshot(d);
    const double exact = exact_noisy_expectation(routed, params, h, &nb);
    const auto e = expectation(routed, params, h, 20000, trial, &nb, Backend::Trajectory);
    within += std::abs(e.value - exact) <= 3.0 * e.std_error;
  }
  CHECK(within >= trials - 1);
}

TEST_CASE("estimates are deterministic in the seed") {
  const auto d = nest::test::synthetic(Topology::path(3), 4);
  ParamCircuit c = efficient_su2(3, 1);
  const std::vector<double> params(c.num_params(), 0.4);
  const auto routed = route(c, CircuitMap({0, 1, 2}), d);
  const auto nb = NoiseBinding::from_snapshot(d);
  const auto h = ham({{1.0, "ZZI"}, {0.5, "IXX"}});
  for (auto backend : {Backend::Trajectory, Backend::DensityMatrix}) {
    const auto a = expectation(routed, params, h, 500, 77, &nb, backend);
    const auto b = expectation(routed, params, h, 500, 77, &nb, backend);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    const auto other = expectation(routed, params, h, 500, 78, &nb, backend);
    CHECK(other.value != a.value);
  }
}

TEST_CASE("scaling the observable scales the estimate") {
  // Same per-term shot streams: 2H is estimated termwise as twice H.
  const auto d = nest::test::synthetic(Topology::path(2), 4);
  ParamCircuit c = efficient_su2(2, 1);
  const std::vector<double> params(c.num_params(), 0.9);
  const auto routed = route(c, CircuitMap({0, 1}), d);
  const auto nb = NoiseBinding::from_snapshot(d);
  for (auto backend : {Backend::Trajectory, Backend::DensityMatrix}) {
    const auto one = expectation(routed, params, ham({{1.0, "ZZ"}, {0.5, "XX"}}), 300, 1, &nb, backend);
    const auto two = expectation(routed, params, ham({{2.0, "ZZ"}, {1.0, "XX"}}), 300, 1, &nb, backend);
    CHECK(two.value == doctest::Approx(2.0 * one.value).epsilon(1e-12));
    CHECK(two.std_error == doctest::Approx(2.0 * one.std_error).epsilon(1e-12));
  }
}

TEST_CASE("exact ground energies") {
  CHECK(exact_ground_energy(ham({{1.0, "Z"}})) == doctest::Approx(-1.0));
  CHECK(exact_ground_energy(ham({{1.0, "ZZ"}})) == doctest::Approx(-1.0));
  WeightedGraph tri{3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}};
  CHECK(exact_ground_energy(qaoa_maxcut(tri).hamiltonian) == doctest::Approx(-2.0));
  CHECK(exact_ground_energy(load_hamiltonian(resolve_data_path("hamiltonians/h2.txt"))) ==
        doctest::Approx(-1.13727017466).epsilon(1e-9));
  PauliHamiltonian big(kMaxExactQubits + 1);
  big.add(1.0, std::string(kMaxExactQubits + 1, 'Z'));
  CHECK_THROWS_AS(exact_ground_energy(big), TooManyQubits);
}

TEST_CASE("density oracle refuses large registers") {
  ParamCircuit c(kMaxDensityQubits + 1);
  PauliHamiltonian h(kMaxDensityQubits + 1);
  h.add(1.0, std::string(kMaxDensityQubits + 1, 'Z'));
  CHECK_THROWS_AS(exact_noisy_expectation(trivial_route(c), {}, h), TooManyQubits);
}

TEST_CASE("samples follow the ideal distribution and readout noise") {
  ParamCircuit x(2);
  x.rotation(GateOp::RX, 1, -1, 1.0, std::numbers::pi);
  const auto r = trivial_route(x);
  Executor ex(r, ham({{1.0, "ZZ"}}));
  for (auto s : ex.sample({}, 64, 5)) CHECK(s == 0b10);
  const auto d = uniform_path(2, 0.0, 0.0, 0.1);
  const NoiseBinding nb{&d, false, false, true};
  Executor noisy(r, ham({{1.0, "ZZ"}}), &nb, Backend::Trajectory);
  int flipped = 0;
  const auto samples = noisy.sample({}, 20000, 5);
  for (auto s : samples) flipped += s != 0b10;
  // P(any flip) = 1 - 0.9^2 = 0.19
  CHECK(flipped / 20000.0 == doctest::Approx(0.19).epsilon(0.05));
}
