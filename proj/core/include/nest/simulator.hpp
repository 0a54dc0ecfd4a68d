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

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "nest/circuits.hpp"
#include "nest/device.hpp"

namespace nest {

using Amplitude = std::complex<double>;
using StateVector = std::vector<Amplitude>;

inline constexpr int kMaxStatevectorQubits = 20;
inline constexpr int kMaxDensityQubits = 6;
inline constexpr int kMaxExactQubits = 12;

/**
 * Noise channels bound to a device snapshot.
 *
 * Each gate is followed by a depolarizing channel with the gate's error
 * (sq_error, or tq_error of its edge); a non-identity Pauli on the gate's
 * support is drawn uniformly. After every ASAP layer all mapped qubits undergo
 * amplitude damping 1 - exp(-t/T1) and phase damping 1 - exp(-t/T2), with t
 * the longest gate duration in the layer. Readout bits flip symmetrically.
 */
struct NoiseBinding {
  const DeviceSnapshot* snapshot = nullptr;
  bool depolarizing = true;
  bool damping = true;
  bool readout = true;

  static NoiseBinding from_snapshot(const DeviceSnapshot& s) { return {&s, true, true, true}; }
};

enum class Backend {
  /// Density matrix plus binomial shot sampling for n <= kMaxDensityQubits,
  /// trajectories above that.
  Auto,
  Trajectory,
  DensityMatrix,
};

struct ExpectationEstimate {
  double value = 0.0;
  int shots = 0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
};

/// Ideal statevector with bit l of the index holding logical qubit l.
StateVector simulate_ideal(const ParamCircuit& circuit, std::span<const double> params);
/// Same, for a routed circuit; the final SWAP permutation is undone.
StateVector simulate_ideal(const RoutedCircuit& routed, std::span<const double> params);

/**
 * Compiled executor for one routed circuit, observable and noise model.
 * Reusable across parameter vectors; evaluation is deterministic in
 * (params, shots, seed).
 */
class Executor {
 public:
  Executor(const RoutedCircuit& routed, const PauliHamiltonian& hamiltonian,
           const NoiseBinding* noise = nullptr, Backend backend = Backend::Auto);
  ~Executor();
  Executor(Executor&&) noexcept;
  Executor& operator=(Executor&&) noexcept;

  ExpectationEstimate expectation(std::span<const double> params, int shots,
                                  std::uint64_t seed) const;
  /// Shot-free value under the full channels (density matrix).
  double exact(std::span<const double> params) const;
  /// Computational-basis samples in logical bit order, readout noise included.
  std::vector<std::uint64_t> sample(std::span<const double> params, int shots,
                                    std::uint64_t seed) const;

  int num_qubits() const noexcept;
  Backend backend() const noexcept;

 private:
  struct Impl;
  Impl* impl_;
};

ExpectationEstimate expectation(const RoutedCircuit& routed, std::span<const double> params,
                                const PauliHamiltonian& hamiltonian, int shots,
                                std::uint64_t seed, const NoiseBinding* noise = nullptr,
                                Backend backend = Backend::Auto);

double exact_noisy_expectation(const RoutedCircuit& routed, std::span<const double> params,
                               const PauliHamiltonian& hamiltonian,
                               const NoiseBinding* noise = nullptr);

/// Minimum eigenvalue of the dense Hamiltonian matrix.
double exact_ground_energy(const PauliHamiltonian& hamiltonian);

/// Routes onto the identity placement of a path; handy for unmapped circuits.
RoutedCircuit trivial_route(const ParamCircuit& circuit);

}  // namespace nest
