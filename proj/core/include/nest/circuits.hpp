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

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nest/circuit_map.hpp"
#include "nest/device.hpp"

namespace nest {

enum class GateOp { RY, RZ, RX, H, CX, SWAP, MEASURE };

std::string_view gate_name(GateOp op);
int gate_arity(GateOp op);
inline bool is_rotation(GateOp op) {
  return op == GateOp::RX || op == GateOp::RY || op == GateOp::RZ;
}

/**
 * One gate of the circuit IR. Rotation angles are `coeff * params[param] +
 * offset`; a negative `param` means the angle is fixed at `offset`.
 */
struct Gate {
  GateOp op = GateOp::H;
  std::array<int, 2> qubits{0, 0};
  int param = -1;
  double coeff = 1.0;
  double offset = 0.0;

  int arity() const { return gate_arity(op); }
  double angle(std::span<const double> params) const;

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Parameterized circuit over logical qubits 0..n-1.
class ParamCircuit {
 public:
  explicit ParamCircuit(int num_qubits = 0, int num_params = 0);

  int num_qubits() const noexcept { return n_; }
  int num_params() const noexcept { return num_params_; }
  std::span<const Gate> gates() const noexcept { return gates_; }

  ParamCircuit& add(Gate g);
  ParamCircuit& h(int q) { return add({GateOp::H, {q, q}}); }
  ParamCircuit& cx(int c, int t) { return add({GateOp::CX, {c, t}}); }
  ParamCircuit& swap(int a, int b) { return add({GateOp::SWAP, {a, b}}); }
  ParamCircuit& measure(int q) { return add({GateOp::MEASURE, {q, q}}); }
  ParamCircuit& rotation(GateOp op, int q, int param, double coeff = 1.0,
                         double offset = 0.0) {
    return add({op, {q, q}, param, coeff, offset});
  }
  ParamCircuit& measure_all();

  /// Throws unless parameter indices are dense in [0, num_params) and every
  /// measurement is terminal on its qubit.
  void validate() const;

 private:
  int n_;
  int num_params_;
  std::vector<Gate> gates_;
};

/// (reps + 1) RY/RZ rotation layers with linear CX entanglement between them.
ParamCircuit efficient_su2(int n, int reps);

struct PauliTerm {
  double coeff = 0.0;
  std::string pauli;  // character i acts on logical qubit i
};

/// Weighted sum of Pauli strings; duplicate strings are merged on insert.
class PauliHamiltonian {
 public:
  explicit PauliHamiltonian(int num_qubits = 0) : n_(num_qubits) {}

  int num_qubits() const noexcept { return n_; }
  std::span<const PauliTerm> terms() const noexcept { return terms_; }

  PauliHamiltonian& add(double coeff, std::string pauli);
  /// Sum of coefficients of all-identity terms.
  double identity_coefficient() const;
  /// True when every term is diagonal in the computational basis.
  bool is_diagonal() const;

 private:
  int n_;
  std::vector<PauliTerm> terms_;
};

PauliHamiltonian parse_hamiltonian(const std::string& text);
PauliHamiltonian load_hamiltonian(const std::filesystem::path& path);

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

struct WeightedGraph {
  int num_vertices = 0;
  std::vector<WeightedEdge> edges;
};

WeightedGraph parse_graph(const std::string& text);
WeightedGraph load_graph(const std::filesystem::path& path);

struct QaoaProblem {
  ParamCircuit circuit;
  PauliHamiltonian hamiltonian;
};

/// One-layer QAOA for MaxCut; params are (gamma, beta).
QaoaProblem qaoa_maxcut(const WeightedGraph& graph, int layers = 1);

/**
 * Circuit placed on physical qubits. `final_layout[l]` is the physical qubit
 * holding logical qubit l after all inserted SWAPs; measurement labels and
 * observables are read through it.
 */
struct RoutedCircuit {
  int num_logical = 0;
  int num_params = 0;
  std::vector<Gate> gates;
  CircuitMap map;
  std::vector<PhysicalQubit> final_layout;
  int inserted_swap_count = 0;
};

RoutedCircuit route(const ParamCircuit& circuit, const CircuitMap& map,
                    const DeviceSnapshot& snapshot);

/// SWAP → CX(a,b) CX(b,a) CX(a,b); other gates unchanged.
std::vector<Gate> lower_swaps(std::span<const Gate> gates);

/// ASAP layer index for every gate (measurements get -1 and occupy no layer).
std::vector<int> asap_layers(std::span<const Gate> gates, int* depth = nullptr);

}  // namespace nest
