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

#include "nest/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "nest/error.hpp"
#include "nest/paths.hpp"

namespace nest {

std::string_view gate_name(GateOp op) {
  switch (op) {
    case GateOp::RY: return "RY";
    case GateOp::RZ: return "RZ";
    case GateOp::RX: return "RX";
    case GateOp::H: return "H";
    case GateOp::CX: return "CX";
    case GateOp::SWAP: return "SWAP";
    case GateOp::MEASURE: return "MEASURE";
  }
  return "?";
}

int gate_arity(GateOp op) {
  return (op == GateOp::CX || op == GateOp::SWAP) ? 2 : 1;
}

double Gate::angle(std::span<const double> params) const {
  if (param < 0) return offset;
  return coeff * params[static_cast<std::size_t>(param)] + offset;
}

// ---------------------------------------------------------------------------
// ParamCircuit
// ---------------------------------------------------------------------------

ParamCircuit::ParamCircuit(int num_qubits, int num_params)
    : n_(num_qubits), num_params_(num_params) {
  if (num_qubits < 0 || num_params < 0) {
    throw InvalidArity("circuit sizes must be non-negative");
  }
}

ParamCircuit& ParamCircuit::add(Gate g) {
  const int arity = g.arity();
  for (int i = 0; i < arity; ++i) {
    if (g.qubits[i] < 0 || g.qubits[i] >= n_) {
      throw InvalidArity("gate " + std::string(gate_name(g.op)) +
                         " references qubit " + std::to_string(g.qubits[i]) +
                         " outside [0," + std::to_string(n_) + ")");
    }
  }
  if (arity == 1) g.qubits[1] = g.qubits[0];
  if (arity == 2 && g.qubits[0] == g.qubits[1]) {
    throw InvalidArity("two-qubit gate on a single qubit");
  }
  if (g.param >= 0 && !is_rotation(g.op)) {
    throw InvalidArity("only rotations take parameters");
  }
  if (g.param >= num_params_) num_params_ = g.param + 1;
  gates_.push_back(g);
  return *this;
}

ParamCircuit& ParamCircuit::measure_all() {
  for (int q = 0; q < n_; ++q) measure(q);
  return *this;
}

void ParamCircuit::validate() const {
  std::vector<bool> used(num_params_, false);
  std::vector<bool> measured(n_, false);
  for (const auto& g : gates_) {
    if (g.param >= 0) used[g.param] = true;
    for (int i = 0; i < g.arity(); ++i) {
      if (measured[g.qubits[i]]) {
        throw InvalidArity("gate after measurement on qubit " +
                           std::to_string(g.qubits[i]));
      }
    }
    if (g.op == GateOp::MEASURE) measured[g.qubits[0]] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw InvalidArity("parameter indices are not dense");
  }
}

ParamCircuit efficient_su2(int n, int reps) {
  if (n < 1 || reps < 0) throw InvalidArity("efficient_su2 needs n >= 1, reps >= 0");
  ParamCircuit c(n);
  int p = 0;
  for (int layer = 0; layer <= reps; ++layer) {
    for (int q = 0; q < n; ++q) c.rotation(GateOp::RY, q, p++);
    for (int q = 0; q < n; ++q) c.rotation(GateOp::RZ, q, p++);
    if (layer < reps) {
      for (int q = 0; q + 1 < n; ++q) c.cx(q, q + 1);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// PauliHamiltonian
// ---------------------------------------------------------------------------

PauliHamiltonian& PauliHamiltonian::add(double coeff, std::string pauli) {
  if (!std::isfinite(coeff)) throw ParseError("non-finite Hamiltonian coefficient");
  for (auto& ch : pauli) {
    if (ch != 'I' && ch != 'X' && ch != 'Y' && ch != 'Z') {
      throw ParseError(std::string("invalid Pauli letter '") + ch + "'");
    }
  }
  if (static_cast<int>(pauli.size()) != n_) {
    throw LengthMismatch("Pauli string '" + pauli + "' has length " +
                         std::to_string(pauli.size()) + ", expected " +
                         std::to_string(n_));
  }
  for (auto& t : terms_) {
    if (t.pauli == pauli) {
      t.coeff += coeff;
      return *this;
    }
  }
  terms_.push_back({coeff, std::move(pauli)});
  return *this;
}

double PauliHamiltonian::identity_coefficient() const {
  double total = 0.0;
  for (const auto& t : terms_) {
    if (t.pauli.find_first_not_of('I') == std::string::npos) total += t.coeff;
  }
  return total;
}

bool PauliHamiltonian::is_diagonal() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const PauliTerm& t) {
    return t.pauli.find_first_of("XY") == std::string::npos;
  });
}

PauliHamiltonian parse_hamiltonian(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<PauliTerm> raw;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string coeff_text, pauli, rest;
    if (!(ls >> coeff_text)) continue;
    if (!(ls >> pauli) || (ls >> rest)) {
      throw ParseError("Hamiltonian line " + std::to_string(line_no) +
                       ": expected 'coeff PAULISTRING'");
    }
    double coeff = 0.0;
    try {
      std::size_t used = 0;
      coeff = std::stod(coeff_text, &used);
      if (used != coeff_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("Hamiltonian line " + std::to_string(line_no) +
                       ": bad coefficient '" + coeff_text + "'");
    }
    raw.push_back({coeff, pauli});
  }
  if (raw.empty()) throw ParseError("Hamiltonian file has no terms");
  PauliHamiltonian h(static_cast<int>(raw.front().pauli.size()));
  for (auto& t : raw) h.add(t.coeff, std::move(t.pauli));
  return h;
}

PauliHamiltonian load_hamiltonian(const std::filesystem::path& path) {
  return parse_hamiltonian(read_text_file(resolve_data_path(path)));
}

// ---------------------------------------------------------------------------
// Graphs and QAOA
// ---------------------------------------------------------------------------

WeightedGraph parse_graph(const std::string& text) {
  WeightedGraph g;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long u = 0, v = 0;
    if (!(ls >> u)) continue;
    double w = 1.0;
    if (!(ls >> v) || u < 0 || v < 0 || u == v) {
      throw ParseError("graph line " + std::to_string(line_no) + ": expected 'u v [weight]'");
    }
    if (!(ls >> w)) {
      w = 1.0;
      ls.clear();
    }
    std::string rest;
    if (ls >> rest) {
      throw ParseError("graph line " + std::to_string(line_no) + ": trailing tokens");
    }
    g.edges.push_back({static_cast<int>(u), static_cast<int>(v), w});
    g.num_vertices = std::max<int>(g.num_vertices, static_cast<int>(std::max(u, v)) + 1);
  }
  return g;
}

WeightedGraph load_graph(const std::filesystem::path& path) {
  return parse_graph(read_text_file(resolve_data_path(path)));
}

QaoaProblem qaoa_maxcut(const WeightedGraph& graph, int layers) {
  if (graph.edges.empty() || graph.num_vertices < 2) {
    throw EmptyGraph("MaxCut graph has no edges");
  }
  if (layers != 1) throw InvalidArity("only one-layer QAOA is supported");
  const int n = graph.num_vertices;
  ParamCircuit c(n, 2);
  PauliHamiltonian h(n);
  for (int q = 0; q < n; ++q) c.h(q);
  for (const auto& e : graph.edges) {
    c.cx(e.u, e.v);
    c.rotation(GateOp::RZ, e.v, 0, 2.0 * e.weight);
    c.cx(e.u, e.v);
    std::string zz(n, 'I');
    zz[e.u] = 'Z';
    zz[e.v] = 'Z';
    h.add(0.5 * e.weight, zz);
    h.add(-0.5 * e.weight, std::string(n, 'I'));
  }
  for (int q = 0; q < n; ++q) c.rotation(GateOp::RX, q, 1, 2.0);
  return {std::move(c), std::move(h)};
}

// ---------------------------------------------------------------------------
// Routing
// ---------------------------------------------------------------------------

namespace {

/// Lexicographically smallest shortest path from `from` to `to` inside `map`.
std::vector<PhysicalQubit> path_inside(const CircuitMap& map,
                                       const DeviceSnapshot& snapshot,
                                       PhysicalQubit from, PhysicalQubit to) {
  std::unordered_map<PhysicalQubit, int> dist;
  std::queue<PhysicalQubit> frontier;
  dist[to] = 0;
  frontier.push(to);
  while (!frontier.empty()) {
    auto q = frontier.front();
    frontier.pop();
    for (auto r : snapshot.neighbors(q)) {
      if (map.contains(r) && !dist.count(r)) {
        dist[r] = dist[q] + 1;
        frontier.push(r);
      }
    }
  }
  if (!dist.count(from)) return {};
  std::vector<PhysicalQubit> path{from};
  auto cur = from;
  while (cur != to) {
    for (auto r : snapshot.neighbors(cur)) {  // ascending
      auto it = dist.find(r);
      if (it != dist.end() && it->second == dist[cur] - 1) {
        cur = r;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

}  // namespace

RoutedCircuit route(const ParamCircuit& circuit, const CircuitMap& map,
                    const DeviceSnapshot& snapshot) {
  if (circuit.num_qubits() != map.size()) {
    throw LengthMismatch("circuit has " + std::to_string(circuit.num_qubits()) +
                         " qubits but map has " + std::to_string(map.size()));
  }
  for (auto p : map.physical_set()) snapshot.qubit(p);

  RoutedCircuit out;
  out.num_logical = circuit.num_qubits();
  out.num_params = circuit.num_params();
  out.map = map;
  std::vector<PhysicalQubit> layout(map.assignment().begin(), map.assignment().end());
  std::unordered_map<PhysicalQubit, int> occupant;
  for (int l = 0; l < map.size(); ++l) occupant[layout[l]] = l;

  for (const auto& g : circuit.gates()) {
    Gate pg = g;
    if (g.arity() == 1) {
      pg.qubits = {layout[g.qubits[0]], layout[g.qubits[0]]};
      out.gates.push_back(pg);
      continue;
    }
    PhysicalQubit a = layout[g.qubits[0]];
    PhysicalQubit b = layout[g.qubits[1]];
    if (!snapshot.has_edge(a, b)) {
      auto path = path_inside(map, snapshot, a, b);
      if (path.size() < 2) {
        throw UnroutableGate("no path between physical qubits " + std::to_string(a) +
                             " and " + std::to_string(b) + " inside the map");
      }
      for (std::size_t i = 0; i + 2 < path.size(); ++i) {
        PhysicalQubit x = path[i], y = path[i + 1];
        out.gates.push_back({GateOp::SWAP, {x, y}});
        ++out.inserted_swap_count;
        int lx = occupant[x], ly = occupant[y];
        std::swap(layout[lx], layout[ly]);
        occupant[x] = ly;
        occupant[y] = lx;
      }
      a = layout[g.qubits[0]];
    }
    pg.qubits = {a, b};
    out.gates.push_back(pg);
  }
  out.final_layout = std::move(layout);
  return out;
}

std::vector<Gate> lower_swaps(std::span<const Gate> gates) {
  std::vector<Gate> out;
  out.reserve(gates.size());
  for (const auto& g : gates) {
    if (g.op != GateOp::SWAP) {
      out.push_back(g);
      continue;
    }
    auto [a, b] = g.qubits;
    out.push_back({GateOp::CX, {a, b}});
    out.push_back({GateOp::CX, {b, a}});
    out.push_back({GateOp::CX, {a, b}});
  }
  return out;
}

std::vector<int> asap_layers(std::span<const Gate> gates, int* depth) {
  std::unordered_map<int, int> next_free;
  std::vector<int> layer(gates.size(), -1);
  int total = 0;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& g = gates[i];
    if (g.op == GateOp::MEASURE) continue;
    int l = 0;
    for (int k = 0; k < g.arity(); ++k) l = std::max(l, next_free[g.qubits[k]]);
    for (int k = 0; k < g.arity(); ++k) next_free[g.qubits[k]] = l + 1;
    layer[i] = l;
    total = std::max(total, l + 1);
  }
  if (depth) *depth = total;
  return layer;
}

}  // namespace nest
