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

#include "nest/fidelity.hpp"

#include <cmath>

#include "nest/error.hpp"

namespace nest {

CircuitProfile profile_circuit(const RoutedCircuit& routed, const CircuitMap& map,
                               const DeviceSnapshot& snapshot) {
  CircuitProfile prof;
  const auto gates = lower_swaps(routed.gates);
  asap_layers(gates, &prof.depth);

  double total_time = 0.0, time1 = 0.0, time2 = 0.0;
  int timed = 0;
  for (const auto& g : gates) {
    for (int k = 0; k < g.arity(); ++k) {
      if (!map.contains(g.qubits[k])) {
        throw UnmappedQubit("physical qubit " + std::to_string(g.qubits[k]) +
                            " is not part of the map");
      }
    }
    GateInstance inst;
    inst.physical = g.qubits;
    if (g.op == GateOp::MEASURE) {
      inst.kind = GateKind::Measure;
      inst.success_prob = 1.0 - snapshot.qubit(g.qubits[0]).readout_error;
      ++prof.m;
    } else if (g.arity() == 1) {
      const auto& q = snapshot.qubit(g.qubits[0]);
      inst.kind = GateKind::OneQubit;
      inst.success_prob = 1.0 - q.sq_error;
      inst.duration_us = q.sq_duration_us;
      ++prof.g1;
      time1 += inst.duration_us;
    } else {
      const EdgeProps* e = snapshot.find_edge(g.qubits[0], g.qubits[1]);
      if (e == nullptr) {
        throw MissingEdgeProps("no coupling edge (" + std::to_string(g.qubits[0]) +
                               "," + std::to_string(g.qubits[1]) + ")");
      }
      inst.kind = GateKind::TwoQubit;
      inst.success_prob = 1.0 - e->tq_error;
      inst.duration_us = e->tq_duration_us;
      ++prof.g2;
      time2 += inst.duration_us;
    }
    if (inst.kind != GateKind::Measure) {
      total_time += inst.duration_us;
      ++timed;
    }
    prof.gates.push_back(inst);
  }
  prof.avg_gate_time_us = timed ? total_time / timed : 0.0;
  prof.mu1_us = prof.g1 ? time1 / prof.g1 : 0.0;
  prof.mu2_us = prof.g2 ? time2 / prof.g2 : 0.0;

  double t1 = 0.0, t2 = 0.0;
  for (auto p : map.physical_set()) {
    t1 += snapshot.qubit(p).t1_us;
    t2 += snapshot.qubit(p).t2_us;
  }
  prof.mean_t1_us = t1 / map.size();
  prof.mean_t2_us = t2 / map.size();
  return prof;
}

double esp(const CircuitProfile& profile) {
  if (!(profile.mean_t1_us > 0.0) || !(profile.mean_t2_us > 0.0)) {
    throw DomainError("ESP needs positive T1 and T2");
  }
  double value = 1.0;
  for (const auto& g : profile.gates) value *= g.success_prob;
  const double exposure = profile.depth * profile.avg_gate_time_us;
  value *= std::exp(-exposure / profile.mean_t1_us);
  value *= std::exp(-exposure / profile.mean_t2_us);
  return value;
}

QoncordParams QoncordParams::from_snapshot(const DeviceSnapshot& s, double c) {
  QoncordParams p;
  p.c = c;
  for (const auto& q : s.qubits()) {
    p.sq_error += q.sq_error;
    p.readout_error += q.readout_error;
    p.t1_us += q.t1_us;
    p.t2_us += q.t2_us;
  }
  const double nq = s.num_qubits();
  p.sq_error /= nq;
  p.readout_error /= nq;
  p.t1_us /= nq;
  p.t2_us /= nq;
  for (const auto& e : s.edge_props()) p.tq_error += e.tq_error;
  if (!s.edge_props().empty()) p.tq_error /= static_cast<double>(s.edge_props().size());
  return p;
}

double qoncord_fidelity(const CircuitProfile& profile, const QoncordParams& p) {
  auto is_prob = [](double x) { return x >= 0.0 && x < 1.0; };
  if (!is_prob(p.sq_error) || !is_prob(p.tq_error) || !is_prob(p.readout_error)) {
    throw DomainError("Qoncord error rates must lie in [0,1)");
  }
  if (!(p.t1_us > 0.0) || !(p.t2_us > 0.0)) {
    throw DomainError("Qoncord estimator needs positive T1 and T2");
  }
  const double busy = (profile.mu1_us * profile.g1 + profile.mu2_us * profile.g2) / 2.0;
  const double decay = std::exp(-(p.c * profile.depth * busy) / (p.t1_us * p.t2_us));
  return decay * std::pow(1.0 - p.sq_error, profile.g1) *
         std::pow(1.0 - p.tq_error, profile.g2) *
         std::pow(1.0 - p.readout_error, profile.m);
}

double map_esp(const ParamCircuit& circuit, const CircuitMap& map,
               const DeviceSnapshot& snapshot) {
  return esp(profile_circuit(route(circuit, map, snapshot), map, snapshot));
}

}  // namespace nest
