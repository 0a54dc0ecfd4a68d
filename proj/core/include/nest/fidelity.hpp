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
#include <vector>

#include "nest/circuit_map.hpp"
#include "nest/circuits.hpp"
#include "nest/device.hpp"

namespace nest {

enum class GateKind { OneQubit, TwoQubit, Measure };

struct GateInstance {
  GateKind kind = GateKind::OneQubit;
  std::array<PhysicalQubit, 2> physical{0, 0};
  double success_prob = 1.0;
  double duration_us = 0.0;
};

/**
 * Map-conditioned inputs to the fidelity estimators.
 *
 * SWAPs are counted as three CX instances. Depth is the ASAP layer count
 * without measurements; avg_gate_time_us averages the non-measurement
 * instances. mean_t1_us / mean_t2_us are arithmetic means over the mapped
 * physical qubits.
 */
struct CircuitProfile {
  std::vector<GateInstance> gates;
  int depth = 0;
  double avg_gate_time_us = 0.0;
  int g1 = 0;
  int g2 = 0;
  int m = 0;
  double mu1_us = 0.0;
  double mu2_us = 0.0;
  double mean_t1_us = 0.0;
  double mean_t2_us = 0.0;
};

CircuitProfile profile_circuit(const RoutedCircuit& routed, const CircuitMap& map,
                               const DeviceSnapshot& snapshot);

/// Product of gate success probabilities times the T1/T2 decay over d * t_g.
double esp(const CircuitProfile& profile);

/// Device-uniform error rates; built from snapshot means by default.
struct QoncordParams {
  double c = 1.0;
  double sq_error = 0.0;       // gamma
  double tq_error = 0.0;       // beta
  double readout_error = 0.0;  // omega
  double t1_us = 0.0;
  double t2_us = 0.0;

  static QoncordParams from_snapshot(const DeviceSnapshot& snapshot, double c = 1.0);
};

double qoncord_fidelity(const CircuitProfile& profile, const QoncordParams& params);

/// esp(profile_circuit(route(circuit, map), map, snapshot)).
double map_esp(const ParamCircuit& circuit, const CircuitMap& map,
               const DeviceSnapshot& snapshot);

}  // namespace nest
