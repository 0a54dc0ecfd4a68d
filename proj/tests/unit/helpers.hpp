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

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "nest/device.hpp"
#include "nest/paths.hpp"

namespace nest::test {

inline DeviceSnapshot line5() { return load_snapshot(resolve_data_path("fixtures/line5.json")); }

/// Homogeneous device on any topology; every probability and time collapsed.
inline DeviceSnapshot homogeneous(Topology t, std::uint64_t seed = 1) {
  SyntheticDeviceSpec s;
  s.name = "homog";
  s.topology = t;
  s.noise.seed = seed;
  s.noise.sq_error = {1e-3, 1e-3};
  s.noise.tq_error = {1e-2, 1e-2};
  s.noise.readout = {2e-2, 2e-2};
  s.noise.t1_us = {100.0, 100.0};
  s.noise.t2_us = {80.0, 80.0};
  s.noise.sq_duration_us = {0.05, 0.05};
  s.noise.tq_duration_us = {0.3, 0.3};
  return synthesize_device(s);
}

inline DeviceSnapshot synthetic(Topology t, std::uint64_t seed, double corr = 0.5) {
  SyntheticDeviceSpec s;
  s.name = "synth" + std::to_string(seed);
  s.topology = t;
  s.noise.seed = seed;
  s.noise.spatial_correlation = corr;
  return synthesize_device(s);
}

inline bool rel_close(double a, double b, double rel = 1e-10) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() /
           ("nest_test_" + tag + "_" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace nest::test
