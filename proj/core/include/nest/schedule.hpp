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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nest {

enum class ScheduleKind { Flat, StepUp, Linear, VShape, ReLU, InvertedReLU };

inline constexpr ScheduleKind kAllScheduleKinds[] = {
    ScheduleKind::Flat,   ScheduleKind::StepUp, ScheduleKind::Linear,
    ScheduleKind::VShape, ScheduleKind::ReLU,   ScheduleKind::InvertedReLU};

std::string_view schedule_name(ScheduleKind kind);
/// Case-insensitive; accepts "inverted_relu", "InvertedReLU", "v_shape", ...
std::optional<ScheduleKind> parse_schedule_kind(std::string_view name);

/**
 * Continuous ESP schedule sigma_t over t in [0, T].
 *
 * `reversed` evaluates the curve at T - t, which gives the decreasing
 * (high to low) variants used only for experiments.
 */
struct EspSchedule {
  ScheduleKind kind = ScheduleKind::InvertedReLU;
  double sigma_min = 0.0;
  double sigma_max = 1.0;
  int total_iters = 432;
  double alpha = 0.5;
  double beta = 1.0 / 3.0;
  double gamma = 0.5;
  bool reversed = false;

  /// Throws InvalidSpec when bounds or fractions are out of their domains.
  void validate() const;
};

double sigma_at(const EspSchedule& schedule, int t);
/// Continuous-time evaluation; same formulas, t real.
double sigma_at(const EspSchedule& schedule, double t);

struct CyclePlan {
  int cycles = 0;
  int iters_per_cycle = 0;
  std::vector<double> targets;
  ScheduleKind kind = ScheduleKind::InvertedReLU;

  int total_iters() const { return cycles * iters_per_cycle; }
};

inline constexpr int kDefaultCycles = 6;
inline constexpr int kDefaultItersPerCycle = 72;

/// Samples the schedule at t = c * I. The schedule's T is replaced by C * I.
CyclePlan discretize(EspSchedule schedule, int cycles, int iters_per_cycle);

/// (min, max) over the given ESP values.
std::pair<double, double> default_sigma_bounds(std::span<const double> esps);

}  // namespace nest
