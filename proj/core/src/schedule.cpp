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

#include "nest/schedule.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "nest/error.hpp"

namespace nest {

std::string_view schedule_name(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Flat: return "flat";
    case ScheduleKind::StepUp: return "step_up";
    case ScheduleKind::Linear: return "linear";
    case ScheduleKind::VShape: return "v_shape";
    case ScheduleKind::ReLU: return "relu";
    case ScheduleKind::InvertedReLU: return "inverted_relu";
  }
  return "?";
}

std::optional<ScheduleKind> parse_schedule_kind(std::string_view name) {
  std::string key;
  for (char ch : name) {
    if (ch == '_' || ch == '-' || ch == ' ') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  for (auto k : kAllScheduleKinds) {
    std::string canon;
    for (char ch : schedule_name(k)) {
      if (ch != '_') canon.push_back(ch);
    }
    if (canon == key) return k;
  }
  return std::nullopt;
}

void EspSchedule::validate() const {
  if (!(sigma_min > 0.0) || !(sigma_min <= sigma_max) || !(sigma_max <= 1.0)) {
    throw InvalidSpec("schedule needs 0 < sigma_min <= sigma_max <= 1");
  }
  if (total_iters < 1) throw InvalidSpec("schedule needs T >= 1");
  auto frac = [](double f) { return f > 0.0 && f < 1.0; };
  if (!frac(alpha) || !frac(beta) || !frac(gamma)) {
    throw InvalidSpec("schedule fractions must lie in (0,1)");
  }
}

double sigma_at(const EspSchedule& s, double t) {
  const double T = s.total_iters;
  if (!(t >= 0.0) || t > T) {
    throw OutOfRange("iteration " + std::to_string(t) + " outside [0, " +
                     std::to_string(s.total_iters) + "]");
  }
  if (s.reversed) t = T - t;
  const double lo = s.sigma_min, hi = s.sigma_max, span = hi - lo;
  const double x = t / T;
  double v = hi;
  switch (s.kind) {
    case ScheduleKind::Flat:
      v = hi;
      break;
    case ScheduleKind::StepUp:
      v = x < s.alpha ? lo : hi;
      break;
    case ScheduleKind::Linear:
      v = lo + x * span;
      break;
    case ScheduleKind::VShape:
      v = x < 0.5 ? hi - 2.0 * x * span : lo + 2.0 * (t - T / 2.0) / T * span;
      break;
    case ScheduleKind::ReLU:
      v = x < s.beta ? lo : lo + (t - s.beta * T) / ((1.0 - s.beta) * T) * span;
      break;
    case ScheduleKind::InvertedReLU:
      v = x < s.gamma ? lo + t / (s.gamma * T) * span : hi;
      break;
  }
  // Guard against rounding just outside the bounds.
  return std::clamp(v, lo, hi);
}

double sigma_at(const EspSchedule& s, int t) { return sigma_at(s, static_cast<double>(t)); }

CyclePlan discretize(EspSchedule schedule, int cycles, int iters_per_cycle) {
  if (cycles < 1 || iters_per_cycle < 1) {
    throw InvalidShape("cycle plan needs C >= 1 and I >= 1");
  }
  schedule.total_iters = cycles * iters_per_cycle;
  schedule.validate();
  CyclePlan plan;
  plan.cycles = cycles;
  plan.iters_per_cycle = iters_per_cycle;
  plan.kind = schedule.kind;
  plan.targets.reserve(cycles);
  for (int c = 0; c < cycles; ++c) {
    plan.targets.push_back(sigma_at(schedule, c * iters_per_cycle));
  }
  return plan;
}

std::pair<double, double> default_sigma_bounds(std::span<const double> esps) {
  if (esps.empty()) throw EmptyCandidates("no candidate ESPs");
  auto [mn, mx] = std::minmax_element(esps.begin(), esps.end());
  return {*mn, *mx};
}

}  // namespace nest
