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

#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "nest/error.hpp"

namespace nest {

enum class Method { Cobyla, NelderMead };

struct Termination {
  enum class Kind { DefaultTol, SlidingWindow };
  Kind kind = Kind::DefaultTol;
  double tol = 1e-4;       // DefaultTol: final trust-region / simplex size
  int window = 100;        // SlidingWindow
  double min_rel = 0.04;   // SlidingWindow

  static Termination default_tol(double t) { return {Kind::DefaultTol, t, 100, 0.04}; }
  static Termination sliding_window(int w, double r) { return {Kind::SlidingWindow, 1e-4, w, r}; }
};

inline constexpr double kDefaultTol = 1e-4;
inline constexpr int kDefaultMaxEvals = 1000;

struct OptimizerConfig {
  Method method = Method::Cobyla;
  double initial_step = 1.0;
  int max_evals = kDefaultMaxEvals;
  Termination termination = Termination::default_tol(kDefaultTol);
  /// Trust-region floor when termination is a sliding window.
  double min_step = kDefaultTol;
  /// Evaluation counts (ascending) at which the method drops its model and
  /// starts afresh from the best point seen, at `initial_step`.
  std::vector<int> restart_at;

  void validate() const;
};

enum class StopReason { Tolerance, Window, Budget, Objective };
std::string_view stop_reason_name(StopReason r);

struct OptEval {
  std::vector<double> params;
  double value = 0.0;
};

struct OptTrace {
  std::vector<OptEval> evals;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> best_params;
  StopReason terminated_by = StopReason::Budget;
  /// Trust-region radius (COBYLA) or simplex size (Nelder-Mead) at exit.
  double final_step = 0.0;

  int iteration_count() const { return static_cast<int>(evals.size()); }
  void record(std::span<const double> x, double value);
};

/// ObjectiveFailure carrying what was evaluated before the objective threw.
class FailedOptimization : public ObjectiveFailure {
 public:
  FailedOptimization(const std::string& what, OptTrace partial, std::exception_ptr cause)
      : ObjectiveFailure(what), trace(std::move(partial)), cause(std::move(cause)) {}
  OptTrace trace;
  std::exception_ptr cause;
};

using Objective = std::function<double(std::span<const double>)>;

/**
 * Sliding-window rule: stop once at least window+1 values exist and the best
 * value improved by less than min_rel * |best of the first len-window
 * evaluations| (or not at all) over the last `window`. DefaultTol: stop once
 * `step` is below tol.
 */
bool should_stop(const OptTrace& trace, const Termination& rule,
                 double step = std::numeric_limits<double>::infinity());

/**
 * Derivative-free minimization; one objective call is one iteration.
 * Both methods are deterministic, so `seed` only tags the trace for callers
 * that need it. Exceptions thrown by the objective propagate as
 * ObjectiveFailure carrying the partial trace.
 */
OptTrace minimize(const Objective& objective, std::vector<double> x0,
                  const OptimizerConfig& cfg, std::uint64_t seed = 0);

}  // namespace nest
