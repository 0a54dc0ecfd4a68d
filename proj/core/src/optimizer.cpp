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

#include "nest/optimizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nest {

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Tolerance: return "tolerance";
    case StopReason::Window: return "window";
    case StopReason::Budget: return "budget";
    case StopReason::Objective: return "objective";
  }
  return "?";
}

void OptimizerConfig::validate() const {
  if (!(initial_step > 0.0)) throw InvalidSpec("initial_step must be positive");
  if (max_evals < 1) throw InvalidSpec("max_evals must be at least 1");
  if (termination.kind == Termination::Kind::SlidingWindow) {
    if (termination.window < 1) throw InvalidSpec("window must be at least 1");
    if (!(termination.min_rel > 0.0 && termination.min_rel < 1.0)) {
      throw InvalidSpec("min_rel_improvement must lie in (0,1)");
    }
  } else if (!(termination.tol > 0.0)) {
    throw InvalidSpec("tolerance must be positive");
  }
  if (!(min_step > 0.0)) throw InvalidSpec("min_step must be positive");
  for (std::size_t i = 1; i < restart_at.size(); ++i) {
    if (restart_at[i] <= restart_at[i - 1]) throw InvalidSpec("restart_at must be increasing");
  }
}

void OptTrace::record(std::span<const double> x, double value) {
  evals.push_back({{x.begin(), x.end()}, value});
  if (best_params.empty() || value < best_value) {
    best_value = value;
    best_params.assign(x.begin(), x.end());
  }
}

bool should_stop(const OptTrace& trace, const Termination& rule, double step) {
  if (rule.kind == Termination::Kind::DefaultTol) return step < rule.tol;
  const int len = trace.iteration_count();
  if (len < rule.window + 1) return false;
  double ref = std::numeric_limits<double>::infinity();
  for (int i = 0; i < len - rule.window; ++i) ref = std::min(ref, trace.evals[i].value);
  const double improvement = ref - trace.best_value;
  return improvement <= 0.0 || improvement < rule.min_rel * std::abs(ref);
}

namespace {

// Thrown internally to unwind out of the method once a rule fires.
struct Stop {
  StopReason reason;
};

// Thrown when the evaluation count reaches a configured restart point.
struct Restart {};

class Driver {
 public:
  Driver(const Objective& f, const OptimizerConfig& cfg) : f_(f), cfg_(cfg) {}

  double eval(const Eigen::VectorXd& x) {
    const int done = trace_.iteration_count();
    while (next_restart_ < cfg_.restart_at.size() && cfg_.restart_at[next_restart_] < done) {
      ++next_restart_;
    }
    if (next_restart_ < cfg_.restart_at.size() && cfg_.restart_at[next_restart_] == done &&
        done > 0) {
      ++next_restart_;
      throw Restart{};
    }
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    double v;
    try {
      v = f_(xs);
    } catch (...) {
      throw FailedOptimization("objective failed at evaluation " +
                                   std::to_string(trace_.iteration_count() + 1),
                               trace_, std::current_exception());
    }
    if (!std::isfinite(v)) {
      trace_.terminated_by = StopReason::Objective;
      throw FailedOptimization("objective returned a non-finite value", trace_, nullptr);
    }
    trace_.record(xs, v);
    if (cfg_.termination.kind == Termination::Kind::SlidingWindow &&
        should_stop(trace_, cfg_.termination)) {
      throw Stop{StopReason::Window};
    }
    if (trace_.iteration_count() >= cfg_.max_evals) throw Stop{StopReason::Budget};
    return v;
  }

  OptTrace& trace() { return trace_; }

 private:
  const Objective& f_;
  const OptimizerConfig& cfg_;
  OptTrace trace_;
  std::size_t next_restart_ = 0;
};

double floor_step(const OptimizerConfig& cfg) {
  return cfg.termination.kind == Termination::Kind::DefaultTol ? cfg.termination.tol
                                                               : cfg.min_step;
}

/**
 * Linear-approximation trust region following the control flow of Powell's
 * COBYLA, specialised to the unconstrained case. The simplex is the base x0
 * (lowest value) plus displacements sim.row(j); the linear model's gradient
 * comes from the inverse of the displacement matrix. Trust-region steps go
 * a full radius rho along -g. Poor simplex geometry is repaired only after a
 * step fails, so successful steps are never delayed by maintenance.
 */
void cobyla(Driver& d, Eigen::VectorXd x0, const OptimizerConfig& cfg, double* rho_out) {
  const int n = static_cast<int>(x0.size());
  const double rhoend = std::min(floor_step(cfg), cfg.initial_step);
  const double alpha = 0.25, beta = 2.1, gamma = 0.5, delta = 1.1;
  double rho = cfg.initial_step;
  *rho_out = rho;

  Eigen::MatrixXd sim = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd fval(n);
  double f0 = d.eval(x0);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd x = x0;
    x(j) += rho;
    const double fj = d.eval(x);
    if (fj < f0) {
      // The new point becomes the base; earlier vertices shift by -rho e_j.
      for (int k = 0; k < j; ++k) sim(k, j) = -rho;
      sim.row(j).setZero();
      sim(j, j) = -rho;
      fval(j) = f0;
      f0 = fj;
      x0 = x;
    } else {
      sim(j, j) = rho;
      fval(j) = fj;
    }
  }

  bool after_step = false;  // Powell's IBRNCH: last action was a trust-region step
  for (;;) {
    *rho_out = rho;
    int jmin = -1;
    double fmin = f0;
    for (int j = 0; j < n; ++j) {
      if (fval(j) < fmin) {
        fmin = fval(j);
        jmin = j;
      }
    }
    if (jmin >= 0) {
      const Eigen::RowVectorXd shift = sim.row(jmin);
      x0 += shift.transpose();
      std::swap(f0, fval(jmin));
      for (int j = 0; j < n; ++j) {
        if (j == jmin) sim.row(j) = -shift;
        else sim.row(j) -= shift;
      }
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(sim);
    if (!lu.isInvertible()) {
      // Degenerate simplex: rebuild around the base at the current radius.
      sim = Eigen::MatrixXd::Identity(n, n) * rho;
      for (int j = 0; j < n; ++j) fval(j) = d.eval(x0 + sim.row(j).transpose());
      after_step = false;
      continue;
    }
    const Eigen::MatrixXd simi = lu.inverse();  // column j is the dual of vertex j
    const Eigen::VectorXd g = simi * (fval.array() - f0).matrix();

    const double parsig = alpha * rho, pareta = beta * rho;
    Eigen::VectorXd vsig(n), veta(n);
    bool acceptable = true;
    for (int j = 0; j < n; ++j) {
      vsig(j) = 1.0 / simi.col(j).norm();
      veta(j) = sim.row(j).norm();
      if (vsig(j) < parsig || veta(j) > pareta) acceptable = false;
    }

    if (!after_step && !acceptable) {
      int jdrop = -1;
      double worst = pareta;
      for (int j = 0; j < n; ++j) {
        if (veta(j) > worst) {
          worst = veta(j);
          jdrop = j;
        }
      }
      if (jdrop < 0) {
        worst = parsig;
        for (int j = 0; j < n; ++j) {
          if (vsig(j) < worst) {
            worst = vsig(j);
            jdrop = j;
          }
        }
      }
      Eigen::VectorXd dx = simi.col(jdrop) * (gamma * rho * vsig(jdrop));
      if (g.dot(dx) > 0.0) dx = -dx;  // prefer the side where the model decreases
      sim.row(jdrop) = dx.transpose();
      fval(jdrop) = d.eval(x0 + dx);
      continue;
    }

    after_step = true;
    bool reduce = true;
    const double gnorm = g.norm();
    if (gnorm > 0.0) {
      const Eigen::VectorXd dx = -rho / gnorm * g;
      const double prerem = rho * gnorm;
      const double fnew = d.eval(x0 + dx);
      const double trured = f0 - fnew;

      // Vertex to drop: largest barycentric weight of the new point, unless a
      // vertex sits too far away and can be dropped without collapsing the simplex.
      const Eigen::VectorXd lambda = simi.transpose() * dx;
      double thresh = trured <= 0.0 ? 1.0 : 0.0;
      int jdrop = -1;
      Eigen::VectorXd sigbar(n);
      for (int j = 0; j < n; ++j) {
        const double w = std::abs(lambda(j));
        if (w > thresh) {
          thresh = w;
          jdrop = j;
        }
        sigbar(j) = w * vsig(j);
      }
      double edgmax = delta * rho;
      int far = -1;
      for (int j = 0; j < n; ++j) {
        if (sigbar(j) >= parsig || sigbar(j) >= vsig(j)) {
          const double len =
              trured > 0.0 ? (dx - sim.row(j).transpose()).norm() : veta(j);
          if (len > edgmax) {
            edgmax = len;
            far = j;
          }
        }
      }
      if (far >= 0) jdrop = far;
      if (jdrop >= 0) {
        sim.row(jdrop) = dx.transpose();
        fval(jdrop) = fnew;
      }
      reduce = !(trured > 0.0 && trured >= 0.1 * prerem);
    }
    if (!reduce) continue;
    if (!acceptable) {
      after_step = false;
      continue;
    }
    if (rho > rhoend) {
      rho *= 0.5;
      if (rho <= 1.5 * rhoend) rho = rhoend;
      continue;
    }
    if (cfg.termination.kind == Termination::Kind::DefaultTol) throw Stop{StopReason::Tolerance};
    // Windowed runs keep going at the floor; refresh the longest edge so the
    // loop always spends an evaluation.
    int jfar = 0;
    for (int j = 1; j < n; ++j) if (veta(j) > veta(jfar)) jfar = j;
    Eigen::VectorXd dx = simi.col(jfar) * (gamma * rho * vsig(jfar));
    if (g.dot(dx) > 0.0) dx = -dx;
    sim.row(jfar) = dx.transpose();
    fval(jfar) = d.eval(x0 + dx);
    after_step = false;
  }
}

void nelder_mead(Driver& d, const Eigen::VectorXd& x0, const OptimizerConfig& cfg,
                 double* size_out) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> x(n + 1, x0);
  std::vector<double> f(n + 1);
  f[0] = d.eval(x0);
  for (int j = 0; j < n; ++j) {
    x[j + 1](j) += cfg.initial_step;
    f[j + 1] = d.eval(x[j + 1]);
  }
  const double tol = floor_step(cfg);
  std::vector<int> idx(n + 1);
  for (;;) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
    const int lo = idx[0], hi = idx[n], nh = idx[n - 1];
    double size = 0.0;
    for (int j = 0; j <= n; ++j) size = std::max(size, (x[j] - x[lo]).norm());
    *size_out = size;
    if (size < tol) {
      if (cfg.termination.kind == Termination::Kind::DefaultTol) throw Stop{StopReason::Tolerance};
      // Re-expand around the best point so the window rule can keep going.
      for (int j = 0; j <= n; ++j) {
        if (j == lo) continue;
        x[j] = x[lo];
        x[j](j < lo ? j : j - 1) += tol * 10.0;
        f[j] = d.eval(x[j]);
      }
      continue;
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (int j = 0; j <= n; ++j) {
      if (j != hi) c += x[j];
    }
    c /= n;
    const Eigen::VectorXd xr = c + (c - x[hi]);
    const double fr = d.eval(xr);
    if (fr < f[lo]) {
      const Eigen::VectorXd xe = c + 2.0 * (c - x[hi]);
      const double fe = d.eval(xe);
      if (fe < fr) {
        x[hi] = xe;
        f[hi] = fe;
      } else {
        x[hi] = xr;
        f[hi] = fr;
      }
    } else if (fr < f[nh]) {
      x[hi] = xr;
      f[hi] = fr;
    } else {
      const bool outside = fr < f[hi];
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(c + 0.5 * (xr - c))
                                         : Eigen::VectorXd(c + 0.5 * (x[hi] - c));
      const double fc = d.eval(xc);
      if (fc < (outside ? fr : f[hi])) {
        x[hi] = xc;
        f[hi] = fc;
      } else {
        for (int j = 0; j <= n; ++j) {
          if (j == lo) continue;
          x[j] = x[lo] + 0.5 * (x[j] - x[lo]);
          f[j] = d.eval(x[j]);
        }
      }
    }
  }
}

}  // namespace

OptTrace minimize(const Objective& objective, std::vector<double> x0,
                  const OptimizerConfig& cfg, std::uint64_t /*seed*/) {
  cfg.validate();
  Driver d(objective, cfg);
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
  double step = cfg.initial_step;
  try {
    if (x0.empty()) {
      d.eval(x);
      throw Stop{StopReason::Tolerance};
    }
    for (;;) {
      try {
        if (cfg.method == Method::Cobyla) cobyla(d, x, cfg, &step);
        else nelder_mead(d, x, cfg, &step);
      } catch (const Restart&) {
        const auto& best = d.trace().best_params;
        x = Eigen::Map<const Eigen::VectorXd>(best.data(), static_cast<Eigen::Index>(best.size()));
        continue;
      }
    }
  } catch (const Stop& s) {
    d.trace().terminated_by = s.reason;
  }
  d.trace().final_step = step;
  return std::move(d.trace());
}

}  // namespace nest
