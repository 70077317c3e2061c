#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <utility>

#include "ucgs/core.hpp"
#include "ucgs/inner.hpp"
#include "ucgs/problem.hpp"
#include "ucgs/trace.hpp"

namespace ucgs {

/// Parameter regime for the generalized universal gradient outer loop with
/// gamma_k = 2/(k+1).
///
///   cg:       beta_k = 0, eta_k = 0; the subproblem degenerates to one exact
///             LMO step per outer iteration.
///   cg_equiv: beta_k = M nu-scaled, eta_k = 6 beta_k D^2; the inner loop
///             certifies after a single Frank-Wolfe step, reproducing CG.
///   sliding:  beta_k = M k^((1-3nu)/2) / D^(1-nu), eta_k = 6 beta_k D^2 / k;
///             at most k+1 inner LMO calls at outer step k.
struct GugSchedule {
  enum class Regime { cg, cg_equiv, sliding };

  static GugSchedule cg() { return {Regime::cg, 1.0, 0.0}; }

  static GugSchedule cg_equiv(double nu, double M) {
    require(nu > 0.0 && nu <= 1.0, "cg_equiv: nu must lie in (0,1]");
    require(M > 0.0, "cg_equiv: M must be positive");
    return {Regime::cg_equiv, nu, M};
  }

  static GugSchedule sliding(double nu, double M) {
    require(nu > 0.0 && nu < 1.0, "sliding: nu must lie in (0,1)");
    require(M > 0.0, "sliding: M must be positive");
    return {Regime::sliding, nu, M};
  }

  double gamma(std::int64_t k) const { return 2.0 / (static_cast<double>(k) + 1.0); }

  double beta(std::int64_t k, double diameter) const {
    switch (regime) {
      case Regime::cg:
        return 0.0;
      case Regime::cg_equiv:
        return M * std::pow(gamma(k), nu) / std::pow(diameter, 1.0 - nu);
      case Regime::sliding:
        return M * std::pow(static_cast<double>(k), (1.0 - 3.0 * nu) / 2.0) /
               std::pow(diameter, 1.0 - nu);
    }
    return 0.0;
  }

  double eta(std::int64_t k, double diameter) const {
    const double d2 = diameter * diameter;
    switch (regime) {
      case Regime::cg:
        return 0.0;
      case Regime::cg_equiv:
        return 6.0 * beta(k, diameter) * d2;
      case Regime::sliding:
        return 6.0 * beta(k, diameter) * d2 / static_cast<double>(k);
    }
    return 0.0;
  }

  Regime regime = Regime::cg;
  double nu = 1.0;
  double M = 0.0;
};

/// Young-inequality residual term
///   (1-nu)/(2(1+nu)) * M^(2/(1-nu)) * (gamma/beta)^((1+nu)/(1-nu)),
/// defined for nu in (0,1) and beta > 0.
inline double xi_term(double nu, double M, double beta, double gamma) {
  require(nu > 0.0 && nu < 1.0, "xi_term: nu must lie in (0,1)");
  require(beta > 0.0, "xi_term: beta must be positive");
  require(gamma >= 0.0, "xi_term: gamma must be nonnegative");
  return (1.0 - nu) / (2.0 * (1.0 + nu)) * std::pow(M, 2.0 / (1.0 - nu)) *
         std::pow(gamma / beta, (1.0 + nu) / (1.0 - nu));
}

/// Exponent-scaled oracle-count targets for the sliding regime:
/// ((M D^(1+nu))/eps)^(2/(1+3nu)) gradient evaluations and its square for
/// LMO calls, constants absorbed.
inline std::pair<double, double> sliding_nominal_counts(double nu, double M, double diameter,
                                                        double eps) {
  require(nu > 0.0 && nu < 1.0, "sliding_nominal_counts: nu must lie in (0,1)");
  require(M > 0.0 && diameter > 0.0 && eps > 0.0,
          "sliding_nominal_counts: M, diameter, eps must be positive");
  const double base = M * std::pow(diameter, 1.0 + nu) / eps;
  const double grad = std::pow(base, 2.0 / (1.0 + 3.0 * nu));
  return {grad, grad * grad};
}

/// Per-step view passed to the optional observer, valid only during the call.
struct GugStepView {
  std::int64_t k;
  double gamma;
  double beta;
  double eta;
  const Vector& z;
  const Vector& x_prev;
  const Vector& x;
  const Vector& y_prev;
  const Vector& y;
  const InnerResult* inner;  // null in the cg regime
};

using GugObserver = std::function<void(const GugStepView&)>;

struct GugRunOptions {
  std::int64_t N = 1000;
  bool timing = false;
  // Fault-injection knob for the certification harness: scales the eta handed
  // to the inner solver while the certified iteration budget stays nominal.
  double inject_eta_scale = 1.0;
  // Optional early stop, evaluated on every produced trace row.
  std::function<bool(const TraceRow&)> stop;
  // When false, rows are streamed to `stop` but not retained (long budget runs).
  bool keep_trace = true;
};

/// Runs N outer iterations:
///   z_k = (1-gamma_k) y_{k-1} + gamma_k x_{k-1}
///   x_k ~ argmin <grad f(z_k), u> + (beta_k/2)||u - x_{k-1}||^2   (CGM, open-loop steps)
///   y_k = (1-gamma_k) y_{k-1} + gamma_k x_k
/// starting from x_0 = y_0 = problem.x0.
inline RunTrace gug_run(const ProblemInstance& problem, const GugSchedule& schedule,
                        const GugRunOptions& opts, const GugObserver& observer = {}) {
  require(opts.N >= 1, "gug_run: N must be >= 1");
  require(opts.inject_eta_scale > 0.0, "gug_run: inject_eta_scale must be positive");
  OracleCounters counters;
  CountedObjective f(problem.objective, counters);
  const FeasibleSet& set = problem.set;
  const double diameter = set.diameter();

  Vector x = problem.x0;
  Vector y = problem.x0;
  RunTrace trace;
  if (opts.keep_trace) trace.rows.reserve(static_cast<size_t>(std::min<std::int64_t>(opts.N, 65536)));
  const auto t0 = std::chrono::steady_clock::now();

  for (std::int64_t k = 1; k <= opts.N; ++k) {
    const double gamma = schedule.gamma(k);
    const double beta = schedule.beta(k, diameter);
    const double eta = schedule.eta(k, diameter);
    const Vector z = convex_combine(y, x, gamma);
    const Vector gz = f.grad(z);

    Vector x_new;
    InnerResult inner;
    bool has_inner = false;
    if (schedule.regime == GugSchedule::Regime::cg) {
      x_new = set.lmo(gz, &counters);
      inner.iterations = 1;
      inner.lmo_calls_used = 1;
    } else {
      const std::int64_t t_bound = inner_iteration_bound(beta, diameter, eta, 0.0);
      ProjSubproblem sub{gz, beta, x, &set, eta * opts.inject_eta_scale, 0.0};
      inner = cgm_solve(sub, x, AlphaRule::open_loop_2_over_t1, &counters, nullptr, 0, t_bound);
      x_new = inner.u_plus;
      has_inner = true;
    }
    const Vector y_new = convex_combine(y, x_new, gamma);
    const double f_y = f.value(y_new);

    if (observer) {
      GugStepView view{k, gamma, beta, eta, z, x, x_new, y, y_new, has_inner ? &inner : nullptr};
      observer(view);
    }

    TraceRow row;
    row.k = k;
    row.f_y = f_y;
    if (problem.fstar) row.true_gap = f_y - *problem.fstar;
    row.gamma = gamma;
    row.beta = beta;
    row.eta = eta;
    row.inner_iters = inner.iterations;
    row.lmo_calls_cum = counters.lmo_calls;
    row.grad_evals_cum = counters.grad_evals;
    row.grad_evals_with_retries_cum = f.raw_grad_requests();
    if (opts.timing) {
      row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    }
    if (opts.keep_trace) trace.rows.push_back(row);

    x = std::move(x_new);
    y = y_new;
    if (opts.stop && opts.stop(row)) break;
  }
  return trace;
}

}  // namespace ucgs
