#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>

#include "ucgs/core.hpp"
#include "ucgs/sets.hpp"

namespace ucgs {

/// Quadratic projection-type subproblem
///   phi(u) = <g, u> + (beta/2) ||u - anchor||^2
/// to be minimized approximately over `set` by Frank-Wolfe steps, terminating
/// once a Wolfe-gap certificate reaches `eta`. `sigma` scales the inexact-LMO
/// budget delta_t = sigma*beta*D^2/t used by the ACGM variant.
struct ProjSubproblem {
  Vector g;
  double beta = 0.0;
  Vector anchor;
  const FeasibleSet* set = nullptr;
  double eta = 0.0;
  double sigma = 0.0;
};

inline double phi_value(const ProjSubproblem& sub, const Vector& u) {
  return sub.g.dot(u) + 0.5 * sub.beta * (u - sub.anchor).squaredNorm();
}

inline Vector phi_grad(const ProjSubproblem& sub, const Vector& u) {
  require(u.size() == sub.g.size(), "phi_grad: dimension mismatch");
  return sub.g + sub.beta * (u - sub.anchor);
}

/// Minimizer of phi over the segment [u, v]:
///   alpha* = clamp(<-grad phi(u), v-u> / (beta ||v-u||^2), 0, 1).
/// Since phi is quadratic this is the exact linesearch; for beta = 0 the
/// segment restriction is linear and the step saturates at 0 or 1.
inline double exact_linesearch_alpha(const Vector& u, const Vector& v, const ProjSubproblem& sub) {
  const Vector d = v - u;
  const double dn2 = d.squaredNorm();
  if (dn2 == 0.0) return 0.0;
  const double descent = -phi_grad(sub, u).dot(d);
  if (descent <= 0.0) return 0.0;
  const double curv = sub.beta * dn2;
  if (curv <= 0.0 || descent >= curv) return 1.0;
  return descent / curv;
}

/// Step-size rule for the CGM procedure. Rules with alpha_1 = 1 take the
/// first Frank-Wolfe step unconditionally; their termination certificate is
/// evaluated from the second entry on. This is what collapses the procedure
/// to a single LMO step whenever eta >= 6 beta D^2 (and to plain CG when
/// beta = 0), since the post-step gap is at most beta D^2. The exact
/// linesearch rule instead certifies from the first entry, so an already
/// optimal warm start returns immediately.
enum class AlphaRule {
  exact_linesearch,
  open_loop_2_over_t1,  // alpha_t = 2/(t+1); alpha_1 = 1 by construction
  first_step_full,      // alpha_1 = 1, exact linesearch afterwards
};

/// Outcome of one inner solve. `iterations` counts loop entries; every entry
/// performs exactly one LMO call, and the last one certifies the output, so
/// the number of Frank-Wolfe steps taken is iterations - 1 on normal
/// termination. `final_certified_gap` is a sound upper bound on the exact
/// Wolfe gap at u_plus.
struct InnerResult {
  Vector u_plus;
  std::int64_t iterations = 0;
  std::int64_t lmo_calls_used = 0;
  double final_certified_gap = 0.0;
  std::int64_t t_bound = 0;  // certified iteration cap; 0 when not defined
  bool capped = false;       // stopped by `iteration_cap`, not by the certificate
};

/// Per-entry inner-loop observer: (t, u_{t-1}, grad phi(u_{t-1}), v_t,
/// <grad phi, u_{t-1} - v_t>, delta_t).
using InnerObserver =
    std::function<void(int, const Vector&, const Vector&, const Vector&, double, double)>;

/// Certified iteration bound 1 + ceil((7*sigma+6)*beta*D^2/eta); 2 when
/// beta = 0 (the second entry sees a constant gradient and a zero gap).
inline std::int64_t inner_iteration_bound(double beta, double diameter, double eta, double sigma) {
  if (beta == 0.0) return 2;
  if (eta <= 0.0) return 0;
  return 1 + static_cast<std::int64_t>(std::ceil((7.0 * sigma + 6.0) * beta * diameter * diameter / eta));
}

namespace detail {

inline InnerResult solve_inner(const ProjSubproblem& sub, const Vector& u0, AlphaRule rule,
                               double sigma, OracleCounters* counters,
                               const InnerObserver* observer, std::int64_t iteration_cap,
                               std::int64_t t_bound_override = 0) {
  require(sub.set != nullptr, "inner solve: missing feasible set");
  require(sub.beta >= 0.0, "inner solve: beta must be nonnegative");
  require(sub.set->contains(u0, 1e-9), "inner solve: infeasible warm start");
  require(sub.eta > 0.0 || sub.beta == 0.0 || iteration_cap > 0,
          "inner solve: eta must be positive");

  const double d2 = sub.set->diameter() * sub.set->diameter();
  const double delta0 = sigma * sub.beta * d2;
  const std::int64_t t_bound =
      t_bound_override > 0 ? t_bound_override
                           : inner_iteration_bound(sub.beta, sub.set->diameter(), sub.eta, sigma);
  const std::int64_t guard = t_bound > 0 ? 10 * t_bound : std::int64_t{10000000};
  const bool first_step_forced = rule != AlphaRule::exact_linesearch;  // alpha_1 = 1 rules

  Vector u = u0;
  for (std::int64_t t = 1;; ++t) {
    const Vector grad = phi_grad(sub, u);
    const double delta_t = delta0 / static_cast<double>(t);
    const Vector v = approx_lmo(*sub.set, grad, delta_t, counters);
    const double gap = grad.dot(u - v);
    if (observer && *observer) (*observer)(static_cast<int>(t), u, grad, v, gap, delta_t);

    if (iteration_cap > 0 && t >= iteration_cap) {
      return {std::move(u), t, t, gap + delta_t, t_bound, true};
    }
    if (iteration_cap == 0 && !(first_step_forced && t == 1) && gap <= sub.eta - delta_t) {
      return {std::move(u), t, t, gap + delta_t, t_bound, false};
    }
    if (iteration_cap == 0 && t > guard) {
      throw solver_abort("inner solve exceeded 10x its certified iteration bound (" +
                         std::to_string(guard) + "); eta/beta configuration is broken");
    }

    double alpha;
    switch (rule) {
      case AlphaRule::open_loop_2_over_t1:
        alpha = 2.0 / (static_cast<double>(t) + 1.0);
        break;
      case AlphaRule::first_step_full:
        alpha = t == 1 ? 1.0 : exact_linesearch_alpha(u, v, sub);
        break;
      case AlphaRule::exact_linesearch:
      default:
        alpha = exact_linesearch_alpha(u, v, sub);
        break;
    }
    u = convex_combine(u, v, alpha);
  }
}

}  // namespace detail

/// CGM: Frank-Wolfe on phi with exact LMO calls. One LMO per entry serves as
/// both termination certificate and step direction. A positive
/// `t_bound_override` pins the certified iteration budget (and hence the 10x
/// non-termination guard) instead of deriving it from sub.eta.
inline InnerResult cgm_solve(const ProjSubproblem& sub, const Vector& u0, AlphaRule rule,
                             OracleCounters* counters = nullptr,
                             const InnerObserver* observer = nullptr,
                             std::int64_t iteration_cap = 0, std::int64_t t_bound_override = 0) {
  return detail::solve_inner(sub, u0, rule, 0.0, counters, observer, iteration_cap,
                             t_bound_override);
}

/// ACGM: like CGM but each LMO is adversarially inexact with budget
/// delta_t = sigma*beta*D^2/t, the termination test tightens to
/// gap_t <= eta - delta_t, and steps use the exact linesearch. On normal
/// termination the exact Wolfe gap at u_plus is at most eta.
inline InnerResult acgm_solve(const ProjSubproblem& sub, const Vector& u0,
                              OracleCounters* counters = nullptr,
                              const InnerObserver* observer = nullptr,
                              std::int64_t iteration_cap = 0, std::int64_t t_bound_override = 0) {
  require(sub.sigma >= 0.0, "acgm_solve: sigma must be nonnegative");
  return detail::solve_inner(sub, u0, AlphaRule::exact_linesearch, sub.sigma, counters, observer,
                             iteration_cap, t_bound_override);
}

}  // namespace ucgs
