#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>

#include "ucgs/core.hpp"
#include "ucgs/inner.hpp"
#include "ucgs/problem.hpp"
#include "ucgs/trace.hpp"

namespace ucgs {

/// Affine global under-estimator of f accumulated as a convex combination of
/// tangent planes: l(x) = c + <w, x>.
struct LowerModel {
  double c = 0.0;
  Vector w;
  std::int64_t k = 0;  // number of tangents aggregated

  double value(const Vector& x) const {
    require(k >= 1, "LowerModel: model is empty");
    return c + w.dot(x);
  }
};

/// Folds the tangent f(z) + <gz, x - z> into the model with weight gamma.
/// gamma = 1 resets the model (required on the first update).
inline LowerModel update_lower_model(LowerModel model, double gamma, const Vector& z, double fz,
                                     const Vector& gz) {
  require(gamma > 0.0 && gamma <= 1.0, "update_lower_model: gamma outside (0,1]");
  if (model.k == 0) {
    require(gamma == 1.0, "update_lower_model: first update must use gamma = 1");
    model.w = Vector::Zero(z.size());
  }
  model.c = (1.0 - gamma) * model.c + gamma * (fz - gz.dot(z));
  model.w = (1.0 - gamma) * model.w + gamma * gz;
  model.k += 1;
  return model;
}

/// Minimizes the model over the set up to additive eps_k (one LMO call) and
/// returns (s, f_y - l(s) + eps_k). The result upper-bounds f(y) - min_X f.
inline std::pair<Vector, double> certify_gap(const LowerModel& model, double f_y,
                                             const FeasibleSet& set, double eps_k,
                                             OracleCounters* counters = nullptr) {
  require(model.k >= 1, "certify_gap: model is empty");
  Vector s = approx_lmo(set, model.w, eps_k, counters);
  const double gap = f_y - model.value(s) + eps_k;
  return {std::move(s), gap};
}

/// Positive root of L*gamma^2/k = (1-gamma)*Gamma_prev, always in (0,1).
/// Evaluated in the cancellation-free form 2P/(P + sqrt(P^2+4P)) with
/// P = k*Gamma_prev/L.
inline double gamma_from_L(double Gamma_prev, double L, std::int64_t k) {
  require(Gamma_prev > 0.0 && L > 0.0, "gamma_from_L: inputs must be positive");
  require(k >= 2, "gamma_from_L: k must be >= 2");
  const double P = static_cast<double>(k) * Gamma_prev / L;
  return 2.0 * P / (P + std::sqrt(P * P + 4.0 * P));
}

/// Step-product constant
///   C_nu = ((1+2nu)/(1+3nu))^((1+3nu)/(1+nu))
///        * ((1-nu)/(1+nu))^((1-nu)/(1+nu)) * 2^((4+10nu)/(1+nu)),
/// with the nu = 1 middle factor taken as its continuity limit 1.
inline double c_nu(double nu) {
  require(nu > 0.0 && nu <= 1.0, "c_nu: nu must lie in (0,1]");
  const double first = std::pow((1.0 + 2.0 * nu) / (1.0 + 3.0 * nu), (1.0 + 3.0 * nu) / (1.0 + nu));
  const double middle =
      nu == 1.0 ? 1.0 : std::pow((1.0 - nu) / (1.0 + nu), (1.0 - nu) / (1.0 + nu));
  const double last = std::pow(2.0, (4.0 + 10.0 * nu) / (1.0 + nu));
  return first * middle * last;
}

/// Ceiling every accepted L_k must respect when the objective has Holder data
/// (nu, M): 2*((1-nu)/((1+nu) eps gamma))^((1-nu)/(1+nu)) * M^(2/(1+nu)),
/// which reads 2M at nu = 1.
inline double linesearch_L_ceiling(double nu, double M, double eps, double gamma) {
  require(nu > 0.0 && nu <= 1.0, "linesearch_L_ceiling: nu must lie in (0,1]");
  require(M > 0.0 && eps > 0.0 && gamma > 0.0,
          "linesearch_L_ceiling: M, eps, gamma must be positive");
  const double head =
      nu == 1.0 ? 1.0
                : std::pow((1.0 - nu) / ((1.0 + nu) * eps * gamma), (1.0 - nu) / (1.0 + nu));
  return 2.0 * head * std::pow(M, 2.0 / (1.0 + nu));
}

/// Bound on L_k gamma_k^2: C_nu M^(2/(1+nu)) / (k^((1+3nu)/(1+nu)) eps^((1-nu)/(1+nu))).
inline double step_product_bound(double nu, double M, double eps, std::int64_t k) {
  require(k >= 1, "step_product_bound: k must be >= 1");
  return c_nu(nu) * std::pow(M, 2.0 / (1.0 + nu)) /
         (std::pow(static_cast<double>(k), (1.0 + 3.0 * nu) / (1.0 + nu)) *
          std::pow(eps, (1.0 - nu) / (1.0 + nu)));
}

/// Gradient-evaluation budget ceil(16*((3+sigma)^((1+nu)/2) M D^(1+nu)/eps)^(2/(1+3nu))).
inline std::int64_t n_grad_bound(double nu, double M, double diameter, double eps, double sigma) {
  require(nu > 0.0 && nu <= 1.0, "n_grad_bound: nu must lie in (0,1]");
  require(M > 0.0 && diameter > 0.0 && eps > 0.0 && sigma >= 0.0, "n_grad_bound: bad inputs");
  const double base =
      std::pow(3.0 + sigma, (1.0 + nu) / 2.0) * M * std::pow(diameter, 1.0 + nu) / eps;
  return static_cast<std::int64_t>(std::ceil(16.0 * std::pow(base, 2.0 / (1.0 + 3.0 * nu))));
}

/// LMO-call budget ceil((7sigma/2+3) N^2 + (7sigma/2+6) N) for N = n_grad_bound.
inline std::int64_t n_lin_bound(std::int64_t n_grad, double sigma) {
  require(n_grad >= 0 && sigma >= 0.0, "n_lin_bound: bad inputs");
  const double n = static_cast<double>(n_grad);
  return static_cast<std::int64_t>(
      std::ceil((3.5 * sigma + 3.0) * n * n + (3.5 * sigma + 6.0) * n));
}

struct UcgsOptions {
  double epsilon = 1e-3;  // target accuracy for the certified gap
  double sigma = 0.0;     // inexactness knob for both delta_t and eps_k
  double L0 = 1.0;        // initial smoothness guess
  double L_min = 1e-12;   // floor for backtracking trials
  std::int64_t max_outer = 10000000;
  bool timing = false;
  // Optional independent overrides of the two sigma roles.
  std::optional<double> sigma_delta;  // inner LMO budget delta_t = sigma_delta*beta*D^2/t
  std::optional<double> sigma_cert;   // certificate budget eps_k = sigma_cert*L*gamma^2*D^2/2
  // Fault-injection knob for the certification harness: scales the eta handed
  // to the inner solver while the certified iteration budget stays nominal.
  double inject_eta_scale = 1.0;
  // Optional early stop, evaluated on every produced trace row.
  std::function<bool(const TraceRow&)> stop;
  // When false, rows are streamed to `stop` but not retained (long budget runs).
  bool keep_trace = true;

  double delta_sigma() const { return sigma_delta.value_or(sigma); }
  double cert_sigma() const { return sigma_cert.value_or(sigma); }
};

/// View of one accepted outer step, valid only during the observer call.
struct UcgsStepView {
  std::int64_t k;
  double L;
  double gamma;
  double Gamma;
  double beta;
  double eta;
  double eps_k;
  std::int64_t trials;  // backtracking trials spent on this step (>= 1)
  const Vector& z;
  const Vector& x_prev;
  const Vector& x;
  const Vector& y;
  double fz;
  const Vector& gz;
  double f_y;
  const InnerResult& inner;
  const LowerModel& model;
  const Vector& s;
  double certified_gap;
};

/// View of one backtracking trial (accepted or rejected).
struct UcgsTrialView {
  std::int64_t k;
  std::int64_t trial;
  double L_trial;
  double gamma;
  bool accepted;
  const InnerResult& inner;
};

using UcgsStepObserver = std::function<void(const UcgsStepView&)>;
using UcgsTrialObserver = std::function<void(const UcgsTrialView&)>;

struct UcgsResult {
  Vector y;
  double certified_gap = 0.0;
  OracleCounters counters;
  RunTrace trace;
  std::int64_t outer_iters = 0;          // accepted steps == accepted-step gradient evals
  std::int64_t raw_grad_requests = 0;    // all gradient requests, cache hits included
  double L_min_accepted = 0.0;
  double L_max_accepted = 0.0;
};

/// Universal conditional gradient sliding. Requires no smoothness input: each
/// outer step backtracks on L (halving first, then doubling on rejection),
/// derives gamma_k from L_k gamma_k^2/k = (1-gamma_k) Gamma_{k-1}, solves the
/// projection subproblem by ACGM with beta_k = L_k gamma_k and
/// eta_k = L_k gamma_k D^2/k, and stops once the accumulated lower model
/// certifies f(y_k) - min_X f <= epsilon.
inline UcgsResult ucgs_run(const ProblemInstance& problem, const UcgsOptions& opts,
                           const UcgsStepObserver& step_observer = {},
                           const UcgsTrialObserver& trial_observer = {}) {
  require(opts.epsilon > 0.0, "ucgs_run: epsilon must be positive");
  require(opts.sigma >= 0.0 && opts.delta_sigma() >= 0.0 && opts.cert_sigma() >= 0.0,
          "ucgs_run: sigma must be nonnegative");
  require(opts.L0 > 0.0 && opts.L_min > 0.0, "ucgs_run: L0 and L_min must be positive");

  UcgsResult result;
  CountedObjective f(problem.objective, result.counters);
  const FeasibleSet& set = problem.set;
  const double d2 = set.diameter() * set.diameter();
  const double L_ceiling = opts.L_min * 1152921504606846976.0;  // 2^60 * L_min

  Vector x = problem.x0;
  Vector y = problem.x0;
  double L_prev = std::max(opts.L0, opts.L_min);
  double Gamma_prev = 0.0;
  LowerModel model;
  const auto t0 = std::chrono::steady_clock::now();

  for (std::int64_t k = 1; k <= opts.max_outer; ++k) {
    double L_trial = std::max(L_prev / 2.0, opts.L_min);
    std::int64_t trials = 0;

    double gamma = 1.0, fz = 0.0, f_y = 0.0;
    Vector z, gz, x_new, y_new;
    InnerResult inner;
    while (true) {
      ++trials;
      gamma = k == 1 ? 1.0 : gamma_from_L(Gamma_prev, L_trial, k);
      z = convex_combine(y, x, gamma);
      gz = f.grad(z);  // copy: the cache slot is reused by later requests
      fz = f.value(z);
      const double beta = L_trial * gamma;
      const double eta = L_trial * gamma * d2 / static_cast<double>(k);
      // beta*D^2/eta = k exactly, so the certified inner budget is 1+ceil((7s+6)k).
      const std::int64_t t_bound =
          1 + static_cast<std::int64_t>(std::ceil((7.0 * opts.delta_sigma() + 6.0) *
                                                  static_cast<double>(k)));
      ProjSubproblem sub{gz, beta, x, &set, eta * opts.inject_eta_scale, opts.delta_sigma()};
      inner = acgm_solve(sub, x, &result.counters, nullptr, 0, t_bound);
      x_new = inner.u_plus;
      y_new = convex_combine(y, x_new, gamma);
      f_y = f.value(y_new);
      const Vector dy = y_new - z;
      const bool accepted =
          f_y <= fz + gz.dot(dy) + 0.5 * L_trial * dy.squaredNorm() + 0.5 * opts.epsilon * gamma;
      if (trial_observer) trial_observer(UcgsTrialView{k, trials, L_trial, gamma, accepted, inner});
      if (accepted) break;
      L_trial *= 2.0;
      if (L_trial > L_ceiling) {
        throw solver_abort(
            "ucgs_run: backtracking linesearch exceeded 2^60 * L_min; the objective violates the "
            "Holder gradient assumption or epsilon is not positive");
      }
    }

    const double L = L_trial;
    const double Gamma = L * gamma * gamma / static_cast<double>(k);
    const double beta = L * gamma;
    const double eta = L * gamma * d2 / static_cast<double>(k);
    model = update_lower_model(std::move(model), gamma, z, fz, gz);
    // Certificate budget sigma*L*gamma^2*D^2/2: the gamma^2 scaling is what the
    // termination threshold (3+sigma)*L*gamma^2*D^2 <= eps requires.
    const double eps_k = 0.5 * opts.cert_sigma() * L * gamma * gamma * d2;
    auto [s, certified] = certify_gap(model, f_y, set, eps_k, &result.counters);

    result.L_min_accepted = k == 1 ? L : std::min(result.L_min_accepted, L);
    result.L_max_accepted = k == 1 ? L : std::max(result.L_max_accepted, L);
    result.outer_iters = k;

    TraceRow row;
    row.k = k;
    row.f_y = f_y;
    if (problem.fstar) row.true_gap = f_y - *problem.fstar;
    row.certified_gap = certified;
    row.L = L;
    row.gamma = gamma;
    row.beta = beta;
    row.eta = eta;
    row.inner_iters = inner.iterations;
    row.lmo_calls_cum = result.counters.lmo_calls;
    row.grad_evals_cum = result.counters.grad_evals;
    row.grad_evals_with_retries_cum = f.raw_grad_requests();
    if (opts.timing) {
      row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    }
    if (opts.keep_trace) result.trace.rows.push_back(row);

    if (step_observer) {
      step_observer(UcgsStepView{k, L, gamma, Gamma, beta, eta, eps_k, trials, z, x, x_new, y_new,
                                 fz, gz, f_y, inner, model, s, certified});
    }

    x = std::move(x_new);
    y = std::move(y_new);
    L_prev = L;
    Gamma_prev = Gamma;

    if (certified <= opts.epsilon || (opts.stop && opts.stop(row))) {
      result.y = y;
      result.certified_gap = certified;
      result.raw_grad_requests = f.raw_grad_requests();
      return result;
    }
  }
  throw solver_abort("ucgs_run: outer iteration cap reached before certifying epsilon");
}

}  // namespace ucgs
