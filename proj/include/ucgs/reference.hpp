#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ucgs/core.hpp"
#include "ucgs/inner.hpp"
#include "ucgs/problem.hpp"

namespace ucgs {

/// High-accuracy solution from a reference oracle.
struct RefSolution {
  Vector x;
  double value = 0.0;
  double accuracy_estimate = 0.0;
};

namespace detail {

/// Euclidean projection onto {w >= 0, sum w = total} by the sort-and-threshold
/// rule.
inline Vector project_scaled_simplex(const Vector& p, double total) {
  const int n = static_cast<int>(p.size());
  std::vector<double> u(p.data(), p.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  int rho = 0;
  for (int j = 0; j < n; ++j) {
    cum += u[j];
    const double t = (cum - total) / (j + 1);
    if (u[j] - t > 0.0) {
      rho = j + 1;
      tau = t;
    }
  }
  (void)rho;
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = std::max(p[i] - tau, 0.0);
  return x;
}

inline Vector project_onto(const FeasibleSet& set, const Vector& p) {
  switch (set.kind()) {
    case FeasibleSet::Kind::simplex:
      return project_scaled_simplex(p, 1.0);
    case FeasibleSet::Kind::box: {
      Vector x(p.size());
      for (int i = 0; i < p.size(); ++i) x[i] = std::clamp(p[i], set.lo()[i], set.hi()[i]);
      return x;
    }
    case FeasibleSet::Kind::l2ball: {
      const Vector d = p - set.center();
      const double nd = d.norm();
      if (nd <= set.radius()) return p;
      return set.center() + (set.radius() / nd) * d;
    }
    case FeasibleSet::Kind::l1ball: {
      const Vector d = p - set.center();
      if (d.lpNorm<1>() <= set.radius()) return p;
      const Vector w = project_scaled_simplex(d.cwiseAbs(), set.radius());
      Vector x = set.center();
      for (int i = 0; i < d.size(); ++i) x[i] += (d[i] >= 0.0 ? 1.0 : -1.0) * w[i];
      return x;
    }
  }
  return p;
}

}  // namespace detail

/// Exact minimizer of phi over the set, independent of the production inner
/// solver: for beta > 0 the problem is a Euclidean projection of
/// anchor - g/beta, solved in closed form per set kind; for beta = 0 it is a
/// single exact LMO.
inline RefSolution ref_min_phi(const ProjSubproblem& sub) {
  require(sub.set != nullptr, "ref_min_phi: missing set");
  Vector x;
  if (sub.beta == 0.0) {
    x = sub.set->lmo(sub.g);
  } else {
    x = detail::project_onto(*sub.set, sub.anchor - sub.g / sub.beta);
  }
  const double value = phi_value(sub, x);
  return {std::move(x), value, 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(value))};
}

/// Known-optimum instances carry their minimizer; the optimal value is 0 by
/// construction.
inline RefSolution ref_fstar(const GeneratedInstance& inst) {
  return {inst.xstar, 0.0, 0.0};
}

/// Generic fallback: long plain Frank-Wolfe on f with a 1-D bisection
/// linesearch, tracking the best Wolfe-gap certificate seen. The returned
/// accuracy_estimate is that certificate; callers must treat it as the honest
/// bound on value - f*.
inline RefSolution ref_fstar(const ProblemInstance& problem, std::int64_t max_iters = 10000000,
                             double target_gap = 1e-9) {
  const Objective& f = problem.objective;
  const FeasibleSet& set = problem.set;
  Vector x = problem.x0;
  Vector best_x = x;
  double best_val = f.value(x);
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::int64_t it = 0; it < max_iters; ++it) {
    const Vector g = f.grad(x);
    const Vector v = set.lmo(g);
    const double gap = g.dot(x - v);
    const double val = f.value(x);
    if (val < best_val) {
      best_val = val;
      best_x = x;
    }
    best_gap = std::min(best_gap, gap);
    if (gap <= target_gap) break;
    const Vector d = v - x;
    // bisection on s -> <grad f(x + s d), d>, monotone by convexity
    double lo = 0.0, hi = 1.0;
    if (f.grad(x + d).dot(d) <= 0.0) {
      lo = hi;
    } else {
      for (int b = 0; b < 60; ++b) {
        const double mid = 0.5 * (lo + hi);
        (f.grad(x + mid * d).dot(d) > 0.0 ? hi : lo) = mid;
      }
    }
    const double s = 0.5 * (lo + hi);
    if (s <= 0.0) break;  // stationary along every descent segment
    x += s * d;
  }
  return {std::move(best_x), best_val, best_gap};
}

/// Least-squares slope of log y versus log x over the last `tail_fraction` of
/// the points. Requires at least two retained points and positive data.
inline double fit_rate(const std::vector<double>& xs, const std::vector<double>& ys,
                       double tail_fraction) {
  require(xs.size() == ys.size(), "fit_rate: xs/ys length mismatch");
  require(tail_fraction > 0.0 && tail_fraction <= 1.0, "fit_rate: tail_fraction outside (0,1]");
  const size_t n = xs.size();
  const size_t keep = std::max<size_t>(2, static_cast<size_t>(std::ceil(n * tail_fraction)));
  require(keep <= n, "fit_rate: need at least 2 points");
  const size_t start = n - keep;
  double mx = 0.0, my = 0.0;
  for (size_t i = start; i < n; ++i) {
    require(xs[i] > 0.0, "fit_rate: nonpositive x");
    require(ys[i] > 0.0, "fit_rate: nonpositive y");
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= keep;
  my /= keep;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = start; i < n; ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(ys[i]) - my);
  }
  require(sxx > 0.0, "fit_rate: degenerate x values");
  return sxy / sxx;
}

}  // namespace ucgs
