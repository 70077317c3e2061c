#pragma once

#include <algorithm>
#include <random>
#include <utility>

#include "ucgs/core.hpp"

namespace ucgs {

/// Compact convex feasible set with an exact linear minimization oracle and an
/// exact Euclidean diameter. Immutable after construction; safe to share.
///
/// Tie-breaking in the LMO is by lowest index among minimizing vertices so
/// repeated runs are bit-reproducible. A zero objective returns the canonical
/// center (barycenter / midpoint / ball center).
class FeasibleSet {
 public:
  enum class Kind { simplex, l1ball, box, l2ball };

  static FeasibleSet simplex(int n) {
    require(n >= 1, "simplex: dimension must be >= 1");
    FeasibleSet s;
    s.kind_ = Kind::simplex;
    s.n_ = n;
    return s;
  }

  static FeasibleSet l1ball(Vector center, double radius) {
    require(radius > 0.0, "l1ball: radius must be positive");
    require_finite(center, "l1ball center");
    FeasibleSet s;
    s.kind_ = Kind::l1ball;
    s.n_ = static_cast<int>(center.size());
    s.center_ = std::move(center);
    s.radius_ = radius;
    return s;
  }

  static FeasibleSet box(Vector lo, Vector hi) {
    require(lo.size() == hi.size(), "box: lo/hi dimension mismatch");
    require_finite(lo, "box lo");
    require_finite(hi, "box hi");
    require((lo.array() < hi.array()).all(), "box: need lo < hi componentwise");
    FeasibleSet s;
    s.kind_ = Kind::box;
    s.n_ = static_cast<int>(lo.size());
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    return s;
  }

  static FeasibleSet l2ball(Vector center, double radius) {
    require(radius > 0.0, "l2ball: radius must be positive");
    require_finite(center, "l2ball center");
    FeasibleSet s;
    s.kind_ = Kind::l2ball;
    s.n_ = static_cast<int>(center.size());
    s.center_ = std::move(center);
    s.radius_ = radius;
    return s;
  }

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  double radius() const { return radius_; }
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }

  /// Canonical interior point, also the LMO convention for a zero objective.
  Vector center() const {
    switch (kind_) {
      case Kind::simplex:
        return Vector::Constant(n_, 1.0 / n_);
      case Kind::box:
        return 0.5 * (lo_ + hi_);
      default:
        return center_;
    }
  }

  /// Exact Euclidean diameter max_{a,b in X} ||a-b||.
  double diameter() const {
    switch (kind_) {
      case Kind::simplex:
        return n_ >= 2 ? std::sqrt(2.0) : 0.0;
      case Kind::l1ball:
        return 2.0 * radius_;
      case Kind::box:
        return (hi_ - lo_).norm();
      case Kind::l2ball:
        return 2.0 * radius_;
    }
    return 0.0;
  }

  bool contains(const Vector& x, double tol = kFeasTol) const {
    if (x.size() != n_) return false;
    switch (kind_) {
      case Kind::simplex:
        return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol;
      case Kind::l1ball:
        return (x - center_).lpNorm<1>() <= radius_ + tol;
      case Kind::box:
        return (x.array() >= lo_.array() - tol).all() && (x.array() <= hi_.array() + tol).all();
      case Kind::l2ball:
        return (x - center_).norm() <= radius_ + tol;
    }
    return false;
  }

  /// Exact minimizer of <c, x> over the set. Optionally counts the call.
  Vector lmo(const Vector& c, OracleCounters* counters = nullptr) const {
    require(c.size() == n_, "lmo: objective dimension mismatch");
    require_finite(c, "lmo objective");
    if (counters) ++counters->lmo_calls;
    if (c.isZero(0.0)) return center();
    switch (kind_) {
      case Kind::simplex: {
        int best = 0;
        for (int i = 1; i < n_; ++i)
          if (c[i] < c[best]) best = i;
        Vector v = Vector::Zero(n_);
        v[best] = 1.0;
        return v;
      }
      case Kind::l1ball: {
        int best = 0;
        for (int i = 1; i < n_; ++i)
          if (std::abs(c[i]) > std::abs(c[best])) best = i;
        Vector v = center_;
        v[best] -= radius_ * (c[best] > 0.0 ? 1.0 : -1.0);
        return v;
      }
      case Kind::box: {
        Vector v(n_);
        for (int i = 0; i < n_; ++i) v[i] = c[i] > 0.0 ? lo_[i] : (c[i] < 0.0 ? hi_[i] : lo_[i]);
        return v;
      }
      case Kind::l2ball:
        return center_ - (radius_ / c.norm()) * c;
    }
    return center();
  }

  /// A random feasible point; the distribution covers the whole set but is not
  /// uniform for the l1 ball.
  Vector sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    switch (kind_) {
      case Kind::simplex: {
        Vector x(n_);
        double sum = 0.0;
        for (int i = 0; i < n_; ++i) {
          x[i] = -std::log(1.0 - unif(rng));
          sum += x[i];
        }
        return x / sum;
      }
      case Kind::box: {
        Vector x(n_);
        for (int i = 0; i < n_; ++i) x[i] = lo_[i] + unif(rng) * (hi_[i] - lo_[i]);
        return x;
      }
      case Kind::l1ball: {
        Vector w(n_);
        double sum = 0.0;
        for (int i = 0; i < n_; ++i) {
          w[i] = -std::log(1.0 - unif(rng));
          sum += w[i];
        }
        const double rho = std::pow(unif(rng), 1.0 / n_);
        Vector x = center_;
        for (int i = 0; i < n_; ++i) {
          const double sign = unif(rng) < 0.5 ? -1.0 : 1.0;
          x[i] += radius_ * rho * sign * w[i] / sum;
        }
        return x;
      }
      case Kind::l2ball: {
        std::normal_distribution<double> gauss(0.0, 1.0);
        Vector d(n_);
        for (int i = 0; i < n_; ++i) d[i] = gauss(rng);
        const double rho = std::pow(unif(rng), 1.0 / n_);
        return center_ + (radius_ * rho / d.norm()) * d;
      }
    }
    return center();
  }

 private:
  FeasibleSet() = default;

  Kind kind_ = Kind::simplex;
  int n_ = 0;
  Vector center_;
  double radius_ = 0.0;
  Vector lo_;
  Vector hi_;
};

/// Duality gap max_{x in X} <g, u - x> together with the minimizer attaining
/// it. Costs one LMO call.
inline std::pair<double, Vector> wolfe_gap(const FeasibleSet& set, const Vector& g,
                                           const Vector& u, OracleCounters* counters = nullptr) {
  Vector v = set.lmo(g, counters);
  return {g.dot(u - v), std::move(v)};
}

/// Deterministic adversarial approximate LMO: returns a feasible v with
/// <c, v> <= min_x <c, x> + delta, where the achieved suboptimality is exactly
/// min(delta, attainable range). Counts as a single oracle call.
inline Vector approx_lmo(const FeasibleSet& set, const Vector& c, double delta,
                         OracleCounters* counters = nullptr) {
  require(delta >= 0.0, "approx_lmo: negative error budget");
  if (counters) ++counters->lmo_calls;
  Vector best = set.lmo(c);
  if (delta == 0.0) return best;
  const Vector worst = set.lmo(-c);  // maximizer of <c, x>
  const double range = c.dot(worst - best);
  if (range <= 0.0) return best;
  const double theta = std::min(delta, range) / range;
  return best + theta * (worst - best);
}

/// Approximate-LMO wrapper with a per-call error budget: either a constant
/// delta or the schedule delta_t = sigma*beta*D^2/t.
class ApproxLmo {
 public:
  static ApproxLmo constant(const FeasibleSet& set, double delta) {
    require(delta >= 0.0, "ApproxLmo: negative budget");
    return ApproxLmo(&set, delta, false);
  }

  /// Budget delta_t = sigma*beta*D^2/t for call index t = 1, 2, ...
  static ApproxLmo inverse_t(const FeasibleSet& set, double sigma, double beta) {
    require(sigma >= 0.0 && beta >= 0.0, "ApproxLmo: negative sigma or beta");
    const double d = set.diameter();
    return ApproxLmo(&set, sigma * beta * d * d, true);
  }

  double budget(int t) const {
    require(t >= 1, "ApproxLmo: call index must be >= 1");
    return scaled_ ? delta0_ / t : delta0_;
  }

  Vector operator()(const Vector& c, int t, OracleCounters* counters = nullptr) const {
    return approx_lmo(*base_, c, budget(t), counters);
  }

  const FeasibleSet& base() const { return *base_; }

 private:
  ApproxLmo(const FeasibleSet* base, double delta0, bool scaled)
      : base_(base), delta0_(delta0), scaled_(scaled) {}

  const FeasibleSet* base_;
  double delta0_;
  bool scaled_;
};

}  // namespace ucgs
