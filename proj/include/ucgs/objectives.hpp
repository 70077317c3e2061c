#pragma once

#include <cmath>
#include <random>
#include <utility>

#include "ucgs/core.hpp"
#include "ucgs/sets.hpp"

namespace ucgs {

/// Differentiable convex test objective with known Holder smoothness data.
///
/// quadratic:       f(x) = (1/2)||Ax - b||^2,           nu = 1,   M = lambda_max(A^T A)
/// pnorm_residual:  f(x) = (1/p) sum_i |a_i^T x - b_i|^p, nu = p-1, p in (1,2)
///
/// The pnorm constant is M = 2^(1-nu) * m^((1-nu)/2) * ||A||_2^(1+nu) with m the
/// number of rows: the scalar map t -> |t|^(p-1) sign(t) is (p-1)-Holder with
/// constant 2^(2-p), and lifting it componentwise to R^m costs an extra
/// m^((2-p)/2) in the Euclidean norm (power-mean inequality), after which both
/// compositions with A contribute ||A||_2 factors.
class Objective {
 public:
  enum class Kind { quadratic, pnorm_residual };

  static Objective quadratic(Matrix A, Vector b) {
    require(A.rows() == b.size(), "quadratic: A rows must match b");
    require_finite(b, "quadratic b");
    Objective f;
    f.kind_ = Kind::quadratic;
    f.A_ = std::move(A);
    f.b_ = std::move(b);
    f.p_ = 2.0;
    f.nu_ = 1.0;
    const double smax = f.operator_norm();
    f.M_ = smax * smax;
    return f;
  }

  static Objective pnorm_residual(Matrix A, Vector b, double p) {
    require(A.rows() == b.size(), "pnorm_residual: A rows must match b");
    require(p > 1.0 && p < 2.0, "pnorm_residual: p must lie in (1,2)");
    require_finite(b, "pnorm_residual b");
    Objective f;
    f.kind_ = Kind::pnorm_residual;
    f.A_ = std::move(A);
    f.b_ = std::move(b);
    f.p_ = p;
    f.nu_ = p - 1.0;
    const double m = static_cast<double>(f.A_.rows());
    f.M_ = std::pow(2.0, 1.0 - f.nu_) * std::pow(m, (1.0 - f.nu_) / 2.0) *
           std::pow(f.operator_norm(), 1.0 + f.nu_);
    return f;
  }

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(A_.cols()); }
  int rows() const { return static_cast<int>(A_.rows()); }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  double p() const { return p_; }

  /// Holder exponent nu of the gradient.
  double holder_exponent() const { return nu_; }
  /// Analytic Holder constant M_nu valid on the whole space.
  double holder_constant() const { return M_; }

  double value(const Vector& x) const {
    const Vector r = A_ * x - b_;
    if (kind_ == Kind::quadratic) return 0.5 * r.squaredNorm();
    double s = 0.0;
    for (int i = 0; i < r.size(); ++i) s += std::pow(std::abs(r[i]), p_);
    return s / p_;
  }

  Vector grad(const Vector& x) const {
    Vector r = A_ * x - b_;
    if (kind_ == Kind::quadratic) return A_.transpose() * r;
    for (int i = 0; i < r.size(); ++i) {
      const double t = r[i];
      r[i] = t == 0.0 ? 0.0 : std::pow(std::abs(t), p_ - 1.0) * (t > 0.0 ? 1.0 : -1.0);
    }
    return A_.transpose() * r;
  }

 private:
  Objective() = default;

  double operator_norm() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(A_.transpose() * A_);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }

  Kind kind_ = Kind::quadratic;
  Matrix A_;
  Vector b_;
  double p_ = 2.0;
  double nu_ = 1.0;
  double M_ = 0.0;
};

/// Objective wrapper that attributes oracle calls to one run's counters.
///
/// Gradient requests are deduplicated through a single-slot cache keyed by the
/// exact bit pattern of the query point, so a backtracking retry that re-asks
/// for the gradient at a literally identical point counts once. The raw
/// request count (cache hits included) is kept separately.
class CountedObjective {
 public:
  CountedObjective(const Objective& obj, OracleCounters& counters)
      : obj_(&obj), counters_(&counters) {}

  double value(const Vector& x) const {
    ++counters_->f_evals;
    return obj_->value(x);
  }

  const Vector& grad(const Vector& x) const {
    ++raw_grad_requests_;
    if (has_cache_ && bitwise_equal(x, cached_x_)) return cached_g_;
    cached_x_ = x;
    cached_g_ = obj_->grad(x);
    has_cache_ = true;
    ++counters_->grad_evals;
    return cached_g_;
  }

  std::int64_t raw_grad_requests() const { return raw_grad_requests_; }
  const Objective& inner() const { return *obj_; }
  OracleCounters& counters() const { return *counters_; }

 private:
  const Objective* obj_;
  OracleCounters* counters_;
  mutable Vector cached_x_;
  mutable Vector cached_g_;
  mutable bool has_cache_ = false;
  mutable std::int64_t raw_grad_requests_ = 0;
};

/// Empirical lower bound on the Holder constant for a given exponent:
/// max over sampled feasible pairs of ||grad f(x) - grad f(y)|| / ||x-y||^nu.
/// Deterministic given the seed.
inline double estimate_holder(const Objective& obj, const FeasibleSet& set, double nu,
                              int samples, std::uint64_t seed) {
  require(samples >= 2, "estimate_holder: need at least 2 samples");
  require(nu > 0.0 && nu <= 1.0, "estimate_holder: nu must lie in (0,1]");
  std::mt19937_64 rng(seed);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vector x = set.sample(rng);
    const Vector y = set.sample(rng);
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    const double ratio = (obj.grad(x) - obj.grad(y)).norm() / std::pow(dist, nu);
    best = std::max(best, ratio);
  }
  return best;
}

}  // namespace ucgs
