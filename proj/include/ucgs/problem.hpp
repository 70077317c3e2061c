#pragma once

#include <optional>
#include <random>
#include <utility>

#include "ucgs/core.hpp"
#include "ucgs/objectives.hpp"
#include "ucgs/sets.hpp"

namespace ucgs {

/// A solvable instance: objective, feasible set, feasible start, and an
/// optional known optimal value used only for verification.
struct ProblemInstance {
  ProblemInstance(Objective objective_, FeasibleSet set_, Vector x0_,
                  std::optional<double> fstar_ = std::nullopt)
      : objective(std::move(objective_)),
        set(std::move(set_)),
        x0(std::move(x0_)),
        fstar(fstar_) {
    require(objective.dim() == set.dim(), "ProblemInstance: objective/set dimension mismatch");
    require_finite(x0, "ProblemInstance x0");
    require(set.contains(x0, kFeasTol), "ProblemInstance: x0 is not feasible");
  }

  Objective objective;
  FeasibleSet set;
  Vector x0;
  std::optional<double> fstar;
};

/// Instance with its zero-residual point, for verification-only use. xstar is
/// the constrained minimizer exactly when problem.fstar is present (shift 0);
/// shifted instances move the zero-residual point outside the set, so their
/// optimal value is positive and not known in closed form.
struct GeneratedInstance {
  ProblemInstance problem;
  Vector xstar;
};

namespace detail {

inline Matrix random_gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix A(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) A(i, j) = gauss(rng);
  return A;
}

/// Scales A so that ||A||_2 = target.
inline void normalize_operator_norm(Matrix& A, double target) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A.transpose() * A);
  const double smax = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  if (smax > 0.0) A *= target / smax;
}

/// A point in the relative interior of the set: the midpoint of a random
/// sample and the canonical center.
inline Vector relint_point(const FeasibleSet& set, std::mt19937_64& rng) {
  return 0.5 * (set.sample(rng) + set.center());
}

}  // namespace detail

namespace detail {

/// With shift = 0 the zero-residual point xbar is feasible and f* = 0 exactly.
/// shift > 0 displaces it to xbar - shift*e_1, off the simplex/set, so the
/// constrained optimum lands on a face with a nonzero gradient (the regime
/// where plain conditional gradient pays its worst-case LMO complexity).
inline Vector displaced_point(const FeasibleSet& set, std::mt19937_64& rng, double shift) {
  Vector x = relint_point(set, rng);
  x[0] -= shift;
  return x;
}

}  // namespace detail

/// Random least-squares instance with b = A xbar, so for shift = 0 the
/// optimal value is exactly 0 and xbar attains it. ||A||_2 is normalized to 1.
inline GeneratedInstance make_quadratic_instance(const FeasibleSet& set, int rows,
                                                 std::uint64_t seed, double shift = 0.0,
                                                 double a_norm = 1.0) {
  require(shift >= 0.0, "make_quadratic_instance: shift must be nonnegative");
  require(a_norm > 0.0, "make_quadratic_instance: a_norm must be positive");
  std::mt19937_64 rng(seed);
  Matrix A = detail::random_gaussian(rows, set.dim(), rng);
  detail::normalize_operator_norm(A, a_norm);
  Vector xbar = detail::displaced_point(set, rng, shift);
  Vector b = A * xbar;
  Vector x0 = set.lmo(Vector::Ones(set.dim()));  // deterministic feasible start
  std::optional<double> fstar;
  if (shift == 0.0) fstar = 0.0;
  ProblemInstance prob(Objective::quadratic(std::move(A), std::move(b)), set, std::move(x0),
                       fstar);
  return {std::move(prob), std::move(xbar)};
}

/// Same construction for the p-norm residual objective, p in (1,2).
inline GeneratedInstance make_pnorm_instance(const FeasibleSet& set, int rows, double p,
                                             std::uint64_t seed, double shift = 0.0,
                                             double a_norm = 1.0) {
  require(shift >= 0.0, "make_pnorm_instance: shift must be nonnegative");
  require(a_norm > 0.0, "make_pnorm_instance: a_norm must be positive");
  std::mt19937_64 rng(seed);
  Matrix A = detail::random_gaussian(rows, set.dim(), rng);
  detail::normalize_operator_norm(A, a_norm);
  Vector xbar = detail::displaced_point(set, rng, shift);
  Vector b = A * xbar;
  Vector x0 = set.lmo(Vector::Ones(set.dim()));
  std::optional<double> fstar;
  if (shift == 0.0) fstar = 0.0;
  ProblemInstance prob(Objective::pnorm_residual(std::move(A), std::move(b), p), set,
                       std::move(x0), fstar);
  return {std::move(prob), std::move(xbar)};
}

}  // namespace ucgs
