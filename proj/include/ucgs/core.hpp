#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucgs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Global tolerance for feasibility membership checks.
inline constexpr double kFeasTol = 1e-12;

/// Thrown when a caller violates a documented precondition.
class contract_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a solver detects a non-terminating or broken configuration.
class solver_abort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw contract_error(msg);
}

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw contract_error(std::string(what) + ": non-finite entry");
}

/// Exact bit-pattern equality, distinguishing -0.0 from 0.0 and any NaN payloads.
inline bool bitwise_equal(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<size_t>(a.size())) == 0;
}

/// Counts oracle calls made during one solver run. Owned by exactly one run;
/// values never decrease.
struct OracleCounters {
  std::int64_t grad_evals = 0;
  std::int64_t f_evals = 0;
  std::int64_t lmo_calls = 0;
};

/// (1-gamma)*a + gamma*b, evaluated in exactly that order componentwise.
inline Vector convex_combine(const Vector& a, const Vector& b, double gamma) {
  require(a.size() == b.size(), "convex_combine: dimension mismatch");
  require(gamma >= 0.0 && gamma <= 1.0, "convex_combine: gamma outside [0,1]");
  return (1.0 - gamma) * a + gamma * b;
}

/// Cumulative products G_1..G_K with G_1 = 1 and G_k = G_{k-1}*(1-gamma_k).
/// The first entry of `gammas` is not used.
inline std::vector<double> gamma_sequence_product(const std::vector<double>& gammas) {
  require(!gammas.empty(), "gamma_sequence_product: empty input");
  std::vector<double> out(gammas.size());
  out[0] = 1.0;
  for (size_t k = 1; k < gammas.size(); ++k) {
    out[k] = out[k - 1] * (1.0 - gammas[k]);
  }
  return out;
}

/// Upper bound G_K * sum_i (gamma_i/G_i) * b_i on the final term of the
/// recurrence a_k <= (1-gamma_k) a_{k-1} + gamma_k b_k. Requires gammas[0] = 1,
/// which makes `a0` drop out; the parameter is kept so call sites mirror the
/// recurrence they are bounding.
///
/// Evaluated as sum_i gamma_i * prod_{j>i}(1-gamma_j) * b_i, which equals the
/// ratio form whenever all G_i > 0 and stays finite when some gamma_k = 1.
inline double telescoping_bound(double a0, const std::vector<double>& bs,
                                const std::vector<double>& gammas) {
  (void)a0;
  require(!gammas.empty() && gammas.size() == bs.size(),
          "telescoping_bound: bs and gammas must be nonempty and equal length");
  require(gammas[0] == 1.0, "telescoping_bound: gammas[0] must be 1");
  for (double g : gammas) require(g >= 0.0 && g <= 1.0, "telescoping_bound: gamma outside [0,1]");
  double bound = 0.0;
  double suffix = 1.0;  // prod_{j>i}(1-gamma_j), built backwards
  for (size_t i = bs.size(); i-- > 0;) {
    bound += gammas[i] * suffix * bs[i];
    suffix *= 1.0 - gammas[i];
  }
  return bound;
}

}  // namespace ucgs
