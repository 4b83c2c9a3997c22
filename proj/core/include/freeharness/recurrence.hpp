#pragma once

#include <cstddef>
#include <vector>

#include "freeharness/params.hpp"
#include "freeharness/report.hpp"

namespace freeharness {

/// One row of  y q_n = a q_{n+1} + b q_n + c q_{n-1}.
struct RecurrenceRow {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;

  friend bool operator==(const RecurrenceRow&, const RecurrenceRow&) = default;
};

/// Three-term recurrence with a finite prefix and a constant tail (the
/// Bernstein-Szego shape). Rows are stored as given, not in monic
/// or orthonormal form.
class EcRecurrence {
 public:
  EcRecurrence(std::vector<RecurrenceRow> prefix, RecurrenceRow tail);

  [[nodiscard]] const RecurrenceRow& row(std::size_t n) const noexcept {
    return n < prefix_.size() ? prefix_[n] : tail_;
  }
  [[nodiscard]] std::size_t tail_start() const noexcept { return prefix_.size(); }
  [[nodiscard]] const std::vector<RecurrenceRow>& prefix() const noexcept { return prefix_; }
  [[nodiscard]] const RecurrenceRow& tail() const noexcept { return tail_; }

  /// Diagonal entry of the Jacobi matrix at level n.
  [[nodiscard]] double diagonal(std::size_t n) const noexcept { return row(n).b; }
  /// Squared off-diagonal entry between levels n and n+1: a_n c_{n+1}.
  [[nodiscard]] double offdiag_sq(std::size_t n) const noexcept {
    return row(n).a * row(n + 1).c;
  }

  /// c_n >= 0 for every n >= 1, i.e. a positive orthogonality measure exists.
  [[nodiscard]] bool favard_admissible() const noexcept;

  friend bool operator==(const EcRecurrence&, const EcRecurrence&) = default;

 private:
  std::vector<RecurrenceRow> prefix_;
  RecurrenceRow tail_;
};

/// Recurrence of the orthogonal martingale polynomials p_n(y;t), t > 0.
[[nodiscard]] EcRecurrence martingale_recurrence(const HarnessParams& p, double t);

/// Recurrence of the conditional polynomials Q_n(y;x,t,s), 0 <= s <= t.
/// Throws DomainError when the level-one coefficient
/// (t-s)(1+eta x+sigma x^2)/(1+sigma s) is negative.
[[nodiscard]] EcRecurrence conditional_recurrence(const HarnessParams& p, double s, double x,
                                                  double t);

/// Same coefficients as conditional_recurrence with no domain checks; any
/// real t is allowed. Used for polynomial identities such as c_n = Q_n(0;x,0,s).
[[nodiscard]] EcRecurrence conditional_coefficients(const HarnessParams& p, double s, double x,
                                                    double t);

/// q_0(y), ..., q_{n_max}(y) by forward recurrence.
[[nodiscard]] std::vector<double> eval_polys(const EcRecurrence& r, double y, int n_max);

/// Jacobi entries linear in t:
///   a_n = sigma*alpha[n+1]*t + beta[n+1],
///   b_n = gamma[n]*t + delta[n],
///   c_n = epsilon[n]*t + phi[n].
/// Vectors are indexed by level and hold at least n_max + 2 entries.
struct LinearJacobi {
  std::vector<double> alpha, beta, gamma, delta, epsilon, phi;

  [[nodiscard]] std::size_t levels() const noexcept { return alpha.size(); }
};

/// Reads the linear-in-t coefficients off martingale_recurrence by evaluating
/// it at t = 0 and t = 1. With sigma = 0 the alpha_n are not determined and
/// are set to zero.
[[nodiscard]] LinearJacobi linear_jacobi_martingale(const HarnessParams& p, int n_max);

/// Same for the conditional recurrence with starting point x at time r.
[[nodiscard]] LinearJacobi linear_jacobi_conditional(const HarnessParams& p, double x, double r,
                                                     int n_max);

struct InitialCondition {
  bool conditional = false;
  double x = 0.0;
  double r = 0.0;

  static InitialCondition process() { return {}; }
  static InitialCondition at(double x, double r) { return {true, x, r}; }
};

/// Residuals of the five coefficient relations for 1 <= n <= n_max plus the
/// initial values. Context lists each relation's residual and the violated ones.
[[nodiscard]] CheckReport verify_coefficient_relations(const LinearJacobi& j,
                                                       const HarnessParams& p,
                                                       const InitialCondition& init, int n_max,
                                                       double tolerance = 1e-10);

/// Connection coefficients with b[0] = c[0] = 1, length N + 1.
struct ConnectionCoeffs {
  std::vector<double> b;
  std::vector<double> c;
};

inline constexpr int kMaxConnectionTerms = 64;

/// b_k from the power series of the rational generating function in z,
/// c_k = Q_k(0; x, 0, s). N is capped at kMaxConnectionTerms.
[[nodiscard]] ConnectionCoeffs connection_coefficients(const HarnessParams& p, double x,
                                                       double s, int N);

/// Q_n(y;x,t,s) = c_n + sum_{k=1}^n b_{n-k} p_k(y;t) for n <= n_max.
[[nodiscard]] CheckReport verify_connection_identity(const HarnessParams& p, double x, double s,
                                                     double t, double y, int n_max,
                                                     double tolerance = 1e-8);

/// Q_n(y;x,t,s) = sum_{k=1}^n b_{n-k} [p_k(y;t) - p_k(x;s)] for 1 <= n <= n_max,
/// together with Q_n(x;x,s,s) = 0.
[[nodiscard]] CheckReport verify_increment_identity(const HarnessParams& p, double x, double s,
                                                    double t, double y, int n_max,
                                                    double tolerance = 1e-8);

}  // namespace freeharness
