#pragma once

#include <Eigen/Dense>

#include "freeharness/params.hpp"
#include "freeharness/report.hpp"

namespace freeharness {

/// Truncated matrix of an operator on formal series sum g_n z^n, acting on
/// the coefficient vector (g_0, ..., g_{N-1}).
struct BandedOperator {
  enum class Label { D, Z, I, X, Y, Xt, Other };

  Eigen::MatrixXd m;
  Label label = Label::Other;

  [[nodiscard]] Eigen::Index dim() const noexcept { return m.rows(); }
};

/// Rows/columns near the truncation edge that products may corrupt.
inline constexpr int kSafeMargin = 4;

/// (D g)(z) = (g(z) - g(0))/z: ones on the first superdiagonal.
[[nodiscard]] BandedOperator d_operator(int N);
/// (Z g)(z) = z g(z): ones on the first subdiagonal.
[[nodiscard]] BandedOperator z_operator(int N);

struct OperatorPair {
  BandedOperator x;
  BandedOperator y;
};

/// x and y as sums of Z^i D^j with the harness coefficients. N >= 8.
[[nodiscard]] OperatorPair build_xy(const HarnessParams& p, int N);

/// X_t = x + t y.
[[nodiscard]] BandedOperator x_t(const OperatorPair& xy, double t);

/// xy - gamma yx - (sigma x^2 + tau y^2 + eta x + theta y + I) on the leading
/// (N-4) block. Residuals of the operator checks are entrywise, divided by
/// max(1, sum of the absolute terms at that entry).
[[nodiscard]] CheckReport check_q_commutation(const HarnessParams& p, int N,
                                              double tolerance = 1e-11);
[[nodiscard]] CheckReport check_q_commutation(const HarnessParams& p, const OperatorPair& xy,
                                              double tolerance = 1e-11);

/// X_t^2 against A X_s^2 + B X_u X_s + C X_u^2 + D X_s + E X_u + F on the
/// leading (N-4) block, s <= t <= u with s < u.
[[nodiscard]] CheckReport check_quadratic_form(const HarnessParams& p, double s, double t,
                                               double u, int N, double tolerance = 1e-10);
[[nodiscard]] CheckReport check_quadratic_form(const HarnessParams& p, const OperatorPair& xy,
                                               double s, double t, double u,
                                               double tolerance = 1e-10);

/// Row n of X_t must be (C_n, B_n, A_n) in columns (n-1, n, n+1), the
/// martingale recurrence at time t, and zero elsewhere; rows n < N-4.
/// Entry errors are relative to max(1, |expected|).
[[nodiscard]] CheckReport check_recurrence_encoding(const HarnessParams& p, double t, int N,
                                                    double tolerance = 1e-12);
[[nodiscard]] CheckReport check_recurrence_encoding(const HarnessParams& p, double t,
                                                    const Eigen::MatrixXd& xt,
                                                    double tolerance = 1e-12);

struct RegressionCoeffs {
  double a = 0.0;
  double b = 0.0;
};

/// a = (u-t)/(u-s), b = (t-s)/(u-s).
[[nodiscard]] RegressionCoeffs regression_coeffs(double s, double t, double u);

struct QuadraticFormCoeffs {
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0, E = 0.0, F = 0.0;
};

/// Coefficients of the conditional second moment with gamma = -sigma tau.
/// Requires s <= t <= u and s < u.
[[nodiscard]] QuadraticFormCoeffs quadratic_coeffs(const HarnessParams& p, double s, double t,
                                                   double u);

}  // namespace freeharness
