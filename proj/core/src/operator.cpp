#include "freeharness/operator.hpp"

#include <algorithm>
#include <cmath>

#include "freeharness/error.hpp"
#include "freeharness/recurrence.hpp"

namespace freeharness {

namespace {

using Eigen::MatrixXd;

int safe_block(Eigen::Index N) { return static_cast<int>(N) - kSafeMargin; }

// Entrywise |r| / max(1, size of the summed terms) on the safe block. Entries
// grow like 1/(1 - sigma tau)^2, so absolute residuals would mostly measure
// rounding in the products.
double block_max(const MatrixXd& r, const MatrixXd& scale) {
  const int k = safe_block(r.rows());
  return (r.topLeftCorner(k, k).cwiseAbs().array() /
          scale.topLeftCorner(k, k).array().max(1.0))
      .maxCoeff();
}

void require_dim(int N) {
  if (N < 8) throw DomainError("operator truncation needs N >= 8");
}

}  // namespace

BandedOperator d_operator(int N) {
  require_dim(N);
  MatrixXd m = MatrixXd::Zero(N, N);
  for (int n = 1; n < N; ++n) m(n - 1, n) = 1.0;
  return {m, BandedOperator::Label::D};
}

BandedOperator z_operator(int N) {
  require_dim(N);
  MatrixXd m = MatrixXd::Zero(N, N);
  for (int n = 1; n < N; ++n) m(n, n - 1) = 1.0;
  return {m, BandedOperator::Label::Z};
}

OperatorPair build_xy(const HarnessParams& p, int N) {
  validate(p);
  const auto [alpha, beta] = derive_alpha_beta(p);
  const double st = p.sigma * p.tau;
  const double d = 1.0 - st;
  const double ab1 = 1.0 + alpha * beta;

  const MatrixXd D = d_operator(N).m;
  const MatrixXd Z = z_operator(N).m;
  const MatrixXd ZD = Z * D;
  const MatrixXd ZZD = Z * ZD;
  const MatrixXd ZDD = ZD * D;
  const MatrixXd ZZDD = Z * ZDD;
  const MatrixXd ZZZDD = Z * ZZDD;

  MatrixXd x = D + beta * ZD + (p.tau * ab1 / d) * ZZD + (p.tau * (alpha + p.sigma * beta) / d) * ZZDD +
               (p.sigma * p.tau * p.tau * ab1 / (d * d)) * ZZZDD;
  MatrixXd y = Z + alpha * ZD + p.sigma * ZDD + (p.sigma * (beta + alpha * p.tau) / d) * ZZDD +
               ((alpha * beta + st) / d) * ZZD + (st * ab1 / (d * d)) * ZZZDD;
  return {{std::move(x), BandedOperator::Label::X}, {std::move(y), BandedOperator::Label::Y}};
}

BandedOperator x_t(const OperatorPair& xy, double t) {
  return {xy.x.m + t * xy.y.m, BandedOperator::Label::Xt};
}

CheckReport check_q_commutation(const HarnessParams& p, int N, double tolerance) {
  return check_q_commutation(p, build_xy(p, N), tolerance);
}

CheckReport check_q_commutation(const HarnessParams& p, const OperatorPair& xy, double tolerance) {
  const MatrixXd& x = xy.x.m;
  const MatrixXd& y = xy.y.m;
  const auto N = x.rows();
  const MatrixXd I = MatrixXd::Identity(N, N);
  const MatrixXd r = x * y - p.gamma() * (y * x) -
                     (p.sigma * (x * x) + p.tau * (y * y) + p.eta * x + p.theta * y + I);
  const MatrixXd ax = x.cwiseAbs(), ay = y.cwiseAbs();
  const MatrixXd scale = (1.0 + std::abs(p.gamma())) * (ax * ay + ay * ax) + p.sigma * (ax * ax) +
                         p.tau * (ay * ay) + std::abs(p.eta) * ax + std::abs(p.theta) * ay + I;
  return CheckReport::make("q_commutation", block_max(r, scale), tolerance,
                           {{"N", N}, {"block", safe_block(N)}});
}

CheckReport check_quadratic_form(const HarnessParams& p, double s, double t, double u, int N,
                                 double tolerance) {
  return check_quadratic_form(p, build_xy(p, N), s, t, u, tolerance);
}

CheckReport check_quadratic_form(const HarnessParams& p, const OperatorPair& xy, double s,
                                 double t, double u, double tolerance) {
  const QuadraticFormCoeffs q = quadratic_coeffs(p, s, t, u);
  const MatrixXd Xs = x_t(xy, s).m;
  const MatrixXd Xt = x_t(xy, t).m;
  const MatrixXd Xu = x_t(xy, u).m;
  const auto N = Xs.rows();
  const MatrixXd r = Xt * Xt - (q.A * (Xs * Xs) + q.B * (Xu * Xs) + q.C * (Xu * Xu) + q.D * Xs +
                                q.E * Xu + q.F * MatrixXd::Identity(N, N));
  const MatrixXd as = Xs.cwiseAbs(), at = Xt.cwiseAbs(), au = Xu.cwiseAbs();
  const MatrixXd scale = at * at + std::abs(q.A) * (as * as) + std::abs(q.B) * (au * as) +
                         std::abs(q.C) * (au * au) + std::abs(q.D) * as + std::abs(q.E) * au +
                         std::abs(q.F) * MatrixXd::Identity(N, N);
  return CheckReport::make("quadratic_form", block_max(r, scale), tolerance,
                           {{"N", N}, {"block", safe_block(N)}, {"s", s}, {"t", t}, {"u", u}});
}

CheckReport check_recurrence_encoding(const HarnessParams& p, double t, int N, double tolerance) {
  return check_recurrence_encoding(p, t, x_t(build_xy(p, N), t).m, tolerance);
}

CheckReport check_recurrence_encoding(const HarnessParams& p, double t,
                                      const Eigen::MatrixXd& xt, double tolerance) {
  if (!(t >= 0.0)) throw DomainError("recurrence encoding needs t >= 0");
  const EcRecurrence rec = conditional_coefficients(p, 0.0, 0.0, t);
  const int k = safe_block(xt.rows());
  MatrixXd expected = MatrixXd::Zero(k, k);
  for (int n = 0; n < k; ++n) {
    const RecurrenceRow& row = rec.row(static_cast<std::size_t>(n));
    if (n > 0) expected(n, n - 1) = row.c;
    expected(n, n) = row.b;
    if (n + 1 < k) expected(n, n + 1) = row.a;
  }
  const double r = ((xt.topLeftCorner(k, k) - expected).cwiseAbs().array() /
                    expected.cwiseAbs().array().max(1.0))
                       .maxCoeff();
  return CheckReport::make("recurrence_encoding", r, tolerance,
                           {{"N", xt.rows()}, {"block", k}, {"t", t}});
}

RegressionCoeffs regression_coeffs(double s, double t, double u) {
  if (!(s < u) || t < s || t > u) throw DomainError("regression coefficients need s <= t <= u, s < u");
  return {(u - t) / (u - s), (t - s) / (u - s)};
}

QuadraticFormCoeffs quadratic_coeffs(const HarnessParams& p, double s, double t, double u) {
  if (!(s < u) || t < s || t > u) throw DomainError("quadratic form needs s <= t <= u, s < u");
  const double g = p.gamma();
  const double den = u * (1.0 + p.sigma * s) + p.tau - g * s;
  const double us = u - s;
  const double ut = u - t;
  const double ts = t - s;
  return {ut * (u * (1.0 + p.sigma * t) + p.tau - g * t) / (us * den),
          ut * ts * (1.0 + g) / (us * den),
          ts * (t * (1.0 + p.sigma * s) + p.tau - g * s) / (us * den),
          ut * ts * (u * p.eta - p.theta) / (us * den),
          ut * ts * (p.theta - s * p.eta) / (us * den),
          ut * ts / den};
}

}  // namespace freeharness
