#include "freeharness/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "freeharness/error.hpp"
#include "gauss_legendre.hpp"
#include "polynomial.hpp"

namespace freeharness {

namespace {

using detail::Poly;

constexpr double kPi = std::numbers::pi;

// Symmetric Jacobi data: diagonal and squared off-diagonal for the levels
// before the constant tail.
struct Levels {
  std::vector<double> diag;
  std::vector<double> lam;
  double tail_b = 0.0;
  double tail_lam = 0.0;
};

Levels levels_of(const EcRecurrence& r) {
  Levels L;
  std::size_t K = r.tail_start();
  for (std::size_t n = 0; n < K; ++n) {
    L.diag.push_back(r.diagonal(n));
    L.lam.push_back(r.offdiag_sq(n));
  }
  L.tail_b = r.tail().b;
  L.tail_lam = r.tail().a * r.tail().c;
  while (K > 0 && L.diag[K - 1] == L.tail_b && L.lam[K - 1] == L.tail_lam) --K;
  L.diag.resize(K);
  L.lam.resize(K);
  return L;
}

void require_admissible(const Levels& L) {
  for (double l : L.lam)
    if (l < 0.0) throw DomainError("recurrence is not Favard-admissible (negative coefficient)");
  if (L.tail_lam < 0.0) throw DomainError("recurrence tail is not Favard-admissible");
}

// Principal-branch product sqrt(w - 2 s) sqrt(w + 2 s): analytic off [-2s, 2s]
// and ~ w at infinity.
Complex branch_root(Complex w, double s) {
  return std::sqrt(w - 2.0 * s) * std::sqrt(w + 2.0 * s);
}

Complex tail_transform(Complex z, double b, double lam) {
  const Complex w = z - b;
  if (lam == 0.0) return 1.0 / w;
  const double s = std::sqrt(lam);
  return (w - branch_root(w, s)) / (2.0 * lam);
}

// Joukowski variable |u| < 1 with z - b = s (u + 1/u).
Complex joukowski(Complex z, double b, double s) {
  const Complex w = z - b;
  return (w - branch_root(w, s)) / (2.0 * s);
}

Quadrature jacobi_block_rule(const std::vector<double>& diag, const std::vector<double>& lam,
                             std::size_t size) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(size));
  Eigen::VectorXd e(static_cast<Eigen::Index>(size > 0 ? size - 1 : 0));
  for (std::size_t i = 0; i < size; ++i) d(static_cast<Eigen::Index>(i)) = diag[i];
  for (std::size_t i = 0; i + 1 < size; ++i) {
    if (lam[i] < 0.0) throw DomainError("recurrence is not Favard-admissible (negative coefficient)");
    e(static_cast<Eigen::Index>(i)) = std::sqrt(lam[i]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw EigenFailure("tridiagonal eigensolver did not converge");
  Quadrature q;
  q.nodes.resize(size);
  q.weights.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    q.nodes[i] = es.eigenvalues()(ii);
    const double v = es.eigenvectors()(0, ii);
    q.weights[i] = v * v;
  }
  return q;
}

Poly trim_leading(Poly p) {
  double big = 0.0;
  for (double c : p) big = std::max(big, std::abs(c));
  while (p.size() > 1 && std::abs(p.back()) <= 1e-13 * big) p.pop_back();
  return p;
}

// Real roots of `p` strictly inside (-1, 1), excluding 0, polished by Newton.
std::vector<double> real_roots_in_unit_interval(const Poly& raw) {
  const Poly p = trim_leading(raw);
  std::vector<double> out;
  const auto deg = static_cast<Eigen::Index>(p.size()) - 1;
  if (deg < 1) return out;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i)
    companion(i, deg - 1) = -p[static_cast<std::size_t>(i)] / p.back();
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  if (es.info() != Eigen::Success) throw EigenFailure("companion eigensolver did not converge");

  const Poly dp = detail::poly_derivative(p);
  for (Eigen::Index i = 0; i < deg; ++i) {
    const Complex ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) > 1e-6 * std::max(1.0, std::abs(ev))) continue;
    double u = ev.real();
    if (std::abs(u) > 1.0 + 1e-6) continue;
    for (int it = 0; it < 40; ++it) {
      const double f = detail::poly_eval(p, u);
      const double df = detail::poly_eval(dp, u);
      if (df == 0.0) break;
      const double step = f / df;
      u -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(u))) break;
    }
    double mag = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k)
      mag += std::abs(p[k]) * std::pow(std::abs(u), static_cast<double>(k));
    if (std::abs(detail::poly_eval(p, u)) > 1e-9 * mag) continue;
    if (!(std::abs(u) < 1.0 - 1e-13) || u == 0.0) continue;
    const bool dup = std::any_of(out.begin(), out.end(),
                                 [u](double v) { return std::abs(v - u) < 1e-10; });
    if (!dup) out.push_back(u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Composite 8-point Gauss-Legendre in the angle variable, bisecting any
// panel whose mass estimate moves under halving.
Quadrature adaptive_panel_rule(const SpectralMeasure& m) {
  auto f = [&m](double th) { return m.angle_weight(th); };
  struct Panel {
    double a, b;
    double whole;
  };
  std::vector<Panel> todo;
  constexpr int kStart = 16;
  constexpr std::size_t kMaxPanels = 1 << 14;
  for (int k = kStart; k-- > 0;) {
    const double a = kPi * k / kStart, b = kPi * (k + 1) / kStart;
    todo.push_back({a, b, detail::gauss_legendre8(f, a, b)});
  }
  std::vector<std::pair<double, double>> accepted;  // panels in increasing angle
  while (!todo.empty()) {
    const Panel p = todo.back();
    todo.pop_back();
    const double mid = 0.5 * (p.a + p.b);
    const double left = detail::gauss_legendre8(f, p.a, mid);
    const double right = detail::gauss_legendre8(f, mid, p.b);
    // |D|^2 near a root just off the circle carries ~1e-12 relative noise
    const double floor = 1e-15 * (p.b - p.a) + 1e-12 * (std::abs(left) + std::abs(right));
    if (std::abs(left + right - p.whole) <= floor || p.b - p.a < 1e-8 ||
        accepted.size() + todo.size() > kMaxPanels) {
      accepted.emplace_back(p.a, mid);
      accepted.emplace_back(mid, p.b);
      continue;
    }
    todo.push_back({mid, p.b, right});
    todo.push_back({p.a, mid, left});
  }
  std::vector<std::pair<double, double>> pts;
  pts.reserve(accepted.size() * 8);
  for (const auto& [a, b] : accepted)
    detail::gauss_legendre8_nodes(a, b, [&](double th, double w) {
      pts.emplace_back(m.center() + m.half_width() * std::cos(th), w * f(th));
    });
  std::sort(pts.begin(), pts.end());
  Quadrature q;
  for (const auto& [x, w] : pts) {
    q.nodes.push_back(x);
    q.weights.push_back(w);
  }
  return q;
}

// n-point Gauss rule of a discrete measure by the Stieltjes procedure.
Quadrature compress(const Quadrature& fine, int n) {
  const std::size_t M = fine.size();
  // near full rank the fine rule is as good and far cheaper
  if (2 * static_cast<std::size_t>(n) > M) return fine;
  const double mass = fine.total_weight();
  if (!(mass > 0.0)) return {};
  // Lanczos in the weighted inner product, fully reorthogonalized: plain
  // Stieltjes loses orthogonality once n is a sizeable fraction of M
  const std::size_t N = static_cast<std::size_t>(n);
  std::vector<std::vector<double>> basis;
  basis.reserve(N);
  basis.emplace_back(M, 1.0 / std::sqrt(mass));
  std::vector<double> diag(N), lam(N, 0.0), next(M);
  auto dot = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < M; ++i) acc += fine.weights[i] * u[i] * v[i];
    return acc;
  };
  for (std::size_t k = 0; k < N; ++k) {
    const auto& cur = basis[k];
    for (std::size_t i = 0; i < M; ++i) next[i] = fine.nodes[i] * cur[i];
    diag[k] = dot(next, cur);
    if (k + 1 == N) break;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double c = dot(next, q);
        for (std::size_t i = 0; i < M; ++i) next[i] -= c * q[i];
      }
    }
    const double norm = std::sqrt(dot(next, next));
    if (!(norm > 1e-12 * (std::abs(diag[k]) + 1.0))) {
      // invariant subspace reached: the fine rule has fewer effective nodes
      diag.resize(k + 1);
      break;
    }
    lam[k] = norm * norm;
    for (double& v : next) v /= norm;
    basis.push_back(next);
  }
  Quadrature q = jacobi_block_rule(diag, lam, diag.size());
  for (double& w : q.weights) w *= mass;
  return q;
}

constexpr double kAtomThreshold = 1e-12;
constexpr double kMassTolerance = 1e-6;

}  // namespace

double Quadrature::total_weight() const noexcept {
  double acc = 0.0;
  for (double w : weights) acc += w;
  return acc;
}

double Quadrature::moment(int k) const {
  return integrate([k](double x) { return std::pow(x, k); });
}

Complex cauchy_cf(const EcRecurrence& r, Complex z) {
  const Levels L = levels_of(r);
  if (z.imag() == 0.0 && L.tail_lam > 0.0) {
    const double s = std::sqrt(L.tail_lam);
    if (std::abs(z.real() - L.tail_b) <= 2.0 * s)
      throw NearSupport("Cauchy transform requested on the absolutely continuous support");
  }
  Complex g = tail_transform(z, L.tail_b, L.tail_lam);
  for (std::size_t k = L.diag.size(); k-- > 0;) {
    const Complex den = z - L.diag[k] - L.lam[k] * g;
    if (std::abs(den) == 0.0 || !std::isfinite(std::abs(den)))
      throw NearSupport("continued fraction denominator vanished");
    g = 1.0 / den;
  }
  if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
    throw NearSupport("continued fraction overflow near the support");
  return g;
}

Complex cauchy_closed_form(const HarnessParams& p, double t, Complex z) {
  validate(p);
  const auto [alpha, beta] = derive_alpha_beta(p);
  const double a = 1.0 - p.sigma * p.tau;
  const double b = (alpha + p.sigma * beta) * t + beta + alpha * p.tau;
  const double c = (1.0 + p.sigma * t) * (t + p.tau) * (1.0 + alpha * beta);
  const double rc = std::sqrt(c);
  const Complex root = a * std::sqrt(z - (b + 2.0 * rc) / a) * std::sqrt(z - (b - 2.0 * rc) / a);
  const Complex P = p.sigma * z * z + p.eta * z + 1.0;
  const Complex Q = p.tau * z * z + p.theta * t * z + t * t;
  const double az = std::abs(z);
  const double scale = (p.sigma * az * az + std::abs(p.eta) * az + 1.0) *
                       (p.tau * az * az + std::abs(p.theta) * t * az + t * t);
  if (std::abs(P * Q) <= 1e-13 * scale) throw PoleHit("closed-form transform evaluated at a pole");
  return (p.tau * z + p.theta * t) / Q +
         t * ((1.0 + p.sigma * p.tau + 2.0 * p.sigma * t) * z + t * p.eta - p.theta) /
             (2.0 * P * Q) -
         t * root / (2.0 * P * Q);
}

CauchyTransform CauchyTransform::continued_fraction(EcRecurrence r) {
  return {[rec = std::move(r)](Complex z) { return cauchy_cf(rec, z); },
          Provenance::ContinuedFraction};
}

CauchyTransform CauchyTransform::closed_form(const HarnessParams& p, double t) {
  validate(p);
  return {[p, t](Complex z) { return cauchy_closed_form(p, t, z); }, Provenance::ClosedForm};
}

Interval support_endpoints(const HarnessParams& p, double t) {
  validate(p);
  if (!(t > 0.0)) throw DomainError("support endpoints need t > 0");
  const auto [alpha, beta] = derive_alpha_beta(p);
  const double a = 1.0 - p.sigma * p.tau;
  const double b = (alpha + p.sigma * beta) * t + beta + p.tau * alpha;
  const double radicand = (1.0 + p.sigma * t) * (t + p.tau) * (1.0 + alpha * beta);
  const double r = 2.0 * std::sqrt(std::max(radicand, 0.0));
  return {(b - r) / a, (b + r) / a};
}

std::vector<double> real_quadratic_roots(double a, double b, double c) {
  if (a == 0.0) {
    if (b == 0.0) return {};
    return {-c / b};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {};
  if (disc == 0.0) return {-b / (2.0 * a)};
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double r1 = q / a;
  double r2 = c / q;
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2};
}

std::vector<double> atom_candidates(const HarnessParams& p, double t) {
  validate(p);
  std::vector<double> out = real_quadratic_roots(p.sigma, p.eta, 1.0);
  const auto c = real_quadratic_roots(p.tau, p.theta * t, t * t);
  out.insert(out.end(), c.begin(), c.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double x, double y) {
                          return std::abs(x - y) <= 1e-14 * std::max(1.0, std::abs(x));
                        }),
            out.end());
  return out;
}

namespace {

double gap_root(const HarnessParams& p) {
  validate(p);
  const double disc = p.eta * p.eta - 4.0 * p.sigma;
  if (!(p.sigma > 0.0) || !(disc > 0.0)) throw DomainError("no gap: needs eta^2 > 4 sigma > 0");
  return std::sqrt(disc);
}

double theta_root(const HarnessParams& p) {
  gap_root(p);
  if (!(p.eta > 0.0 && p.theta > 0.0)) throw DomainError("moving atom needs eta, theta > 0");
  const double disc = p.theta * p.theta - 4.0 * p.tau;
  if (disc < 0.0) throw DomainError("moving atom needs theta^2 >= 4 tau");
  return std::sqrt(disc);
}

double positive_part(double a) { return 0.5 * (a + std::abs(a)); }

}  // namespace

Interval spectral_gap(const HarnessParams& p) {
  const double r = gap_root(p);
  return {(-p.eta - r) / (2.0 * p.sigma), (-p.eta + r) / (2.0 * p.sigma)};
}

double gap_touch_time(const HarnessParams& p) {
  const double r = gap_root(p);
  const auto [alpha, beta] = derive_alpha_beta(p);
  const double st = p.sigma * p.tau;
  return (alpha + p.sigma * beta) * (1.0 - st) / (2.0 * p.sigma * r) - (1.0 + st) / (2.0 * p.sigma);
}

double moving_atom_location(const HarnessParams& p, double t) {
  const double r = theta_root(p);
  if (p.tau == 0.0) return -t / p.theta;
  return -t * (p.theta - r) / (2.0 * p.tau);
}

double silent_atom_location(const HarnessParams& p, double t) {
  const double r = theta_root(p);
  if (p.tau == 0.0) throw DomainError("only one moving atom when tau = 0");
  return -t * (p.theta + r) / (2.0 * p.tau);
}

double moving_atom_weight(const HarnessParams& p, double t) {
  const double r = theta_root(p);
  const double re = gap_root(p);
  const double s = p.sigma, tau = p.tau, eta = p.eta, th = p.theta;
  if (tau == 0.0) {
    const Interval b = spectral_gap(p);
    const double num = positive_part(-t * (t * (1.0 + eta * th) - th * th));
    if (num == 0.0) return 0.0;
    // no factor 2 in the denominator: the weight must tend to 1 as t -> 0
    return num / (s * th * th * t * (t / th + b.lo) * (t / th + b.hi));
  }
  const double num =
      2.0 * tau * positive_part(-t * (2.0 * eta * tau + (1.0 + s * tau) * (th - r)) + 2.0 * tau * r);
  if (num == 0.0) return 0.0;
  const double den = s * r * (th - r) * (th - r) * (t - (th + r) / (eta - re)) *
                     (t - (th + r) / (eta + re));
  return num / den;
}

double moving_atom_cutoff(const HarnessParams& p) {
  const double r = theta_root(p);
  if (p.tau == 0.0) return p.theta * p.theta / (1.0 + p.eta * p.theta);
  return 2.0 * p.tau * r / ((p.theta - r) * (1.0 + p.sigma * p.tau) + 2.0 * p.eta * p.tau);
}

double numeric_residue(const CauchyTransform& g, double c, double radius, int points) {
  Complex acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const double phi = 2.0 * kPi * (k + 0.5) / points;
    const Complex dz = radius * Complex(std::cos(phi), std::sin(phi));
    acc += g(c + dz) * dz;
  }
  return acc.real() / points;
}

std::vector<Atom> atom_weights(const CauchyTransform& g, std::span<const double> candidates,
                               const Interval& ac, double threshold) {
  std::vector<Atom> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double c = candidates[i];
    if (ac.contains(c)) continue;
    double radius = 0.5 * std::min(std::abs(c - ac.lo), std::abs(c - ac.hi));
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      const double d = std::abs(candidates[j] - c);
      if (j != i && d > 0.0) radius = std::min(radius, 0.5 * d);
    }
    radius = std::min(radius, 1.0);
    if (!(radius > 1e-12 * std::max(1.0, std::abs(c)))) continue;
    const double w = numeric_residue(g, c, radius);
    if (w > threshold) out.push_back({c, w});
  }
  return out;
}

SpectralMeasure SpectralMeasure::point_mass(double x) {
  SpectralMeasure m;
  m.atoms_.push_back({x, 1.0});
  return m;
}

// With u = exp(-i angle) and real N, D:
//   -Im G / pi = sum_m a_m sin(m angle) / (pi |D(u)|^2),
// a_m collecting n_j d_k over j - k = m minus those over k - j = m. Summing
// sines directly avoids the cancellation in Im(N(u) conj D(u)) near the ends.
double SpectralMeasure::sine_series(double angle) const {
  double acc = 0.0;
  for (std::size_t m = 1; m < sine_coef_.size(); ++m)
    acc += sine_coef_[m] * std::sin(static_cast<double>(m) * angle);
  return acc;
}

double SpectralMeasure::density_at_angle(double angle) const {
  if (!has_ac_) return 0.0;
  const Complex u(std::cos(angle), -std::sin(angle));
  const double d2 = std::norm(detail::poly_eval(den_, u));
  if (d2 == 0.0) return 0.0;
  return std::max(0.0, sine_series(angle) / (kPi * d2));
}

double SpectralMeasure::density(double x) const {
  if (!has_ac_ || !(x > interval_.lo && x < interval_.hi)) return 0.0;
  const double c = std::clamp((x - center_) / half_width_, -1.0, 1.0);
  return density_at_angle(std::acos(c));
}

Complex SpectralMeasure::cauchy(Complex z) const {
  if (!has_ac_) {
    Complex acc = 0.0;
    for (const auto& a : atoms_) acc += a.weight / (z - a.location);
    return acc;
  }
  const Complex u = joukowski(z, center_, sqrt_tail_);
  return detail::poly_eval(num_, u) / detail::poly_eval(den_, u);
}

double SpectralMeasure::angle_weight(double angle) const {
  if (!has_ac_) return 0.0;
  // Right at 0 or pi a pole of G on the endpoint turns this into 0/0 (sin(pi)
  // is not exactly zero), so endpoints use the one-sided limit. Without such
  // a pole the clamped value is O(1e-14).
  const double a = std::clamp(angle, 1e-7, kPi - 1e-7);
  const Complex u(std::cos(a), -std::sin(a));
  const double d2 = std::norm(detail::poly_eval(den_, u));
  if (d2 == 0.0) return 0.0;
  return std::max(0.0, half_width_ * std::sin(a) * sine_series(a) / (kPi * d2));
}

double SpectralMeasure::ac_mass(int nodes) const {
  if (!has_ac_) return 0.0;
  const double h = kPi / (nodes + 1);
  double acc = 0.5 * (angle_weight(0.0) + angle_weight(kPi));
  for (int j = 1; j <= nodes; ++j) acc += angle_weight(j * h);
  return acc * h;
}

double SpectralMeasure::atom_mass() const noexcept {
  double acc = 0.0;
  for (const auto& a : atoms_) acc += a.weight;
  return acc;
}

Quadrature SpectralMeasure::gauss_rule(int n) const {
  if (n < 1) throw DomainError("Gauss rule needs n >= 1");
  Quadrature q = has_ac_ ? compress(panel_rule_, n) : Quadrature{};
  for (const auto& a : atoms_) {
    q.nodes.push_back(a.location);
    q.weights.push_back(a.weight);
  }
  return q;
}

Quadrature SpectralMeasure::discretize(int ac_nodes) const {
  std::vector<std::pair<double, double>> pts;
  for (const auto& a : atoms_) pts.emplace_back(a.location, a.weight);
  if (has_ac_) {
    const double h = kPi / (ac_nodes + 1);
    for (int j = ac_nodes + 1; j >= 0; --j) {
      const double th = j * h;
      double w = angle_weight(th) * h;
      if (j == 0 || j == ac_nodes + 1) w *= 0.5;
      if (w > 0.0) pts.emplace_back(center_ + half_width_ * std::cos(th), w);
    }
  }
  std::sort(pts.begin(), pts.end());
  Quadrature q;
  q.nodes.reserve(pts.size());
  q.weights.reserve(pts.size());
  for (const auto& [x, w] : pts) {
    q.nodes.push_back(x);
    q.weights.push_back(w);
  }
  return q;
}

SpectralMeasure build_measure(const EcRecurrence& r) {
  const Levels L = levels_of(r);
  require_admissible(L);

  SpectralMeasure m;
  // A vanishing coefficient decouples the Jacobi matrix: finitely many atoms.
  std::size_t finite = 0;
  for (std::size_t n = 0; n < L.lam.size() && finite == 0; ++n)
    if (L.lam[n] == 0.0) finite = n + 1;
  if (finite == 0 && L.tail_lam == 0.0) finite = L.diag.size() + 1;
  if (finite > 0) {
    std::vector<double> diag = L.diag;
    diag.resize(std::max(diag.size(), finite), L.tail_b);
    const Quadrature q = jacobi_block_rule(diag, L.lam, finite);
    for (std::size_t i = 0; i < q.size(); ++i)
      if (q.weights[i] > kAtomThreshold) m.atoms_.push_back({q.nodes[i], q.weights[i]});
    return m;
  }

  const double s = std::sqrt(L.tail_lam);
  m.has_ac_ = true;
  m.center_ = L.tail_b;
  m.sqrt_tail_ = s;
  m.half_width_ = 2.0 * s;
  m.interval_ = {L.tail_b - 2.0 * s, L.tail_b + 2.0 * s};

  // G_K = u/s; G_k = u D_{k+1} / (Z_k D_{k+1} - l_k u N_{k+1}) with
  // Z_k = s (1 + u^2) + (b - b_k) u.
  Poly num{0.0, 1.0};
  Poly den{s};
  for (std::size_t k = L.diag.size(); k-- > 0;) {
    const Poly z{s, L.tail_b - L.diag[k], s};
    Poly next_num = detail::poly_shift(den);
    Poly next_den = detail::poly_axpy(-L.lam[k], detail::poly_shift(num), detail::poly_mul(z, den));
    num = std::move(next_num);
    den = std::move(next_den);
  }
  m.num_ = num;
  m.den_ = den;
  m.sine_coef_.assign(num.size() + den.size(), 0.0);
  for (std::size_t j = 0; j < num.size(); ++j)
    for (std::size_t k = 0; k < den.size(); ++k) {
      if (j > k) m.sine_coef_[j - k] += num[j] * den[k];
      if (k > j) m.sine_coef_[k - j] -= num[j] * den[k];
    }

  const Poly dden = detail::poly_derivative(trim_leading(den));
  for (double u : real_roots_in_unit_interval(den)) {
    const double location = L.tail_b + s * (u + 1.0 / u);
    const double weight =
        detail::poly_eval(num, u) * s * (1.0 - 1.0 / (u * u)) / detail::poly_eval(dden, u);
    if (weight > kAtomThreshold) m.atoms_.push_back({location, weight});
  }
  std::sort(m.atoms_.begin(), m.atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });

  m.panel_rule_ = adaptive_panel_rule(m);
  const double mass = m.panel_rule_.total_weight();
  const double total = mass + m.atom_mass();
  if (!(std::abs(total - 1.0) <= kMassTolerance)) {
    std::ostringstream msg;
    msg << "reconstructed measure has total mass " << total;
    throw MassDefect(msg.str());
  }
  return m;
}

double density_closed_form(const HarnessParams& p, double t, double x) {
  validate(p);
  const Interval iv = support_endpoints(p, t);
  if (!(x > iv.lo && x < iv.hi)) return 0.0;
  const double a = 1.0 - p.sigma * p.tau;
  const double P = p.sigma * x * x + p.eta * x + 1.0;
  const double Q = p.tau * x * x + p.theta * t * x + t * t;
  if (P * Q == 0.0) throw PoleHit("closed-form density evaluated at a pole");
  return t * a * std::sqrt((iv.hi - x) * (x - iv.lo)) / (2.0 * kPi * P * Q);
}

Quadrature gauss_quadrature(const EcRecurrence& r, int N) {
  if (N < 1) throw DomainError("Gauss rule needs N >= 1");
  std::vector<double> diag(static_cast<std::size_t>(N));
  std::vector<double> lam(static_cast<std::size_t>(N));
  for (std::size_t n = 0; n < diag.size(); ++n) {
    diag[n] = r.diagonal(n);
    lam[n] = r.offdiag_sq(n);
  }
  return jacobi_block_rule(diag, lam, diag.size());
}

double moment_oracle(const EcRecurrence& r, int k) {
  if (k < 0) throw DomainError("moment degree must be >= 0");
  // v <- T v with T_{n,n} = b_n, T_{n,n+1} = l_n, T_{n+1,n} = 1; m_k = (T^k e_0)_0.
  std::vector<double> v(static_cast<std::size_t>(k) + 2, 0.0);
  std::vector<double> w(v.size(), 0.0);
  v[0] = 1.0;
  for (int step = 0; step < k; ++step) {
    const std::size_t reach = static_cast<std::size_t>(std::min(step + 1, k - step));
    for (std::size_t n = 0; n <= reach; ++n) {
      double acc = r.diagonal(n) * v[n] + r.offdiag_sq(n) * v[n + 1];
      if (n > 0) acc += v[n - 1];
      w[n] = acc;
    }
    for (std::size_t n = reach + 1; n < w.size(); ++n) w[n] = 0.0;
    std::swap(v, w);
  }
  return v[0];
}

}  // namespace freeharness
