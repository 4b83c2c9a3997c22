#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "freeharness/params.hpp"
#include "freeharness/recurrence.hpp"

namespace freeharness {

using Complex = std::complex<double>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double width() const noexcept { return hi - lo; }
  [[nodiscard]] bool contains(double x, double slack = 0.0) const noexcept {
    return x >= lo - slack && x <= hi + slack;
  }
};

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

/// Nodes and nonnegative weights of a discrete measure.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
  [[nodiscard]] double total_weight() const noexcept;
  /// Sum of w_i f(x_i).
  template <typename F>
  [[nodiscard]] double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
  [[nodiscard]] double moment(int k) const;
};

/// G(z) = 1/(z - b_0 - l_0/(z - b_1 - ... - l_{K-1} g(z))), closed by the
/// fixed point g of the constant tail, with the branch fixed by i y G(i y) -> 1.
/// Throws NearSupport on the real support or when a partial denominator vanishes.
[[nodiscard]] Complex cauchy_cf(const EcRecurrence& r, Complex z);

/// Three-term closed form of the Cauchy transform of pi_t.
/// Throws PoleHit at zeros of (sigma z^2+eta z+1)(tau z^2+theta t z+t^2).
[[nodiscard]] Complex cauchy_closed_form(const HarnessParams& p, double t, Complex z);

/// Cauchy transform with a record of how it is evaluated.
class CauchyTransform {
 public:
  enum class Provenance { ContinuedFraction, ClosedForm };

  static CauchyTransform continued_fraction(EcRecurrence r);
  static CauchyTransform closed_form(const HarnessParams& p, double t);

  [[nodiscard]] Complex operator()(Complex z) const { return eval_(z); }
  [[nodiscard]] Provenance provenance() const noexcept { return provenance_; }

 private:
  CauchyTransform(std::function<Complex(Complex)> f, Provenance p)
      : eval_(std::move(f)), provenance_(p) {}

  std::function<Complex(Complex)> eval_;
  Provenance provenance_;
};

/// Endpoints a-(t) < a+(t) of the absolutely continuous part of pi_t.
[[nodiscard]] Interval support_endpoints(const HarnessParams& p, double t);

/// Real roots of a z^2 + b z + c, ascending. A zero leading coefficient
/// degrades to the linear case; 0, 1 or 2 roots are returned.
[[nodiscard]] std::vector<double> real_quadratic_roots(double a, double b, double c);

/// Real zeros of (sigma z^2+eta z+1)(tau z^2+theta t z+t^2): the only places
/// pi_t can carry atoms. Ascending, duplicates removed.
[[nodiscard]] std::vector<double> atom_candidates(const HarnessParams& p, double t);

/// Closed forms for parameter sets with eta^2 > 4 sigma > 0, where U has a
/// gap. All throw DomainError outside that regime.
///
/// The excluded interval (b-, b+) between the roots of sigma z^2 + eta z + 1.
[[nodiscard]] Interval spectral_gap(const HarnessParams& p);
/// Time at which a-(t) touches b+ (the minimum of a-).
[[nodiscard]] double gap_touch_time(const HarnessParams& p);

/// The moving atom c-(t) = -t (theta - sqrt(theta^2 - 4 tau)) / (2 tau), or
/// -t/theta when tau = 0. Needs eta, theta > 0 and theta^2 >= 4 tau.
[[nodiscard]] double moving_atom_location(const HarnessParams& p, double t);
/// Its weight from the residue formula, zero from the cutoff time on.
[[nodiscard]] double moving_atom_weight(const HarnessParams& p, double t);
/// Last time the moving atom carries mass.
[[nodiscard]] double moving_atom_cutoff(const HarnessParams& p);
/// The other root c+(t) (tau > 0), whose residue vanishes identically.
[[nodiscard]] double silent_atom_location(const HarnessParams& p, double t);

/// (1/2 pi i) of the contour integral of G over a circle of the given radius
/// around c (trapezoid rule, `points` nodes).
[[nodiscard]] double numeric_residue(const CauchyTransform& g, double c, double radius,
                                     int points = 64);

/// Residues of G at the candidates lying outside the closed interval `ac`.
/// Candidates on or inside the interval, and residues below `threshold`,
/// are not atoms and are dropped.
[[nodiscard]] std::vector<Atom> atom_weights(const CauchyTransform& g,
                                             std::span<const double> candidates,
                                             const Interval& ac, double threshold = 1e-12);

/// Orthogonality measure of an eventually constant recurrence: a density on
/// the tail interval plus finitely many atoms outside it.
class SpectralMeasure {
 public:
  /// Dirac mass at x.
  static SpectralMeasure point_mass(double x);

  [[nodiscard]] bool has_ac() const noexcept { return has_ac_; }
  /// Tail interval [b - 2 sqrt(l), b + 2 sqrt(l)]; empty when !has_ac().
  [[nodiscard]] Interval ac_interval() const noexcept { return interval_; }
  [[nodiscard]] const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  /// Density of the absolutely continuous part; zero outside ac_interval().
  [[nodiscard]] double density(double x) const;
  /// Density in the angle parametrization x = center + half_width cos(angle).
  [[nodiscard]] double density_at_angle(double angle) const;
  /// density * |dx/d(angle)|, with one-sided limits at 0 and pi.
  [[nodiscard]] double angle_weight(double angle) const;
  /// Cauchy transform evaluated through the rational form in the Joukowski variable.
  [[nodiscard]] Complex cauchy(Complex z) const;

  /// Mass of the absolutely continuous part using `nodes` angle nodes.
  [[nodiscard]] double ac_mass(int nodes) const;
  [[nodiscard]] double atom_mass() const noexcept;

  /// Composite 8-point Gauss-Legendre rule for the ac part on angle panels,
  /// bisected until each panel's mass is stable to about 1e-12 relative.
  /// Nodes lie inside ac_interval(); weights sum to the ac mass.
  [[nodiscard]] const Quadrature& ac_panel_rule() const noexcept { return panel_rule_; }

  /// Atoms plus an n-point Gauss rule of the ac part, obtained from
  /// ac_panel_rule() by reorthogonalized Lanczos. Exact (to the panel rule's
  /// accuracy) for polynomials of degree < 2n, with every node inside the
  /// support. When 2n exceeds the panel node count the panel rule is returned.
  [[nodiscard]] Quadrature gauss_rule(int n) const;

  /// Atoms plus the trapezoid rule in the angle variable with `ac_nodes`
  /// interior nodes; endpoints enter only when the density blows up there.
  [[nodiscard]] Quadrature discretize(int ac_nodes) const;

  [[nodiscard]] double center() const noexcept { return center_; }
  [[nodiscard]] double half_width() const noexcept { return half_width_; }

 private:
  friend SpectralMeasure build_measure(const EcRecurrence& r);

  [[nodiscard]] double sine_series(double angle) const;

  bool has_ac_ = false;
  Interval interval_;
  double center_ = 0.0;
  double half_width_ = 0.0;
  double sqrt_tail_ = 0.0;
  std::vector<double> num_;  // G = num(u)/den(u) with z - center = sqrt_tail (u + 1/u)
  std::vector<double> den_;
  std::vector<Atom> atoms_;
  std::vector<double> sine_coef_;
  Quadrature panel_rule_;
};

/// Builds the measure of a Favard-admissible recurrence. Throws DomainError
/// for negative coefficients and MassDefect if |total mass - 1| > 1e-6.
[[nodiscard]] SpectralMeasure build_measure(const EcRecurrence& r);

/// Density of pi_t from the closed-form transform.
[[nodiscard]] double density_closed_form(const HarnessParams& p, double t, double x);

/// Golub-Welsch rule with N nodes from the symmetrized Jacobi matrix.
/// Throws EigenFailure if the tridiagonal eigensolver does not converge.
[[nodiscard]] Quadrature gauss_quadrature(const EcRecurrence& r, int N);

/// k-th moment as the (0,0) entry of the k-th power of the Jacobi matrix.
/// Defined for any recurrence, admissible or not.
[[nodiscard]] double moment_oracle(const EcRecurrence& r, int k);

}  // namespace freeharness
