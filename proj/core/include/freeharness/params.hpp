#pragma once

#include <limits>
#include <string>
#include <vector>

namespace freeharness {

/// The four free parameters of a free quadratic harness. The fifth harness
/// parameter is tied to them: gamma = -sigma*tau.
struct HarnessParams {
  double eta = 0.0;
  double theta = 0.0;
  double sigma = 0.0;
  double tau = 0.0;

  [[nodiscard]] double gamma() const noexcept { return -sigma * tau; }

  friend bool operator==(const HarnessParams&, const HarnessParams&) = default;
};

struct DerivedParams {
  double alpha = 0.0;
  double beta = 0.0;
};

enum class CaseId { Case1 = 1, Case2, Case3, Case4, Case5, Case6 };

enum class Reduction { Negation, TimeInversion };

/// Result of classification. `reduced` is the parameter set obtained by
/// applying `transform_log` in order; it satisfies the conditions of `case_id`.
struct CaseTag {
  CaseId case_id = CaseId::Case6;
  std::vector<Reduction> transform_log;
  HarnessParams reduced;

  [[nodiscard]] bool inverted() const noexcept;
  [[nodiscard]] bool negated() const noexcept;
};

/// The set U carrying the one-dimensional laws. U is the real line with the
/// open interval (excluded_lo, excluded_hi) removed; rays use an infinite end.
struct StateSpace {
  enum class Kind { FullLine, LeftRay, RightRay, GapComplement };

  Kind kind = Kind::FullLine;
  double excluded_lo = 0.0;
  double excluded_hi = 0.0;

  /// Membership of the closure of U, with slack `tol` at the boundary.
  [[nodiscard]] bool contains(double x, double tol = 0.0) const noexcept;
};

/// Throws InvalidParams unless sigma, tau >= 0, sigma*tau < 1 and 1+alpha*beta > 0.
void validate(const HarnessParams& p);

/// alpha = (eta + theta sigma)/(1 - sigma tau), beta = (eta tau + theta)/(1 - sigma tau).
/// Throws InvalidParams when sigma*tau >= 1.
[[nodiscard]] DerivedParams derive_alpha_beta(const HarnessParams& p);

/// Swap (eta, sigma) with (theta, tau): parameters of (t X_{1/t}).
[[nodiscard]] HarnessParams time_invert(const HarnessParams& p) noexcept;

/// Parameters of (-X_t).
[[nodiscard]] HarnessParams negate(const HarnessParams& p) noexcept;

/// Case conditions on an already-reduced parameter set, without transforms.
/// Returns false when none of Cases 1-6 applies directly.
[[nodiscard]] bool direct_case(const HarnessParams& p, CaseId& out);

/// Validate and reduce to one of Cases 1-6 using at most one negation and
/// one time inversion.
[[nodiscard]] CaseTag validate_and_classify(const HarnessParams& p);

[[nodiscard]] StateSpace state_space(const HarnessParams& p);

/// 1 + eta x + sigma x^2, the factor that must be nonnegative for a
/// transition kernel started at x to exist.
[[nodiscard]] inline double start_factor(const HarnessParams& p, double x) noexcept {
  return 1.0 + p.eta * x + p.sigma * x * x;
}

[[nodiscard]] std::string to_string(CaseId c);
[[nodiscard]] std::string to_string(Reduction r);

}  // namespace freeharness
