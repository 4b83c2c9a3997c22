#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "freeharness/params.hpp"
#include "freeharness/report.hpp"

namespace freeharness {

struct Triple {
  double s = 0.0;
  double t = 0.0;
  double u = 0.0;
};

/// {(0.5,1,2), (1,2,4), (0.25,0.5,0.75)}.
[[nodiscard]] std::vector<Triple> standard_triples();

/// Nested quadrature settings. Outer and middle levels use `order`-point
/// Gauss rules of the measures (plus atoms); the innermost level is a Gauss
/// rule from the recurrence. The integrands are polynomials of low degree, so
/// small orders are already exact up to rounding. The order doubles until successive results agree to `gate`
/// relative to the size of the integrand, up to `max_order`. If the gate is
/// never met the last change is added to the reported residual.
struct NestedOptions {
  int order = 16;
  int max_order = 64;
  int inner_nodes = 16;
  double gate = 1e-9;
};

// The checks below build forward kernels, so `p` must classify without time
// inversion (run_suite reduces parameters first).

[[nodiscard]] CheckReport check_mean(const HarnessParams& p, double t, double tolerance = 1e-10);

/// E[X_s X_t] = min(s,t) through pi_s and P_{s,t}.
[[nodiscard]] CheckReport check_covariance(const HarnessParams& p, double s, double t,
                                           double tolerance = 1e-8,
                                           const NestedOptions& opts = {});

/// E[p_n(X_s;s) X_t p_m(X_u;u)] = a E[p_n X_s p_m] + b E[p_n X_u p_m], relative residual.
[[nodiscard]] CheckReport check_linreg_polynomial(const HarnessParams& p, double s, double t,
                                                  double u, int n, int m,
                                                  double tolerance = 1e-6,
                                                  const NestedOptions& opts = {});

/// E[p_n X_t^2 p_m] = A E[p_n X_s^2 p_m] + B E[p_n X_u X_s p_m] + C E[p_n X_u^2 p_m]
///                    + D E[p_n X_s p_m] + E E[p_n X_u p_m] + F E[p_n p_m].
[[nodiscard]] CheckReport check_quadvar_polynomial(const HarnessParams& p, double s, double t,
                                                   double u, int n, int m,
                                                   double tolerance = 1e-6,
                                                   const NestedOptions& opts = {});

/// Variance of the bridge law of X_t given X_s = x, X_u = yv (density ratio)
/// against the closed-form conditional variance. DomainError if P_{s,t}(x,.)
/// has atoms; BridgeDensityZero if the normalizer underflows.
[[nodiscard]] CheckReport check_condvar_pointwise(const HarnessParams& p, double s, double t,
                                                  double u, double x, double yv,
                                                  double tolerance = 1e-6);

/// Closed-form Var[X_t | X_s = x, X_u = y] with gamma = -sigma tau.
[[nodiscard]] double conditional_variance(const HarnessParams& p, double s, double t, double u,
                                          double x, double y);

enum class Suite { Covariance, Linreg, Quadvar, Condvar, All };

[[nodiscard]] Suite parse_suite(const std::string& name);
[[nodiscard]] std::string to_string(Suite s);

struct SuiteOptions {
  std::vector<Triple> triples = standard_triples();
  int max_degree = 4;
  NestedOptions nested;
};

struct SuiteResult {
  HarnessParams params;
  HarnessParams reduced;
  std::vector<CheckReport> reports;
  /// Grid points left out, with the reason (e.g. atoms on the bridge).
  std::vector<nlohmann::json> skipped;

  [[nodiscard]] bool pass() const noexcept;
};

/// Runs a suite on the reduced parameters of `p`. Grid points are spread
/// over worker threads; reports come back in grid order.
[[nodiscard]] SuiteResult run_suite(const HarnessParams& p, Suite suite,
                                    const SuiteOptions& opts = {});

[[nodiscard]] nlohmann::json to_json(const SuiteResult& r);

}  // namespace freeharness
