#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "freeharness/params.hpp"
#include "freeharness/report.hpp"
#include "freeharness/rng.hpp"
#include "freeharness/spectral.hpp"

namespace freeharness {

/// One-dimensional law pi_t: the orthogonality measure of p_n(.;t).
[[nodiscard]] SpectralMeasure law_pi(const HarnessParams& p, double t);

/// P_{s,t}(x, .) for s <= t.
struct TransitionKernel {
  double s = 0.0;
  double t = 0.0;
  double x = 0.0;
  SpectralMeasure measure;
};

/// Whether x is a legal starting point at time s: closure of U (slack 1e-12)
/// and 1 + eta x + sigma x^2 >= -1e-12.
[[nodiscard]] bool admissible_start(const HarnessParams& p, double x);

/// Builds P_{s,t}(x, .). Only parameter sets that classify without time
/// inversion have forward kernels; others raise DomainError, as do s > t
/// and starting points that fail admissible_start.
[[nodiscard]] TransitionKernel transition(const HarnessParams& p, double s, double x, double t);

/// sup |int p_n(y;t) P_{s,t}(x,dy) - p_n(x;s)| over n <= n_max, scaled by
/// the size of the summed terms.
[[nodiscard]] CheckReport check_martingale(const HarnessParams& p, double s, double x, double t,
                                           int n_max = 10, double tolerance = 1e-8);

/// Mass of P_{s,t}(x, .) outside U.
[[nodiscard]] CheckReport check_confinement(const HarnessParams& p, double s, double x, double t,
                                            double tolerance = 1e-8);

/// Moments of P_{s,u}(x,.) against those of the two-step composition through
/// time t, degrees 0..degree. s = 0 with x = 0 compares pi_u with the
/// composition through pi_t.
[[nodiscard]] CheckReport check_chapman_kolmogorov(const HarnessParams& p, double s, double t,
                                                   double u, double x, int degree = 10,
                                                   double tolerance = 1e-7);

/// Tabulated distribution function: the ac part on angle panels (8-point
/// Gauss-Legendre each) with atoms interleaved in x order.
class CdfTable {
 public:
  explicit CdfTable(const SpectralMeasure& m, int panels = 4096);

  /// Right-continuous F(x).
  [[nodiscard]] double cdf(double x) const;
  /// F(x-), differs from cdf(x) at atoms.
  [[nodiscard]] double cdf_left(double x) const;
  /// Smallest x with F(x) >= v (generalized inverse).
  [[nodiscard]] double quantile(double v) const;
  [[nodiscard]] double total_mass() const noexcept { return total_; }

  /// Panel edges in x and F at those edges, including atom jumps.
  [[nodiscard]] const std::vector<double>& grid() const noexcept { return grid_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

 private:
  double ac_partial(double phi_lo, double phi_hi) const;
  double x_of(double phi) const noexcept;
  double phi_of(double x) const noexcept;
  double ac_cdf_phi(double phi) const;

  SpectralMeasure m_;
  std::vector<Atom> below_;  // atoms left of the ac interval
  std::vector<Atom> above_;
  std::vector<double> edges_;    // panel edges in phi, increasing, 0..pi
  std::vector<double> cum_;      // ac mass up to each edge
  double mass_below_ = 0.0;
  double ac_total_ = 0.0;
  double total_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> values_;
};

[[nodiscard]] double sample(const CdfTable& table, Philox& rng);
/// Convenience overload building a 256-panel table on every call.
[[nodiscard]] double sample(const SpectralMeasure& m, Philox& rng);

struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
};

/// One trajectory on strictly increasing positive times. Parameter sets that
/// need time inversion are simulated through t Y_{1/t} with Y forward in the
/// reduced parameters; negation flips the sign.
[[nodiscard]] PathSample simulate_path(const HarnessParams& p, std::span<const double> times,
                                       std::uint64_t seed, std::uint64_t path_index);

/// n_paths trajectories; path i uses stream i, so results do not depend on
/// the thread count. FREEHARNESS_THREADS caps the number of workers.
[[nodiscard]] std::vector<PathSample> simulate_paths(const HarnessParams& p,
                                                     std::span<const double> times,
                                                     std::size_t n_paths, std::uint64_t seed);

/// Worker count: hardware concurrency capped by FREEHARNESS_THREADS.
[[nodiscard]] unsigned worker_count();

}  // namespace freeharness
