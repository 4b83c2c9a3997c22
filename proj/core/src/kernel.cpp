#include "freeharness/kernel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <string>
#include <thread>

#include "freeharness/error.hpp"
#include "freeharness/recurrence.hpp"
#include "gauss_legendre.hpp"

namespace freeharness {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kStartSlack = 1e-12;

// P_{s,t}(x,.) with no classification step.
SpectralMeasure kernel_measure(const HarnessParams& p, double s, double x, double t) {
  if (t == s) return SpectralMeasure::point_mass(x);
  return build_measure(conditional_recurrence(p, s, x, t));
}

void require_forward(const HarnessParams& p) {
  const CaseTag tag = validate_and_classify(p);
  if (tag.inverted())
    throw DomainError("forward kernels exist only for parameters reduced without time inversion");
}

}  // namespace

SpectralMeasure law_pi(const HarnessParams& p, double t) {
  return build_measure(martingale_recurrence(p, t));
}

bool admissible_start(const HarnessParams& p, double x) {
  return state_space(p).contains(x, kStartSlack) && start_factor(p, x) >= -kStartSlack;
}

TransitionKernel transition(const HarnessParams& p, double s, double x, double t) {
  require_forward(p);
  if (!(s >= 0.0) || !(t >= s)) throw DomainError("transition needs 0 <= s <= t");
  if (!admissible_start(p, x))
    throw DomainError("starting point " + std::to_string(x) + " is not admissible");
  return {s, t, x, kernel_measure(p, s, x, t)};
}

CheckReport check_martingale(const HarnessParams& p, double s, double x, double t, int n_max,
                             double tolerance) {
  const TransitionKernel k = transition(p, s, x, t);
  const EcRecurrence rt = conditional_coefficients(p, 0.0, 0.0, t);
  const std::vector<double> at_start = eval_polys(conditional_coefficients(p, 0.0, 0.0, s), x, n_max);

  auto integrate = [&](int nodes, std::vector<double>& scale) {
    const Quadrature q = k.measure.discretize(nodes);
    std::vector<double> acc(static_cast<std::size_t>(n_max) + 1, 0.0);
    scale.assign(acc.size(), 0.0);
    for (std::size_t j = 0; j < q.size(); ++j) {
      const auto pn = eval_polys(rt, q.nodes[j], n_max);
      for (std::size_t n = 0; n < acc.size(); ++n) {
        acc[n] += q.weights[j] * pn[n];
        scale[n] += q.weights[j] * std::abs(pn[n]);
      }
    }
    return acc;
  };

  int nodes = 256;
  std::vector<double> scale;
  std::vector<double> prev = integrate(nodes, scale);
  std::vector<double> cur = prev;
  for (; nodes < 8192; nodes *= 2) {
    cur = integrate(2 * nodes, scale);
    double change = 0.0;
    for (std::size_t n = 0; n < cur.size(); ++n)
      change = std::max(change, std::abs(cur[n] - prev[n]) / std::max(1.0, scale[n]));
    prev = cur;
    if (change <= 1e-13) break;
  }

  double worst = 0.0;
  nlohmann::json res = nlohmann::json::array();
  for (std::size_t n = 0; n < cur.size(); ++n) {
    const double r = scaled_residual(cur[n], at_start[n], std::max(scale[n], std::abs(at_start[n])));
    res.push_back(r);
    worst = std::max(worst, r);
  }
  return CheckReport::make("martingale", worst, tolerance,
                           {{"s", s}, {"t", t}, {"x", x}, {"n_max", n_max},
                            {"ac_nodes", 2 * nodes}, {"residuals", res}});
}

CheckReport check_confinement(const HarnessParams& p, double s, double x, double t,
                              double tolerance) {
  const TransitionKernel k = transition(p, s, x, t);
  const StateSpace U = state_space(p);
  double outside = 0.0;
  for (const auto& a : k.measure.atoms())
    if (!U.contains(a.location, 1e-9)) outside += a.weight;
  const Quadrature q = k.measure.discretize(2048);
  double ac_outside = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j)
    if (!U.contains(q.nodes[j])) ac_outside += q.weights[j];
  // atoms were counted in q as well
  for (const auto& a : k.measure.atoms())
    if (!U.contains(a.location)) ac_outside -= a.weight;
  outside += std::max(0.0, ac_outside);
  return CheckReport::make("confinement", outside, tolerance,
                           {{"s", s}, {"t", t}, {"x", x}});
}

CheckReport check_chapman_kolmogorov(const HarnessParams& p, double s, double t, double u,
                                     double x, int degree, double tolerance) {
  if (!(s >= 0.0 && s < t && t < u)) throw DomainError("Chapman-Kolmogorov needs 0 <= s < t < u");
  if (degree < 0) throw DomainError("degree must be >= 0");
  const TransitionKernel first = transition(p, s, x, t);
  const EcRecurrence direct = conditional_recurrence(p, s, x, u);
  const auto K = static_cast<std::size_t>(degree) + 1;

  std::vector<double> lhs(K);
  for (std::size_t k = 0; k < K; ++k) lhs[k] = moment_oracle(direct, static_cast<int>(k));

  auto compose = [&](int nodes, std::vector<double>& scale) {
    const Quadrature outer = first.measure.discretize(nodes);
    std::vector<double> acc(K, 0.0);
    scale.assign(K, 0.0);
    for (std::size_t j = 0; j < outer.size(); ++j) {
      const Quadrature inner =
          gauss_quadrature(conditional_recurrence(p, t, outer.nodes[j], u), degree + 1);
      for (std::size_t k = 0; k < K; ++k) {
        const double mk = inner.moment(static_cast<int>(k));
        acc[k] += outer.weights[j] * mk;
        scale[k] += outer.weights[j] * std::abs(mk);
      }
    }
    return acc;
  };

  int nodes = 64;
  std::vector<double> scale;
  std::vector<double> prev = compose(nodes, scale);
  std::vector<double> rhs = prev;
  bool converged = false;
  for (; nodes < 8192; nodes *= 2) {
    rhs = compose(2 * nodes, scale);
    double change = 0.0;
    for (std::size_t k = 0; k < K; ++k)
      change = std::max(change, std::abs(rhs[k] - prev[k]) / std::max(1.0, scale[k]));
    prev = rhs;
    if (change <= 1e-10) {
      converged = true;
      break;
    }
  }

  double worst = 0.0;
  nlohmann::json res = nlohmann::json::array();
  for (std::size_t k = 0; k < K; ++k) {
    const double r = scaled_residual(lhs[k], rhs[k], std::max(scale[k], std::abs(lhs[k])));
    res.push_back(r);
    worst = std::max(worst, r);
  }
  return CheckReport::make("chapman_kolmogorov", worst, tolerance,
                           {{"s", s}, {"t", t}, {"u", u}, {"x", x}, {"degree", degree},
                            {"ac_nodes", 2 * nodes}, {"converged", converged},
                            {"residuals", res}});
}

// --- CdfTable -------------------------------------------------------------
// phi in [0, pi] runs left to right: x = center - half_width cos(phi).

CdfTable::CdfTable(const SpectralMeasure& m, int panels) : m_(m) {
  if (panels < 1) throw DomainError("CdfTable needs at least one panel");
  const Interval iv = m_.ac_interval();
  for (const auto& a : m_.atoms()) {
    if (m_.has_ac() && a.location > iv.lo)
      above_.push_back(a);
    else
      below_.push_back(a);
  }
  auto by_loc = [](const Atom& a, const Atom& b) { return a.location < b.location; };
  std::sort(below_.begin(), below_.end(), by_loc);
  std::sort(above_.begin(), above_.end(), by_loc);
  for (const auto& a : below_) mass_below_ += a.weight;

  if (m_.has_ac()) {
    const double h = kPi / panels;
    std::vector<double> mass(static_cast<std::size_t>(panels));
    std::vector<double> dens(mass.size());
    for (int k = 0; k < panels; ++k) {
      const double a = k * h, b = (k + 1) * h;
      mass[static_cast<std::size_t>(k)] = ac_partial(a, b);
      dens[static_cast<std::size_t>(k)] = mass[static_cast<std::size_t>(k)] / (x_of(b) - x_of(a));
    }
    std::vector<double> sorted = dens;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
    const double median = sorted[sorted.size() / 2];

    edges_.push_back(0.0);
    cum_.push_back(0.0);
    for (int k = 0; k < panels; ++k) {
      const double a = k * h;
      const int split = dens[static_cast<std::size_t>(k)] > 10.0 * median ? 8 : 1;
      for (int i = 1; i <= split; ++i) {
        const double lo = a + (i - 1) * h / split;
        const double hi = (i == split && k == panels - 1) ? kPi : a + i * h / split;
        const double w = split == 1 ? mass[static_cast<std::size_t>(k)] : ac_partial(lo, hi);
        edges_.push_back(hi);
        cum_.push_back(cum_.back() + w);
      }
    }
    ac_total_ = cum_.back();
  }
  total_ = mass_below_ + ac_total_;
  for (const auto& a : above_) total_ += a.weight;

  double run = 0.0;
  for (const auto& a : below_) {
    run += a.weight;
    grid_.push_back(a.location);
    values_.push_back(run);
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    grid_.push_back(x_of(edges_[i]));
    values_.push_back(run + cum_[i]);
  }
  run += ac_total_;
  for (const auto& a : above_) {
    run += a.weight;
    grid_.push_back(a.location);
    values_.push_back(run);
  }
}

double CdfTable::x_of(double phi) const noexcept {
  return m_.center() - m_.half_width() * std::cos(phi);
}

double CdfTable::phi_of(double x) const noexcept {
  return std::acos(std::clamp((m_.center() - x) / m_.half_width(), -1.0, 1.0));
}

double CdfTable::ac_partial(double phi_lo, double phi_hi) const {
  return detail::gauss_legendre8([this](double phi) { return m_.angle_weight(kPi - phi); }, phi_lo, phi_hi);
}

double CdfTable::ac_cdf_phi(double phi) const {
  if (phi <= 0.0) return 0.0;
  if (phi >= kPi) return ac_total_;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), phi);
  const auto k = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return cum_[k] + ac_partial(edges_[k], phi);
}

double CdfTable::cdf(double x) const {
  double acc = 0.0;
  for (const auto& a : below_)
    if (a.location <= x) acc += a.weight;
  if (m_.has_ac()) {
    const Interval iv = m_.ac_interval();
    if (x >= iv.hi)
      acc += ac_total_;
    else if (x > iv.lo)
      acc += ac_cdf_phi(phi_of(x));
  }
  for (const auto& a : above_)
    if (a.location <= x) acc += a.weight;
  return acc;
}

double CdfTable::cdf_left(double x) const {
  double jump = 0.0;
  for (const auto& a : below_)
    if (a.location == x) jump += a.weight;
  for (const auto& a : above_)
    if (a.location == x) jump += a.weight;
  return cdf(x) - jump;
}

double CdfTable::quantile(double v) const {
  double run = 0.0;
  for (const auto& a : below_) {
    run += a.weight;
    if (v < run) return a.location;
  }
  if (m_.has_ac() && v < run + ac_total_) {
    const double r = std::max(0.0, v - run);
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), r);
    const auto k = std::min(static_cast<std::size_t>(it - cum_.begin()), cum_.size() - 1) - 1;
    const double target = r - cum_[k];
    double lo = edges_[k], hi = edges_[k + 1];
    const double panel = cum_[k + 1] - cum_[k];
    double phi = panel > 0.0 ? lo + (hi - lo) * std::clamp(target / panel, 0.0, 1.0) : lo;
    for (int it_n = 0; it_n < 60; ++it_n) {
      const double f = ac_partial(edges_[k], phi) - target;
      if (f < 0.0)
        lo = phi;
      else
        hi = phi;
      if (std::abs(f) <= 1e-15 || hi - lo <= 1e-15) break;
      const double g = m_.angle_weight(kPi - phi);
      double next = g > 0.0 ? phi - f / g : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      phi = next;
    }
    return x_of(phi);
  }
  run += ac_total_;
  for (const auto& a : above_) {
    run += a.weight;
    if (v < run) return a.location;
  }
  if (!above_.empty()) return above_.back().location;
  if (m_.has_ac()) return m_.ac_interval().hi;
  return below_.back().location;
}

double sample(const CdfTable& table, Philox& rng) {
  return table.quantile(rng.uniform() * table.total_mass());
}

double sample(const SpectralMeasure& m, Philox& rng) {
  return sample(CdfTable(m, 256), rng);
}

// --- paths ----------------------------------------------------------------

namespace {

constexpr int kStepPanels = 128;

struct PathPlan {
  HarnessParams reduced;
  bool inverted = false;
  double sign = 1.0;
  std::vector<double> sim_times;  // increasing times for the reduced process
};

PathPlan plan_path(const HarnessParams& p, std::span<const double> times) {
  if (times.empty()) throw DomainError("path needs at least one time");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw DomainError("path times must be positive");
    if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("path times must be increasing");
  }
  const CaseTag tag = validate_and_classify(p);
  PathPlan plan{tag.reduced, tag.inverted(), tag.negated() ? -1.0 : 1.0, {}};
  if (plan.inverted)
    for (auto it = times.rbegin(); it != times.rend(); ++it) plan.sim_times.push_back(1.0 / *it);
  else
    plan.sim_times.assign(times.begin(), times.end());
  return plan;
}

PathSample run_path(const PathPlan& plan, std::span<const double> times, const CdfTable& first,
                    std::uint64_t seed, std::uint64_t index) {
  Philox rng(seed, index);
  const std::size_t n = plan.sim_times.size();
  std::vector<double> y(n);
  y[0] = sample(first, rng);
  for (std::size_t k = 1; k < n; ++k) {
    const SpectralMeasure m =
        kernel_measure(plan.reduced, plan.sim_times[k - 1], y[k - 1], plan.sim_times[k]);
    y[k] = sample(CdfTable(m, kStepPanels), rng);
  }
  PathSample out{{times.begin(), times.end()}, std::vector<double>(n), seed, index};
  for (std::size_t i = 0; i < n; ++i) {
    // inverted: X_{t_i} = t_i Y_{1/t_i}, and 1/t_i sits at position n-1-i
    const double v = plan.inverted ? times[i] * y[n - 1 - i] : y[i];
    out.values[i] = plan.sign * v;
  }
  return out;
}

}  // namespace

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FREEHARNESS_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

PathSample simulate_path(const HarnessParams& p, std::span<const double> times, std::uint64_t seed,
                         std::uint64_t path_index) {
  const PathPlan plan = plan_path(p, times);
  const CdfTable first(law_pi(plan.reduced, plan.sim_times.front()));
  return run_path(plan, times, first, seed, path_index);
}

std::vector<PathSample> simulate_paths(const HarnessParams& p, std::span<const double> times,
                                       std::size_t n_paths, std::uint64_t seed) {
  const PathPlan plan = plan_path(p, times);
  const CdfTable first(law_pi(plan.reduced, plan.sim_times.front()));
  std::vector<PathSample> out(n_paths);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    try {
      for (std::size_t i = next++; i < n_paths && !failed; i = next++)
        out[i] = run_path(plan, times, first, seed, i);
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n_paths, 1));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace freeharness
