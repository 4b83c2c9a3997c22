#include "freeharness/harnesscheck.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include "freeharness/error.hpp"
#include "freeharness/kernel.hpp"
#include "freeharness/operator.hpp"
#include "freeharness/recurrence.hpp"
#include "freeharness/spectral.hpp"

namespace freeharness {

namespace {

// E[p_n(X_s;s) X_s^a X_t^b X_u^c p_m(X_u;u)] for n, m <= deg and a, b, c <= 2,
// together with the same expectation of the absolute integrand.
struct Tensor {
  int K = 0;
  std::vector<double> val;
  std::vector<double> abs;

  explicit Tensor(int deg = 0) : K(deg + 1), val(static_cast<std::size_t>(K * K * 27), 0.0), abs(val) {}
  [[nodiscard]] std::size_t at(int n, int m, int a, int b, int c) const {
    return static_cast<std::size_t>((((n * K + m) * 3 + a) * 3 + b) * 3 + c);
  }
  [[nodiscard]] double v(int n, int m, int a, int b, int c) const { return val[at(n, m, a, b, c)]; }
  [[nodiscard]] double s(int n, int m, int a, int b, int c) const { return abs[at(n, m, a, b, c)]; }
};

Quadrature point(double x) { return {{x}, {1.0}}; }

Tensor nested_once(const HarnessParams& p, double s, double t, double u, int deg, int order,
                   int inner_nodes) {
  const EcRecurrence ps = conditional_coefficients(p, 0.0, 0.0, s);
  const EcRecurrence pu = conditional_coefficients(p, 0.0, 0.0, u);
  const int K = deg + 1;
  Tensor out(deg);

  const Quadrature outer = s == 0.0 ? point(0.0) : law_pi(p, s).gauss_rule(order);
  // middle accumulators G[m][b][c]
  std::vector<double> G(static_cast<std::size_t>(K * 9)), Ga(G.size());
  std::vector<double> H(static_cast<std::size_t>(K * 3)), Ha(H.size());

  for (std::size_t i = 0; i < outer.size(); ++i) {
    const double x = outer.nodes[i];
    const Quadrature mid = transition(p, s, x, t).measure.gauss_rule(order);
    std::fill(G.begin(), G.end(), 0.0);
    std::fill(Ga.begin(), Ga.end(), 0.0);
    for (std::size_t j = 0; j < mid.size(); ++j) {
      const double y = mid.nodes[j];
      const Quadrature inner =
          u == t ? point(y) : gauss_quadrature(conditional_recurrence(p, t, y, u), inner_nodes);
      std::fill(H.begin(), H.end(), 0.0);
      std::fill(Ha.begin(), Ha.end(), 0.0);
      for (std::size_t k = 0; k < inner.size(); ++k) {
        const double w = inner.nodes[k];
        const auto pm = eval_polys(pu, w, deg);
        for (int m = 0; m < K; ++m) {
          double term = inner.weights[k] * pm[static_cast<std::size_t>(m)];
          for (int c = 0; c < 3; ++c, term *= w) {
            H[static_cast<std::size_t>(m * 3 + c)] += term;
            Ha[static_cast<std::size_t>(m * 3 + c)] += std::abs(term);
          }
        }
      }
      for (int m = 0; m < K; ++m)
        for (int c = 0; c < 3; ++c) {
          const double h = H[static_cast<std::size_t>(m * 3 + c)];
          const double ha = Ha[static_cast<std::size_t>(m * 3 + c)];
          double yb = mid.weights[j];
          for (int b = 0; b < 3; ++b, yb *= y) {
            G[static_cast<std::size_t>((m * 3 + b) * 3 + c)] += yb * h;
            Ga[static_cast<std::size_t>((m * 3 + b) * 3 + c)] += std::abs(yb) * ha;
          }
        }
    }
    const auto pn = eval_polys(ps, x, deg);
    for (int n = 0; n < K; ++n) {
      double xa = outer.weights[i] * pn[static_cast<std::size_t>(n)];
      for (int a = 0; a < 3; ++a, xa *= x)
        for (int m = 0; m < K; ++m)
          for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
              const auto g = static_cast<std::size_t>((m * 3 + b) * 3 + c);
              out.val[out.at(n, m, a, b, c)] += xa * G[g];
              out.abs[out.at(n, m, a, b, c)] += std::abs(xa) * Ga[g];
            }
    }
  }
  return out;
}

struct Nested {
  Tensor tensor;
  int order = 0;
  double change = 0.0;
  bool converged = false;
};

Nested nested(const HarnessParams& p, double s, double t, double u, int deg,
              const NestedOptions& opts) {
  Nested r{nested_once(p, s, t, u, deg, opts.order, opts.inner_nodes), opts.order, 0.0, false};
  while (r.order < opts.max_order) {
    Tensor finer = nested_once(p, s, t, u, deg, 2 * r.order, opts.inner_nodes);
    double change = 0.0;
    for (std::size_t i = 0; i < finer.val.size(); ++i)
      change = std::max(change, std::abs(finer.val[i] - r.tensor.val[i]) / std::max(1.0, finer.abs[i]));
    r.tensor = std::move(finer);
    r.order *= 2;
    r.change = change;
    if (change <= opts.gate) {
      r.converged = true;
      break;
    }
  }
  return r;
}

nlohmann::json grid_json(double s, double t, double u, int n, int m, const Nested& q) {
  return {{"s", s}, {"t", t}, {"u", u}, {"n", n}, {"m", m}, {"order", q.order},
          {"order_change", q.change}, {"converged", q.converged}};
}

double uncertainty(const Nested& q) { return q.converged ? 0.0 : q.change; }

CheckReport linreg_report(const Nested& q, double s, double t, double u, int n, int m,
                          double tolerance) {
  const Tensor& T = q.tensor;
  const RegressionCoeffs rc = regression_coeffs(s, t, u);
  const double lhs = T.v(n, m, 0, 1, 0);
  const double rhs = rc.a * T.v(n, m, 1, 0, 0) + rc.b * T.v(n, m, 0, 0, 1);
  const double scale = std::max({T.s(n, m, 0, 1, 0), rc.a * T.s(n, m, 1, 0, 0) + rc.b * T.s(n, m, 0, 0, 1)});
  nlohmann::json ctx = grid_json(s, t, u, n, m, q);
  ctx["lhs"] = lhs;
  ctx["rhs"] = rhs;
  return CheckReport::make("linreg", scaled_residual(lhs, rhs, scale) + uncertainty(q),
                           tolerance, std::move(ctx));
}

CheckReport quadvar_report(const HarnessParams& p, const Nested& q, double s, double t, double u,
                           int n, int m, double tolerance) {
  const Tensor& T = q.tensor;
  const QuadraticFormCoeffs c = quadratic_coeffs(p, s, t, u);
  const double lhs = T.v(n, m, 0, 2, 0);
  const double rhs = c.A * T.v(n, m, 2, 0, 0) + c.B * T.v(n, m, 1, 0, 1) + c.C * T.v(n, m, 0, 0, 2) +
                     c.D * T.v(n, m, 1, 0, 0) + c.E * T.v(n, m, 0, 0, 1) + c.F * T.v(n, m, 0, 0, 0);
  const double scale =
      std::max(T.s(n, m, 0, 2, 0),
               std::abs(c.A) * T.s(n, m, 2, 0, 0) + std::abs(c.B) * T.s(n, m, 1, 0, 1) +
                   std::abs(c.C) * T.s(n, m, 0, 0, 2) + std::abs(c.D) * T.s(n, m, 1, 0, 0) +
                   std::abs(c.E) * T.s(n, m, 0, 0, 1) + std::abs(c.F) * T.s(n, m, 0, 0, 0));
  nlohmann::json ctx = grid_json(s, t, u, n, m, q);
  ctx["lhs"] = lhs;
  ctx["rhs"] = rhs;
  return CheckReport::make("quadvar", scaled_residual(lhs, rhs, scale) + uncertainty(q),
                           tolerance, std::move(ctx));
}

void require_triple(double s, double t, double u) {
  if (!(s > 0.0 && s < t && t < u)) throw DomainError("harness checks need 0 < s < t < u");
}

}  // namespace

std::vector<Triple> standard_triples() { return {{0.5, 1.0, 2.0}, {1.0, 2.0, 4.0}, {0.25, 0.5, 0.75}}; }

CheckReport check_mean(const HarnessParams& p, double t, double tolerance) {
  const SpectralMeasure m = law_pi(p, t);
  int nodes = 256;
  double mean = m.discretize(nodes).moment(1);
  for (; nodes < 8192; nodes *= 2) {
    const double finer = m.discretize(2 * nodes).moment(1);
    const bool done = std::abs(finer - mean) <= 1e-14;
    mean = finer;
    if (done) break;
  }
  return CheckReport::make("mean", std::abs(mean), tolerance, {{"t", t}, {"mean", mean}});
}

CheckReport check_covariance(const HarnessParams& p, double s, double t, double tolerance,
                             const NestedOptions& opts) {
  if (!(s > 0.0 && s <= t)) throw DomainError("covariance check needs 0 < s <= t");
  const Nested q = nested(p, s, t, t, 0, opts);
  const double cov = q.tensor.v(0, 0, 1, 1, 0);
  return CheckReport::make("covariance", std::abs(cov - std::min(s, t)) + uncertainty(q), tolerance,
                           {{"s", s}, {"t", t}, {"covariance", cov}, {"order", q.order},
                            {"converged", q.converged}});
}

CheckReport check_linreg_polynomial(const HarnessParams& p, double s, double t, double u, int n,
                                    int m, double tolerance, const NestedOptions& opts) {
  require_triple(s, t, u);
  if (n < 0 || m < 0) throw DomainError("degrees must be >= 0");
  return linreg_report(nested(p, s, t, u, std::max(n, m), opts), s, t, u, n, m, tolerance);
}

CheckReport check_quadvar_polynomial(const HarnessParams& p, double s, double t, double u, int n,
                                     int m, double tolerance, const NestedOptions& opts) {
  require_triple(s, t, u);
  if (n < 0 || m < 0) throw DomainError("degrees must be >= 0");
  return quadvar_report(p, nested(p, s, t, u, std::max(n, m), opts), s, t, u, n, m, tolerance);
}

double conditional_variance(const HarnessParams& p, double s, double t, double u, double x,
                            double y) {
  const double g = p.gamma();
  const double us = u - s;
  const double lin = (u * x - s * y) / us;
  const double inc = (y - x) / us;
  return (u - t) * (t - s) / (u * (1.0 + p.sigma * s) + p.tau - g * s) *
         (1.0 + p.sigma * lin * lin + p.eta * lin + p.tau * inc * inc + p.theta * inc +
          (1.0 - g) * (y - x) * (s * y - u * x) / (us * us));
}

CheckReport check_condvar_pointwise(const HarnessParams& p, double s, double t, double u,
                                    double x, double yv, double tolerance) {
  require_triple(s, t, u);
  const TransitionKernel first = transition(p, s, x, t);
  if (!first.measure.atoms().empty() || !first.measure.has_ac())
    throw DomainError("bridge configuration carries atoms");

  struct Moments {
    double mean, var;
  };
  auto bridge = [&](int nodes) {
    const Quadrature q = first.measure.discretize(nodes);
    double z = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      const double w = q.weights[j] * transition(p, t, q.nodes[j], u).measure.density(yv);
      z += w;
      m1 += w * q.nodes[j];
      m2 += w * q.nodes[j] * q.nodes[j];
    }
    if (!(z > 1e-300)) throw BridgeDensityZero("bridge normalizing constant underflowed");
    const double mean = m1 / z;
    return Moments{mean, m2 / z - mean * mean};
  };

  int nodes = 64;
  Moments cur = bridge(nodes);
  double change = 0.0;
  bool converged = false;
  for (; nodes < 4096; nodes *= 2) {
    const Moments finer = bridge(2 * nodes);
    change = std::abs(finer.var - cur.var) / std::max(1.0, std::abs(finer.var));
    cur = finer;
    if (change <= 1e-9) {
      converged = true;
      break;
    }
  }
  const double expected = conditional_variance(p, s, t, u, x, yv);
  const RegressionCoeffs rc = regression_coeffs(s, t, u);
  const double residual =
      scaled_residual(cur.var, expected, expected) + (converged ? 0.0 : change);
  return CheckReport::make("condvar", residual, tolerance,
                           {{"s", s}, {"t", t}, {"u", u}, {"x", x}, {"y", yv},
                            {"variance", cur.var}, {"expected", expected},
                            {"bridge_mean", cur.mean}, {"regression_mean", rc.a * x + rc.b * yv},
                            {"ac_nodes", 2 * nodes}, {"converged", converged}});
}

Suite parse_suite(const std::string& name) {
  if (name == "covariance") return Suite::Covariance;
  if (name == "linreg") return Suite::Linreg;
  if (name == "quadvar") return Suite::Quadvar;
  if (name == "condvar") return Suite::Condvar;
  if (name == "all") return Suite::All;
  throw InvalidParams("unknown suite '" + name + "'");
}

std::string to_string(Suite s) {
  switch (s) {
    case Suite::Covariance: return "covariance";
    case Suite::Linreg: return "linreg";
    case Suite::Quadvar: return "quadvar";
    case Suite::Condvar: return "condvar";
    case Suite::All: return "all";
  }
  return "?";
}

bool SuiteResult::pass() const noexcept {
  return !reports.empty() &&
         std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
}

SuiteResult run_suite(const HarnessParams& p, Suite suite, const SuiteOptions& opts) {
  const CaseTag tag = validate_and_classify(p);
  const HarnessParams q = tag.reduced;
  const bool want_cov = suite == Suite::Covariance || suite == Suite::All;
  const bool want_lin = suite == Suite::Linreg || suite == Suite::All;
  const bool want_quad = suite == Suite::Quadvar || suite == Suite::All;
  const bool want_cond = suite == Suite::Condvar || suite == Suite::All;

  struct Slot {
    std::vector<CheckReport> reports;
    std::vector<nlohmann::json> skipped;
  };
  std::vector<std::function<void(Slot&)>> tasks;

  for (const Triple& tr : opts.triples) {
    if (want_cov) {
      tasks.emplace_back([=](Slot& out) {
        for (double t : {tr.s, tr.t, tr.u}) out.reports.push_back(check_mean(q, t));
        out.reports.push_back(check_covariance(q, tr.s, tr.s, 1e-8, opts.nested));
        out.reports.push_back(check_covariance(q, tr.s, tr.t, 1e-8, opts.nested));
        out.reports.push_back(check_covariance(q, tr.t, tr.u, 1e-8, opts.nested));
        out.reports.push_back(check_covariance(q, tr.s, tr.u, 1e-8, opts.nested));
      });
    }
    if (want_lin || want_quad) {
      tasks.emplace_back([=](Slot& out) {
        require_triple(tr.s, tr.t, tr.u);
        const Nested nq = nested(q, tr.s, tr.t, tr.u, opts.max_degree, opts.nested);
        for (int n = 0; n <= opts.max_degree; ++n)
          for (int m = 0; m <= opts.max_degree; ++m) {
            if (want_lin) out.reports.push_back(linreg_report(nq, tr.s, tr.t, tr.u, n, m, 1e-6));
            if (want_quad)
              out.reports.push_back(quadvar_report(q, nq, tr.s, tr.t, tr.u, n, m, 1e-6));
          }
      });
    }
    if (want_cond) {
      tasks.emplace_back([=](Slot& out) {
        const SpectralMeasure pis = law_pi(q, tr.s);
        const double x = pis.has_ac() ? pis.center() : pis.atoms().front().location;
        try {
          const TransitionKernel whole = transition(q, tr.s, x, tr.u);
          const double yv = whole.measure.has_ac() ? whole.measure.center() : x;
          out.reports.push_back(check_condvar_pointwise(q, tr.s, tr.t, tr.u, x, yv));
        } catch (const DomainError& e) {
          out.skipped.push_back({{"identity", "condvar"}, {"s", tr.s}, {"t", tr.t}, {"u", tr.u},
                                 {"x", x}, {"reason", e.what()}});
        }
      });
    }
  }

  std::vector<Slot> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr failure;
  auto work = [&] {
    try {
      for (std::size_t i = next++; i < tasks.size() && !failed; i = next++) tasks[i](slots[i]);
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(tasks.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  SuiteResult result{p, q, {}, {}};
  for (auto& s : slots) {
    for (auto& r : s.reports) result.reports.push_back(std::move(r));
    for (auto& k : s.skipped) result.skipped.push_back(std::move(k));
  }
  return result;
}

nlohmann::json to_json(const SuiteResult& r) {
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& c : r.reports) reports.push_back(to_json(c));
  return {{"version", version()},
          {"params", to_json(r.params)},
          {"reduced", to_json(r.reduced)},
          {"pass", r.pass()},
          {"reports", reports},
          {"skipped", r.skipped}};
}

}  // namespace freeharness
