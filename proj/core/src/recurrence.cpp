#include "freeharness/recurrence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>

#include "freeharness/error.hpp"

namespace freeharness {

EcRecurrence::EcRecurrence(std::vector<RecurrenceRow> prefix, RecurrenceRow tail)
    : prefix_(std::move(prefix)), tail_(tail) {
  auto check = [](const RecurrenceRow& r) {
    if (!(r.a > 0.0)) throw DomainError("recurrence leading coefficients must be positive");
  };
  for (const auto& r : prefix_) check(r);
  check(tail_);
}

bool EcRecurrence::favard_admissible() const noexcept {
  for (std::size_t n = 1; n < prefix_.size(); ++n)
    if (prefix_[n].c < 0.0) return false;
  return tail_.c >= 0.0;
}

namespace {

// Constant-tail coefficients shared by p_n and Q_n.
RecurrenceRow tail_row(const HarnessParams& p, const DerivedParams& d, double t) {
  const double one_m = 1.0 - p.sigma * p.tau;
  return {1.0 + p.sigma * t,
          ((d.alpha + p.sigma * d.beta) * t + d.beta + d.alpha * p.tau) / one_m,
          (t + p.tau) * (1.0 + d.alpha * d.beta) / (one_m * one_m)};
}

EcRecurrence martingale_coefficients(const HarnessParams& p, double t) {
  const DerivedParams d = derive_alpha_beta(p);
  const double one_m = 1.0 - p.sigma * p.tau;
  const RecurrenceRow tail = tail_row(p, d, t);
  return EcRecurrence({{1.0, 0.0, 0.0},
                       {1.0 + p.sigma * t, d.alpha * t + d.beta, t},
                       {1.0 + p.sigma * t, tail.b, (t + p.tau) * (1.0 + d.alpha * d.beta) / one_m}},
                      tail);
}

}  // namespace

EcRecurrence martingale_recurrence(const HarnessParams& p, double t) {
  validate(p);
  if (!(t > 0.0)) throw DomainError("martingale recurrence needs t > 0");
  return martingale_coefficients(p, t);
}

EcRecurrence conditional_coefficients(const HarnessParams& p, double s, double x, double t) {
  const DerivedParams d = derive_alpha_beta(p);
  const double one_m = 1.0 - p.sigma * p.tau;
  const double one_s = 1.0 + p.sigma * s;
  const RecurrenceRow tail = tail_row(p, d, t);
  return EcRecurrence(
      {{1.0, x, 0.0},
       {1.0 + p.sigma * t,
        ((d.alpha + p.sigma * x) * t + d.beta - s * (p.eta + p.sigma * x)) / one_s,
        (t - s) * start_factor(p, x) / one_s},
       {1.0 + p.sigma * t, tail.b, (t + p.tau) * (1.0 + d.alpha * d.beta) / (one_s * one_m)}},
      tail);
}

EcRecurrence conditional_recurrence(const HarnessParams& p, double s, double x, double t) {
  validate(p);
  if (!(s >= 0.0)) throw DomainError("conditional recurrence needs s >= 0");
  if (!(t >= s)) throw DomainError("conditional recurrence needs t >= s");
  if (!std::isfinite(x)) throw DomainError("starting point must be finite");
  const double factor = start_factor(p, x);
  constexpr double kEndpointSlack = 1e-12;
  if (factor < -kEndpointSlack) {
    std::ostringstream msg;
    msg << "x = " << x << " is outside the support of pi_s: 1+eta x+sigma x^2 = " << factor;
    throw DomainError(msg.str());
  }
  EcRecurrence r = conditional_coefficients(p, s, x, t);
  // Within rounding of a gap endpoint the level-one coefficient is zero. A
  // leftover 1e-16 would put a sliver of mass on the far interval, and high
  // moments amplify it by the interval size to the power n.
  const double rounding =
      16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(p.eta * x) + p.sigma * x * x);
  if (factor <= rounding) {
    auto prefix = r.prefix();
    prefix[1].c = 0.0;
    r = EcRecurrence(std::move(prefix), r.tail());
  }
  return r;
}

std::vector<double> eval_polys(const EcRecurrence& r, double y, int n_max) {
  std::vector<double> q(static_cast<std::size_t>(std::max(n_max, 0)) + 1);
  q[0] = 1.0;
  double prev = 0.0;
  for (int n = 0; n < n_max; ++n) {
    const auto& row = r.row(static_cast<std::size_t>(n));
    const double next = ((y - row.b) * q[n] - row.c * prev) / row.a;
    prev = q[n];
    q[n + 1] = next;
  }
  return q;
}

namespace {

LinearJacobi extract(const EcRecurrence& at0, const EcRecurrence& at1, double sigma, int n_max) {
  const std::size_t levels = static_cast<std::size_t>(n_max) + 2;
  LinearJacobi j;
  for (auto* v : {&j.alpha, &j.beta, &j.gamma, &j.delta, &j.epsilon, &j.phi})
    v->assign(levels, 0.0);
  for (std::size_t n = 0; n < levels; ++n) {
    const auto& r0 = at0.row(n);
    const auto& r1 = at1.row(n);
    if (n + 1 < levels) {
      j.beta[n + 1] = r0.a;
      j.alpha[n + 1] = sigma > 0.0 ? (r1.a - r0.a) / sigma : 0.0;
    }
    j.gamma[n] = r1.b - r0.b;
    j.delta[n] = r0.b;
    if (n >= 1) {
      j.epsilon[n] = r1.c - r0.c;
      j.phi[n] = r0.c;
    }
  }
  return j;
}

struct TermSum {
  double value = 0.0;
  double scale = 0.0;

  TermSum(std::initializer_list<double> terms) {
    for (double t : terms) {
      value += t;
      scale += std::abs(t);
    }
  }
};

double relation_residual(const TermSum& lhs, const TermSum& rhs) {
  return scaled_residual(lhs.value, rhs.value, lhs.scale + rhs.scale);
}

}  // namespace

LinearJacobi linear_jacobi_martingale(const HarnessParams& p, int n_max) {
  return extract(martingale_coefficients(p, 0.0), martingale_coefficients(p, 1.0), p.sigma, n_max);
}

LinearJacobi linear_jacobi_conditional(const HarnessParams& p, double x, double r, int n_max) {
  return extract(conditional_coefficients(p, r, x, 0.0), conditional_coefficients(p, r, x, 1.0),
                 p.sigma, n_max);
}

CheckReport verify_coefficient_relations(const LinearJacobi& j, const HarnessParams& p,
                                         const InitialCondition& init, int n_max,
                                         double tolerance) {
  if (n_max < 1 || j.levels() < static_cast<std::size_t>(n_max) + 2)
    throw DomainError("linear Jacobi data too short for requested n_max");

  const double sg = p.sigma, ta = p.tau, et = p.eta, th = p.theta, ga = p.gamma();
  const auto& al = j.alpha;
  const auto& be = j.beta;
  const auto& gm = j.gamma;
  const auto& de = j.delta;
  const auto& ep = j.epsilon;
  const auto& ph = j.phi;

  std::array<double, 5> res{};
  for (int n = 1; n <= n_max; ++n) {
    const std::size_t i = static_cast<std::size_t>(n);
    const std::size_t k = i + 1;
    const std::size_t h = i - 1;
    res[0] = std::max(res[0], relation_residual(
        {sg * sg * ta * al[i] * al[k], sg * al[i] * be[k] * ga, sg * be[i] * be[k]},
        {sg * al[k] * be[i]}));
    res[1] = std::max(res[1], relation_residual(
        {be[k] * gm[k], sg * al[k] * de[i]},
        {sg * al[k] * (gm[i] + gm[k]) * ta, (sg * al[k] * de[k] + be[k] * gm[i]) * ga,
         be[k] * (de[i] + de[k]) * sg, sg * al[k] * th, be[k] * et}));
    res[2] = std::max(res[2], relation_residual(
        {be[k] * ep[k], gm[i] * de[i], sg * al[i] * ph[i]},
        {(sg * al[k] * ep[k] + gm[i] * gm[i] + sg * al[i] * ep[i]) * ta,
         (sg * al[k] * ph[k] + gm[i] * de[i] + be[i] * ep[i]) * ga,
         (be[k] * ph[k] + de[i] * de[i] + be[i] * ph[i]) * sg, gm[i] * th, de[i] * et, 1.0}));
    res[3] = std::max(res[3], relation_residual(
        {gm[h] * ph[i], de[i] * ep[i]},
        {(gm[h] + gm[i]) * ep[i] * ta, (gm[i] * ph[i] + de[h] * ep[i]) * ga,
         (de[h] + de[i]) * ph[i] * sg, ep[i] * th, ph[i] * et}));
    res[4] = std::max(res[4], relation_residual(
        {ep[i] * ph[k]}, {ep[i] * ep[k] * ta, ep[k] * ph[i] * ga, ph[i] * ph[k] * sg}));
  }

  // Initial values.
  double x = 0.0, eps1 = 1.0, phi1 = 0.0;
  if (init.conditional) {
    x = init.x;
    eps1 = start_factor(p, x) / (1.0 + sg * init.r);
    phi1 = -init.r * eps1;
  }
  double init_res = 0.0;
  for (const auto& [got, want] : std::array<std::pair<double, double>, 6>{
           {{al[1], 0.0}, {be[1], 1.0}, {gm[0], 0.0}, {de[0], x}, {ep[1], eps1}, {ph[1], phi1}}})
    init_res = std::max(init_res, scaled_residual(got, want, want));

  nlohmann::json relations = nlohmann::json::object();
  nlohmann::json violated = nlohmann::json::array();
  double worst = init_res;
  for (std::size_t r = 0; r < res.size(); ++r) {
    const std::string name = "relation" + std::to_string(r + 1);
    relations[name] = res[r];
    if (!(res[r] <= tolerance)) violated.push_back(name);
    worst = std::max(worst, res[r]);
  }
  if (!(init_res <= tolerance)) violated.push_back("initial_values");
  nlohmann::json ctx = {{"n_max", n_max},
                        {"init", init.conditional ? "conditional" : "process"},
                        {"relations", relations},
                        {"initial_values", init_res},
                        {"violated", violated}};
  return CheckReport::make("coefficient_relations", worst, tolerance, std::move(ctx));
}

ConnectionCoeffs connection_coefficients(const HarnessParams& p, double x, double s, int N) {
  if (N < 0 || N > kMaxConnectionTerms) throw DomainError("connection coefficients: N out of range");
  const DerivedParams d = derive_alpha_beta(p);
  const double one_m = 1.0 - p.sigma * p.tau;
  const double one_s = 1.0 + p.sigma * s;
  const double ab1 = 1.0 + d.alpha * d.beta;

  // b_hat(z) = (num(z)/den(z) + 1)/(1 + sigma s); den(0) = (1 - sigma tau)^2 > 0.
  const std::array<double, 3> num{p.sigma * s * one_m * one_m,
                                  one_m * (s * (d.alpha + p.sigma * d.beta) - x * one_m),
                                  ab1 * s};
  const std::array<double, 3> den{one_m * one_m, (d.beta + d.alpha * p.tau) * one_m, p.tau * ab1};

  std::vector<double> ratio(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) {
    double v = n < 3 ? num[n] : 0.0;
    for (int k = 1; k <= std::min(n, 2); ++k) v -= den[k] * ratio[n - k];
    ratio[n] = v / den[0];
  }
  ConnectionCoeffs out;
  out.b.resize(ratio.size());
  for (std::size_t n = 0; n < ratio.size(); ++n) out.b[n] = ratio[n] / one_s;
  out.b[0] += 1.0 / one_s;
  out.c = eval_polys(conditional_coefficients(p, s, x, 0.0), 0.0, N);
  return out;
}

CheckReport verify_connection_identity(const HarnessParams& p, double x, double s, double t,
                                       double y, int n_max, double tolerance) {
  validate(p);
  const ConnectionCoeffs cc = connection_coefficients(p, x, s, n_max);
  const auto q = eval_polys(conditional_coefficients(p, s, x, t), y, n_max);
  const auto pk = eval_polys(martingale_coefficients(p, t), y, n_max);
  double worst = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    double rhs = cc.c[n];
    double scale = std::abs(q[n]) + std::abs(cc.c[n]);
    for (int k = 1; k <= n; ++k) {
      const double term = cc.b[n - k] * pk[k];
      rhs += term;
      scale += std::abs(term);
    }
    worst = std::max(worst, scaled_residual(q[n], rhs, scale));
  }
  return CheckReport::make("connection", worst, tolerance,
                           {{"n_max", n_max}, {"x", x}, {"s", s}, {"t", t}, {"y", y}});
}

CheckReport verify_increment_identity(const HarnessParams& p, double x, double s, double t,
                                      double y, int n_max, double tolerance) {
  validate(p);
  const ConnectionCoeffs cc = connection_coefficients(p, x, s, n_max);
  const auto q = eval_polys(conditional_coefficients(p, s, x, t), y, n_max);
  const auto pt = eval_polys(martingale_coefficients(p, t), y, n_max);
  const auto ps = eval_polys(martingale_coefficients(p, s), x, n_max);
  const auto at_start = eval_polys(conditional_coefficients(p, s, x, s), x, n_max);

  double worst = 0.0;
  double start_worst = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    double rhs = 0.0;
    double scale = std::abs(q[n]);
    for (int k = 1; k <= n; ++k) {
      const double term = cc.b[n - k] * (pt[k] - ps[k]);
      rhs += term;
      scale += std::abs(cc.b[n - k]) * (std::abs(pt[k]) + std::abs(ps[k]));
    }
    worst = std::max(worst, scaled_residual(q[n], rhs, scale));
    start_worst = std::max(start_worst, std::abs(at_start[n]));
  }
  return CheckReport::make("increment", std::max(worst, start_worst), tolerance,
                           {{"n_max", n_max},
                            {"x", x},
                            {"s", s},
                            {"t", t},
                            {"y", y},
                            {"q_at_start_max_abs", start_worst}});
}

}  // namespace freeharness
