#include "freeharness/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "freeharness/error.hpp"

namespace freeharness {

bool CaseTag::inverted() const noexcept {
  return std::find(transform_log.begin(), transform_log.end(), Reduction::TimeInversion) !=
         transform_log.end();
}

bool CaseTag::negated() const noexcept {
  return std::find(transform_log.begin(), transform_log.end(), Reduction::Negation) !=
         transform_log.end();
}

bool StateSpace::contains(double x, double tol) const noexcept {
  if (kind == Kind::FullLine || !(excluded_lo < excluded_hi)) return true;
  return !(x > excluded_lo + tol && x < excluded_hi - tol);
}

DerivedParams derive_alpha_beta(const HarnessParams& p) {
  const double denom = 1.0 - p.sigma * p.tau;
  if (!(denom > 0.0)) throw InvalidParams("sigma*tau must be < 1");
  return {(p.eta + p.theta * p.sigma) / denom, (p.eta * p.tau + p.theta) / denom};
}

void validate(const HarnessParams& p) {
  if (!std::isfinite(p.eta) || !std::isfinite(p.theta) || !std::isfinite(p.sigma) ||
      !std::isfinite(p.tau))
    throw InvalidParams("parameters must be finite");
  if (p.sigma < 0.0) throw InvalidParams("sigma must be >= 0");
  if (p.tau < 0.0) throw InvalidParams("tau must be >= 0");
  const auto [alpha, beta] = derive_alpha_beta(p);
  if (!(1.0 + alpha * beta > 0.0)) throw InvalidParams("1+alpha*beta must be > 0");
}

HarnessParams time_invert(const HarnessParams& p) noexcept {
  return {p.theta, p.eta, p.tau, p.sigma};
}

HarnessParams negate(const HarnessParams& p) noexcept {
  return {-p.eta, -p.theta, p.sigma, p.tau};
}

namespace {

double alpha_plus_sigma_beta(const HarnessParams& p) {
  const auto [alpha, beta] = derive_alpha_beta(p);
  return alpha + p.sigma * beta;
}

// Boundary values eta^2 == 4 sigma go to the "<=" cases.
bool gap_condition(double lin, double quad) { return lin * lin > 4.0 * quad; }

}  // namespace

bool direct_case(const HarnessParams& p, CaseId& out) {
  const bool s_pos = p.sigma > 0.0;
  const bool t_pos = p.tau > 0.0;
  if (!s_pos && !t_pos) {
    out = CaseId::Case6;
    return true;
  }
  if (s_pos && t_pos) {
    if (!gap_condition(p.eta, p.sigma)) {
      out = CaseId::Case1;
      return true;
    }
    if (gap_condition(p.theta, p.tau) && alpha_plus_sigma_beta(p) > 0.0) {
      out = CaseId::Case2;
      return true;
    }
    return false;
  }
  if (s_pos) {  // tau == 0
    if (p.theta == 0.0) {
      out = CaseId::Case5;
      return true;
    }
    if (!gap_condition(p.eta, p.sigma)) {
      out = CaseId::Case3;
      return true;
    }
    if (alpha_plus_sigma_beta(p) > 0.0) {
      out = CaseId::Case4;
      return true;
    }
    return false;
  }
  return false;  // sigma == 0 < tau: only reachable through time inversion
}

CaseTag validate_and_classify(const HarnessParams& p) {
  validate(p);

  CaseTag tag;
  auto attempt = [&tag](HarnessParams q, std::vector<Reduction> log) {
    if (alpha_plus_sigma_beta(q) < 0.0) {
      q = negate(q);
      log.push_back(Reduction::Negation);
    }
    CaseId id{};
    if (!direct_case(q, id)) return false;
    tag.case_id = id;
    tag.reduced = q;
    tag.transform_log = std::move(log);
    return true;
  };

  // Plain parameters first, so that sign-insensitive cases keep an empty log.
  CaseId id{};
  if (direct_case(p, id)) {
    tag.case_id = id;
    tag.reduced = p;
    return tag;
  }
  if (attempt(p, {})) return tag;
  if (attempt(time_invert(p), {Reduction::TimeInversion})) return tag;

  // With both discriminants positive, alpha+sigma*beta and beta+alpha*tau
  // cannot vanish together, so one of the two attempts above must succeed.
  std::ostringstream msg;
  msg << "no case reachable for (eta,theta,sigma,tau)=(" << p.eta << ',' << p.theta << ','
      << p.sigma << ',' << p.tau << ')';
  throw InternalConsistency(msg.str());
}

StateSpace state_space(const HarnessParams& p) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  StateSpace u;
  if (p.sigma > 0.0) {
    const double disc = p.eta * p.eta - 4.0 * p.sigma;
    if (disc < 0.0) return u;
    const double r = std::sqrt(disc);
    u.kind = StateSpace::Kind::GapComplement;
    u.excluded_lo = (-p.eta - r) / (2.0 * p.sigma);
    u.excluded_hi = (-p.eta + r) / (2.0 * p.sigma);
    return u;
  }
  if (p.eta < 0.0) {
    u.kind = StateSpace::Kind::LeftRay;
    u.excluded_lo = -1.0 / p.eta;
    u.excluded_hi = inf;
  } else if (p.eta > 0.0) {
    // 1 + eta x >= 0, i.e. x >= -1/eta.
    u.kind = StateSpace::Kind::RightRay;
    u.excluded_lo = -inf;
    u.excluded_hi = -1.0 / p.eta;
  }
  return u;
}

std::string to_string(CaseId c) { return "Case" + std::to_string(static_cast<int>(c)); }

std::string to_string(Reduction r) {
  return r == Reduction::Negation ? "negation" : "time_inversion";
}

}  // namespace freeharness
