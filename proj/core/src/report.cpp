#include "freeharness/report.hpp"

#include <algorithm>
#include <cmath>

#ifndef FREEHARNESS_VERSION
#define FREEHARNESS_VERSION "0.0.0"
#endif

namespace freeharness {

CheckReport CheckReport::make(std::string identity, double residual, double tolerance,
                              nlohmann::json context) {
  CheckReport r;
  r.identity = std::move(identity);
  r.context = std::move(context);
  r.max_residual = residual;
  r.tolerance = tolerance;
  // NaN residuals never pass.
  r.pass = residual <= tolerance;
  return r;
}

nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json j = nlohmann::json::object();
  j["identity"] = r.identity;
  for (const auto& [key, value] : r.context.items()) j[key] = value;
  j["max_residual"] = r.max_residual;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  return j;
}

const char* version() noexcept { return FREEHARNESS_VERSION; }

nlohmann::json to_json(const HarnessParams& p) {
  return {{"eta", p.eta}, {"theta", p.theta}, {"sigma", p.sigma}, {"tau", p.tau}};
}

double scaled_residual(double lhs, double rhs, double scale) noexcept {
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(scale));
}

}  // namespace freeharness
