#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "freeharness/params.hpp"

namespace freeharness {

/// Outcome of one numerical identity check. `pass` is exactly
/// `max_residual <= tolerance`; `context` carries the grid point and sizes.
struct CheckReport {
  std::string identity;
  nlohmann::json context = nlohmann::json::object();
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  static CheckReport make(std::string identity, double residual, double tolerance,
                          nlohmann::json context = nlohmann::json::object());
};

/// Flattens `context` next to identity/max_residual/tolerance/pass.
[[nodiscard]] nlohmann::json to_json(const CheckReport& r);

[[nodiscard]] const char* version() noexcept;

/// {"eta":..,"theta":..,"sigma":..,"tau":..}
[[nodiscard]] nlohmann::json to_json(const HarnessParams& p);

/// |lhs - rhs| / max(1, scale). Identity checks compare against the size of
/// the summed terms, not just the result, so cancellation is not penalized.
[[nodiscard]] double scaled_residual(double lhs, double rhs, double scale) noexcept;

}  // namespace freeharness
