#include <cmath>
#include <limits>

#include <doctest.h>

#include "freeharness/report.hpp"

using namespace freeharness;

TEST_CASE("CheckReport::make") {
  const auto r = CheckReport::make("x", 1e-9, 1e-8, {{"n", 3}});
  CHECK(r.pass);
  CHECK_FALSE(CheckReport::make("x", 2e-8, 1e-8).pass);
  CHECK(CheckReport::make("x", 1e-8, 1e-8).pass);
  CHECK_FALSE(CheckReport::make("x", std::numeric_limits<double>::quiet_NaN(), 1.0).pass);
}

TEST_CASE("to_json flattens the context") {
  const auto j = to_json(CheckReport::make("mean", 0.5, 1.0, {{"t", 2.0}}));
  CHECK(j["identity"] == "mean");
  CHECK(j["t"] == 2.0);
  CHECK(j["max_residual"] == 0.5);
  CHECK(j["tolerance"] == 1.0);
  CHECK(j["pass"] == true);
  const auto pj = to_json(HarnessParams{1, 2, 0.3, 0.4});
  CHECK(pj["theta"] == 2.0);
  CHECK(pj["tau"] == 0.4);
}

TEST_CASE("scaled_residual") {
  CHECK(scaled_residual(1.0, 1.5, 0.1) == 0.5);
  CHECK(scaled_residual(100.0, 101.0, 100.0) == doctest::Approx(0.01));
  CHECK(scaled_residual(1.0, 1.0, -5.0) == 0.0);
}

TEST_CASE("version string is non-empty") { CHECK(std::string(version()).size() > 0); }
