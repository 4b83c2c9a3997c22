#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

#include "freeharness/error.hpp"
#include "freeharness/params.hpp"

using namespace freeharness;

TEST_CASE("derive_alpha_beta") {
  auto d = derive_alpha_beta({0, 0, 0.5, 0.5});
  CHECK(d.alpha == 0.0);
  CHECK(d.beta == 0.0);

  d = derive_alpha_beta({3, -1, 0, 0});
  CHECK(d.alpha == 3.0);
  CHECK(d.beta == -1.0);

  d = derive_alpha_beta({3, -1, 0.5, 0.5});
  CHECK(d.alpha == doctest::Approx(10.0 / 3.0).epsilon(1e-15));
  CHECK(d.beta == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS((void)derive_alpha_beta({0, 0, 1, 1}), InvalidParams);
}

TEST_CASE("validate rejects the boundary and bad signs") {
  CHECK_THROWS_AS(validate({0, 0, 1, 1}), InvalidParams);
  CHECK_THROWS_AS(validate({0, 0, -0.1, 0}), InvalidParams);
  CHECK_THROWS_AS(validate({0, 0, 0, -0.1}), InvalidParams);
  CHECK_THROWS_AS(validate({std::numeric_limits<double>::quiet_NaN(), 0, 0, 0}), InvalidParams);
  // 1 + alpha beta = 1 + eta theta at sigma = tau = 0
  CHECK_THROWS_AS(validate({2, -0.5, 0, 0}), InvalidParams);
  CHECK_NOTHROW(validate({0.5, -0.5, 0, 0}));
  try {
    validate({0, 0, 1, 1});
  } catch (const InvalidParams& e) {
    CHECK(std::string(e.what()) == "sigma*tau must be < 1");
  }
}

TEST_CASE("classification of the case representatives") {
  struct Row {
    HarnessParams p;
    CaseId id;
    bool inverted;
    bool negated;
  };
  const Row rows[] = {
      {{0, 0, 0, 0}, CaseId::Case6, false, false},
      {{1, 1, 0.5, 0.5}, CaseId::Case1, false, false},
      {{3, 2.5, 0.5, 0.5}, CaseId::Case2, false, false},
      {{1, 1, 0.5, 0}, CaseId::Case3, false, false},
      {{3, 2, 0.5, 0}, CaseId::Case4, false, false},
      {{3, 0, 0.5, 0}, CaseId::Case5, false, false},
      {{0.5, -0.5, 0, 0}, CaseId::Case6, false, false},
      {{3, -1, 0.5, 0.5}, CaseId::Case1, true, false},
      {{-3, -2.5, 0.5, 0.5}, CaseId::Case2, false, true},
  };
  for (const auto& r : rows) {
    CAPTURE(r.p.eta);
    CAPTURE(r.p.theta);
    const CaseTag tag = validate_and_classify(r.p);
    CHECK(tag.case_id == r.id);
    CHECK(tag.inverted() == r.inverted);
    CHECK(tag.negated() == r.negated);
    CaseId direct{};
    CHECK(direct_case(tag.reduced, direct));
    CHECK(direct == r.id);
  }
  CHECK(validate_and_classify({0, 0, 0, 0}).transform_log.empty());
  CHECK_THROWS_AS((void)validate_and_classify({0, 0, 1, 1}), InvalidParams);
}

TEST_CASE("sigma = 0 < tau is reached only through time inversion") {
  const CaseTag tag = validate_and_classify({0.5, 1, 0, 0.5});
  CHECK(tag.inverted());
  CHECK(tag.reduced.sigma == 0.5);
  CHECK(tag.reduced.tau == 0.0);
}

TEST_CASE("boundary eta^2 = 4 sigma goes to Case 1") {
  CHECK(validate_and_classify({2, 2, 1, 0.5}).case_id == CaseId::Case1);
}

TEST_CASE("time_invert and negate") {
  CHECK(time_invert({3, -1, 0.5, 0.5}) == HarnessParams{-1, 3, 0.5, 0.5});
  CHECK(time_invert({0, 0, 0, 0}) == HarnessParams{0, 0, 0, 0});
  CHECK(negate({3, -1, 0.5, 0.5}) == HarnessParams{-3, 1, 0.5, 0.5});
  CHECK(negate({0, 0, 0.3, 0.2}) == HarnessParams{0, 0, 0.3, 0.2});
}

TEST_CASE("gamma is tied to sigma and tau") {
  CHECK(HarnessParams{1, 2, 0.5, 0.4}.gamma() == doctest::Approx(-0.2));
}

TEST_CASE("state space branches") {
  CHECK(state_space({0, 0, 0, 0}).kind == StateSpace::Kind::FullLine);
  CHECK(state_space({1, 1, 0.5, 0.5}).kind == StateSpace::Kind::FullLine);

  const StateSpace g = state_space({3, 0, 0.5, 0});
  CHECK(g.kind == StateSpace::Kind::GapComplement);
  CHECK(g.excluded_lo == doctest::Approx(-3 - std::sqrt(7.0)).epsilon(1e-14));
  CHECK(g.excluded_hi == doctest::Approx(-3 + std::sqrt(7.0)).epsilon(1e-14));
  CHECK(g.contains(-6));
  CHECK(g.contains(g.excluded_hi));
  CHECK_FALSE(g.contains(-1));

  const StateSpace left = state_space({-2, 0, 0, 0});
  CHECK(left.kind == StateSpace::Kind::LeftRay);
  CHECK(left.excluded_lo == 0.5);
  CHECK(left.contains(0.5));
  CHECK(left.contains(-100));
  CHECK_FALSE(left.contains(0.6));

  const StateSpace right = state_space({2, 0, 0, 0});
  CHECK(right.kind == StateSpace::Kind::RightRay);
  CHECK(right.excluded_hi == -0.5);
  CHECK(right.contains(-0.5));
  CHECK_FALSE(right.contains(-0.6));
}

TEST_CASE("start_factor") {
  CHECK(start_factor({3, 0, 0.5, 0}, 0.0) == 1.0);
  CHECK(start_factor({3, 0, 0.5, 0}, -3 + std::sqrt(7.0)) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("to_string") {
  CHECK(to_string(CaseId::Case4) == "Case4");
  CHECK(to_string(Reduction::Negation) == "negation");
  CHECK(to_string(Reduction::TimeInversion) == "time_inversion");
}
