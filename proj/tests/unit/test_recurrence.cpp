#include <cmath>

#include <doctest.h>

#include "freeharness/error.hpp"
#include "freeharness/recurrence.hpp"

using namespace freeharness;

TEST_CASE("martingale recurrence rows for the semicircle") {
  const EcRecurrence r = martingale_recurrence({0, 0, 0, 0}, 1.0);
  CHECK(r.tail_start() == 3);
  CHECK(r.row(0) == RecurrenceRow{1, 0, 0});
  CHECK(r.row(1) == RecurrenceRow{1, 0, 1});
  CHECK(r.tail() == RecurrenceRow{1, 0, 1});
  CHECK(r.favard_admissible());
}

TEST_CASE("martingale recurrence rows for (1,1,1/2,1/2) at t = 1") {
  // alpha = beta = 2, 1 + alpha beta = 5, 1 - sigma tau = 3/4
  const EcRecurrence r = martingale_recurrence({1, 1, 0.5, 0.5}, 1.0);
  CHECK(r.row(1).a == 1.5);
  CHECK(r.row(1).b == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(r.row(1).c == 1.0);
  CHECK(r.row(2).b == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(r.row(2).c == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(r.tail().c == doctest::Approx(40.0 / 3.0).epsilon(1e-15));
  CHECK(r.offdiag_sq(0) == 1.0);
}

TEST_CASE("level-one C coefficient equals t") {
  for (double t : {0.1, 1.0, 7.5}) CHECK(martingale_recurrence({3, -1, 0.5, 0.5}, t).row(1).c == t);
}

TEST_CASE("martingale recurrence domain") {
  CHECK_THROWS_AS((void)martingale_recurrence({0, 0, 0, 0}, 0.0), DomainError);
  CHECK_THROWS_AS((void)martingale_recurrence({0, 0, 1, 1}, 1.0), InvalidParams);
}

TEST_CASE("conditional recurrence") {
  const HarnessParams p{1, -0.5, 0.5, 0.25};
  SUBCASE("s = 0, x = 0 reproduces the martingale recurrence") {
    CHECK(conditional_recurrence(p, 0.0, 0.0, 2.0) == martingale_recurrence(p, 2.0));
  }
  SUBCASE("t = s gives zero variance") {
    CHECK(conditional_recurrence(p, 1.0, 0.3, 1.0).row(1).c == 0.0);
  }
  SUBCASE("row zero encodes Q_1 = y - x") {
    const auto q = eval_polys(conditional_recurrence(p, 1.0, 0.3, 2.0), 1.7, 1);
    CHECK(q[1] == doctest::Approx(1.4).epsilon(1e-15));
  }
  SUBCASE("domain checks") {
    CHECK_THROWS_AS((void)conditional_recurrence(p, 2.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)conditional_recurrence(p, -1.0, 0.0, 1.0), DomainError);
    // inside the gap of (3,0,1/2,0): 1 + 3x + x^2/2 < 0 at x = -1
    CHECK_THROWS_AS((void)conditional_recurrence({3, 0, 0.5, 0}, 1.0, -1.0, 2.0), DomainError);
  }
  SUBCASE("a start on the gap edge gives an exact point mass") {
    const double bplus = -3 + std::sqrt(7.0);
    for (double x : {bplus, std::nextafter(bplus, 0.0), std::nextafter(bplus, -1.0)})
      CHECK(conditional_recurrence({3, 0, 0.5, 0}, 1.0, x, 2.0).row(1).c == 0.0);
    CHECK(conditional_recurrence({3, 0, 0.5, 0}, 1.0, bplus + 1e-6, 2.0).row(1).c > 0.0);
  }
  SUBCASE("inverted parameters near the gap edge stay admissible") {
    const HarnessParams inv = time_invert({3, -1, 0.5, 0.5});
    const double bplus = (-inv.eta + std::sqrt(inv.eta * inv.eta - 4 * inv.sigma)) / (2 * inv.sigma);
    if (std::isfinite(bplus)) {
      const EcRecurrence r = conditional_recurrence(inv, 1.0, bplus + 0.1, 2.0);
      CHECK(r.favard_admissible());
    }
    CHECK(conditional_recurrence(inv, 1.0, 0.5, 2.0).favard_admissible());
  }
}

TEST_CASE("eval_polys") {
  const EcRecurrence r = martingale_recurrence({0.3, 0.2, 0.1, 0.4}, 1.5);
  const auto q = eval_polys(r, 0.7, 5);
  REQUIRE(q.size() == 6);
  CHECK(q[0] == 1.0);
  CHECK(q[1] == doctest::Approx(0.7).epsilon(1e-15));
  // the recurrence holds to rounding
  for (std::size_t n = 1; n < 5; ++n) {
    const auto& row = r.row(n);
    CHECK(0.7 * q[n] == doctest::Approx(row.a * q[n + 1] + row.b * q[n] + row.c * q[n - 1]).epsilon(1e-13));
  }
  CHECK(eval_polys(r, 0.7, 0).size() == 1);
}

TEST_CASE("coefficient relations hold with both initial conditions") {
  const HarnessParams p{1.2, -0.7, 0.4, 0.3};
  const auto proc = verify_coefficient_relations(linear_jacobi_martingale(p, 50), p,
                                                 InitialCondition::process(), 50);
  CHECK(proc.pass);
  CHECK(proc.max_residual <= 1e-10);
  const auto cond = verify_coefficient_relations(linear_jacobi_conditional(p, 0.4, 1.3, 50), p,
                                                 InitialCondition::at(0.4, 1.3), 50);
  CHECK(cond.pass);
}

TEST_CASE("coefficient relations: perturbation is caught and named") {
  const HarnessParams p{1.2, -0.7, 0.4, 0.3};
  LinearJacobi j = linear_jacobi_martingale(p, 10);
  j.beta[2] += 1e-3;
  const auto r = verify_coefficient_relations(j, p, InitialCondition::process(), 10);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.context["violated"].empty());
  CHECK_THROWS_AS((void)verify_coefficient_relations(j, p, InitialCondition::process(), 50), DomainError);
}

TEST_CASE("connection coefficients") {
  const HarnessParams p{0.8, 0.3, 0.2, 0.6};
  const ConnectionCoeffs cc = connection_coefficients(p, 0.4, 1.1, 12);
  REQUIRE(cc.b.size() == 13);
  REQUIRE(cc.c.size() == 13);
  CHECK(cc.b[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cc.c[0] == 1.0);
  CHECK_THROWS_AS((void)connection_coefficients(p, 0.4, 1.1, kMaxConnectionTerms + 1), DomainError);

  const auto conn = verify_connection_identity(p, 0.4, 1.1, 2.3, -0.6, 12);
  CHECK(conn.pass);
  const auto inc = verify_increment_identity(p, 0.4, 1.1, 2.3, -0.6, 12);
  CHECK(inc.pass);
  CHECK(inc.context["q_at_start_max_abs"].get<double>() <= 1e-10);
}

TEST_CASE("EcRecurrence rejects non-positive leading coefficients") {
  CHECK_THROWS_AS(EcRecurrence({{0.0, 0.0, 0.0}}, {1, 0, 1}), DomainError);
  CHECK_FALSE(EcRecurrence({{1, 0, 0}, {1, 0, -1}}, {1, 0, 1}).favard_admissible());
}
