#include <cmath>

#include <doctest.h>

#include "freeharness/error.hpp"
#include "freeharness/operator.hpp"
#include "freeharness/recurrence.hpp"

using namespace freeharness;

TEST_CASE("D and Z") {
  const BandedOperator D = d_operator(8);
  const BandedOperator Z = z_operator(8);
  CHECK(D.label == BandedOperator::Label::D);
  CHECK(Z.label == BandedOperator::Label::Z);
  CHECK(D.dim() == 8);
  CHECK(D.m(0, 1) == 1.0);
  CHECK(D.m(1, 0) == 0.0);
  CHECK(Z.m(1, 0) == 1.0);
  // DZ = I exactly, ZD = I minus the projection on constants
  const Eigen::MatrixXd dz = D.m * Z.m;
  CHECK((dz.topLeftCorner(7, 7) - Eigen::MatrixXd::Identity(7, 7)).norm() == 0.0);
  const Eigen::MatrixXd zd = Z.m * D.m;
  CHECK(zd(0, 0) == 0.0);
  CHECK(zd(3, 3) == 1.0);
}

TEST_CASE("build_xy and X_t") {
  const HarnessParams p{1, -0.5, 0.3, 0.2};
  const OperatorPair xy = build_xy(p, 20);
  CHECK(xy.x.dim() == 20);
  CHECK(xy.x.label == BandedOperator::Label::X);
  CHECK(xy.y.label == BandedOperator::Label::Y);
  const BandedOperator xt = x_t(xy, 2.0);
  CHECK(xt.label == BandedOperator::Label::Xt);
  CHECK((xt.m - (xy.x.m + 2.0 * xy.y.m)).norm() == 0.0);
  CHECK_THROWS_AS((void)build_xy(p, 4), DomainError);
}

TEST_CASE("q-commutation holds and catches perturbations") {
  for (const HarnessParams& p : {HarnessParams{0, 0, 0, 0}, HarnessParams{1, 1, 0.5, 0.5},
                                 HarnessParams{3, -1, 0.5, 0.5}, HarnessParams{-2, 0.7, 0.1, 1.3}}) {
    const auto r = check_q_commutation(p, 40);
    CHECK(r.identity == "q_commutation");
    CHECK(r.pass);
    HarnessParams bad = p;
    bad.eta += 1e-3;
    CHECK_FALSE(check_q_commutation(p, build_xy(bad, 40)).pass);
  }
}

TEST_CASE("quadratic form identity") {
  const HarnessParams p{1.3, -0.4, 0.6, 0.2};
  CHECK(check_quadratic_form(p, 0.5, 1.0, 2.0, 40).pass);
  CHECK(check_quadratic_form(p, 0.5, 0.5, 2.0, 40).pass);
  HarnessParams bad = p;
  bad.sigma += 1e-3;
  CHECK_FALSE(check_quadratic_form(p, build_xy(bad, 40), 0.5, 1.0, 2.0).pass);
  CHECK_THROWS_AS((void)check_quadratic_form(p, 1.0, 0.5, 2.0, 40), DomainError);
}

TEST_CASE("recurrence encoding") {
  const HarnessParams p{0.7, 1.1, 0.3, 0.4};
  for (double t : {0.0, 0.5, 3.0}) CHECK(check_recurrence_encoding(p, t, 40).pass);
  HarnessParams bad = p;
  bad.theta += 1e-3;
  CHECK_FALSE(check_recurrence_encoding(p, 1.0, x_t(build_xy(bad, 40), 1.0).m).pass);
  CHECK_THROWS_AS((void)check_recurrence_encoding(p, -1.0, 40), DomainError);
}

TEST_CASE("regression coefficients") {
  const auto rc = regression_coeffs(1.0, 2.0, 4.0);
  CHECK(rc.a == doctest::Approx(2.0 / 3.0));
  CHECK(rc.b == doctest::Approx(1.0 / 3.0));
  CHECK(rc.a + rc.b == doctest::Approx(1.0));
}

TEST_CASE("quadratic coefficients at (0,0,0,0)") {
  const auto q = quadratic_coeffs({0, 0, 0, 0}, 1.0, 2.0, 4.0);
  CHECK(q.A == doctest::Approx(2.0 / 3.0));
  CHECK(q.B == doctest::Approx(1.0 / 6.0));
  CHECK(q.C == doctest::Approx(1.0 / 6.0));
  CHECK(q.D == 0.0);
  CHECK(q.E == 0.0);
  CHECK(q.F == doctest::Approx(0.5));
  CHECK_THROWS_AS((void)quadratic_coeffs({0, 0, 0, 0}, 2.0, 1.0, 4.0), DomainError);
}
