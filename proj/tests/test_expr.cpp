#include <doctest.h>

#include "pmc/errors.hpp"
#include "pmc/expr.hpp"

using namespace pmc;

TEST_CASE("expression parsing and evaluation") {
  const Expr e = Expr::parse("1 + 0.3*t^2");
  CHECK(e.eval({0, 0, 0}) == doctest::Approx(1.0));
  CHECK(e.eval({0, 0, 0.5}) == doctest::Approx(1.075));
  CHECK(e.grad({0, 0, 0.5}).z == doctest::Approx(0.3));
  CHECK(e.grad({0, 0, 0.5}).x == 0.0);

  const Expr p = Expr::parse("2*nu1^2 - nu2*nu3 + (1 - nu3)^3");
  const Vec3 nu{0.5, -0.25, 0.75};
  CHECK(p.eval(nu) == doctest::Approx(2 * 0.25 + 0.25 * 0.75 + std::pow(0.25, 3)));
  CHECK(p.grad(nu).x == doctest::Approx(4 * 0.5));
  CHECK(p.grad(nu).y == doctest::Approx(-0.75));
  CHECK(p.grad(nu).z == doctest::Approx(0.25 - 3 * 0.25 * 0.25));

  CHECK(Expr::parse("-t").eval({0, 0, 2}) == doctest::Approx(-2.0));
  CHECK(Expr::parse("t^0").eval({0, 0, 5}) == doctest::Approx(1.0));

  CHECK_THROWS_AS(Expr::parse("1 +"), SpecError);
  CHECK_THROWS_AS(Expr::parse("foo"), SpecError);
  CHECK_THROWS_AS(Expr::parse("t^-2"), SpecError);
  CHECK_THROWS_AS(Expr::parse("(1+t"), SpecError);
  CHECK_THROWS_AS(Expr::parse("1 2"), SpecError);
}

TEST_CASE("parsed expression as a prescription has closed-form derivatives") {
  const PrescribedH h = Expr::parse("1+0.3*t^2").to_prescribed();
  CHECK(h.has_closed_form());
  const ChartPoint q{Chart::Q, {0.4, -0.3}};
  const auto p = h.partials(q);
  CHECK(p.method == PrescribedH::DerivMethod::ClosedForm);
  // Cross-check against the FD fallback.
  const PrescribedH hfd([](const Vec3& nu) { return 1 + 0.3 * nu.z * nu.z; });
  const auto pfd = hfd.partials(q);
  CHECK(pfd.method == PrescribedH::DerivMethod::CentralFD);
  CHECK(std::abs(p.dq - pfd.dq) < 1e-6);
  CHECK(std::abs(p.value - pfd.value) < 1e-15);
}

TEST_CASE("prescription utilities") {
  const PrescribedH sym = Expr::parse("1+0.3*t^2").to_prescribed();
  CHECK(sym.antipodal_defect() < 1e-12);
  const PrescribedH asym = Expr::parse("1+0.3*t").to_prescribed();
  CHECK(asym.antipodal_defect() > 0.1);
  CHECK(sym.min_on_sphere() == doctest::Approx(1.0).epsilon(1e-3));
}
