#include <doctest.h>

#include <cmath>
#include <random>

#include "pmc/potential.hpp"

using namespace pmc;

namespace {

const GroupSpec r3 = GroupSpec::unimodular(0, 0, 0);
const GroupSpec h3 = GroupSpec::nonunimodular(0, 0);
const GroupSpec s3 = GroupSpec::unimodular(2, 2, 2);

GroupSpec random_group(std::mt19937& rng) {
  std::uniform_real_distribution<double> d(0, 3), dneg(-3, 0), dab(0, 2);
  switch (rng() % 3) {
    case 0:
      return GroupSpec::unimodular(d(rng), d(rng), d(rng));
    case 1:
      return GroupSpec::unimodular(d(rng), d(rng), dneg(rng));
    default:
      return GroupSpec::nonunimodular(dab(rng), dab(rng));
  }
}

}  // namespace

TEST_CASE("theta values") {
  CHECK(std::abs(theta(r3, {Chart::Q, {0.37, -1.2}})) == 0.0);
  // c1=c2=c3=2 gives Theta = -i (1+|q|^2)^2; at q=0 this is -i.
  const Complex t0 = theta(s3, {Chart::Q, {0, 0}});
  CHECK(std::abs(t0 - Complex(0, -1)) < 1e-15);
  const Complex q{0.4, 0.3};
  const double s = 1.0 + std::norm(q);
  CHECK(std::abs(theta(s3, {Chart::Q, q}) - Complex(0, -1) * s * s) < 1e-14);
  // H3 at q=0: -(1-|q|^4) = -1.
  CHECK(std::abs(theta(h3, {Chart::Q, {0, 0}}) - Complex(-1, 0)) < 1e-15);
}

TEST_CASE("potential point values") {
  auto e = potential_eval(r3, 1.0, {Chart::Q, {0, 0}});
  CHECK(std::abs(e.R - 1.0) < 1e-15);
  CHECK(std::abs(e.R_q) < 1e-15);
  CHECK(std::abs(e.R_qbar) < 1e-15);
  CHECK(e.R_H == 1.0);

  e = potential_eval(h3, 1.0, {Chart::Q, {0, 0}});
  CHECK(std::abs(e.R) < 1e-15);

  e = potential_eval(r3, 1.0, {Chart::Q, {1, 0}});
  CHECK(std::abs(e.R - 4.0) < 1e-14);
  CHECK(std::abs(e.R_q - 4.0) < 1e-14);
}

TEST_CASE("Wirtinger partials agree with central differences in both charts") {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> dq(-1.4, 1.4), dH(-3, 3);
  const double step = 1e-5;
  int checked = 0;
  for (int k = 0; k < 4000; ++k) {
    const GroupSpec g = random_group(rng);
    const double H = dH(rng);
    const Chart chart = (k % 2 == 0) ? Chart::Q : Chart::W;
    const Complex q{dq(rng), dq(rng)};
    const auto e = potential_eval(g, H, {chart, q});
    auto val = [&](Complex p) { return potential_eval(g, H, {chart, p}).R; };
    const Complex rx = (val(q + step) - val(q - step)) / (2 * step);
    const Complex ry = (val(q + Complex(0, step)) - val(q - Complex(0, step))) / (2 * step);
    const Complex fd_q = 0.5 * (rx - Complex(0, 1) * ry);
    const Complex fd_qb = 0.5 * (rx + Complex(0, 1) * ry);
    const double scale = std::abs(e.R_q) + std::abs(e.R_qbar) + 1.0;
    CHECK(std::abs(e.R_q - fd_q) < 1e-6 * scale);
    CHECK(std::abs(e.R_qbar - fd_qb) < 1e-6 * scale);
    ++checked;
  }
  CHECK(checked == 4000);
}

TEST_CASE("R_H is (1+|q|^2)^2 and Theta carries no H dependence") {
  std::mt19937 rng(103);
  std::uniform_real_distribution<double> dq(-1.4, 1.4), dH(-3, 3);
  for (int k = 0; k < 500; ++k) {
    const GroupSpec g = random_group(rng);
    const Complex q{dq(rng), dq(rng)};
    const Chart chart = (k % 2 == 0) ? Chart::Q : Chart::W;
    const double s = 1.0 + std::norm(q);
    const auto e = potential_eval(g, dH(rng), {chart, q});
    CHECK(e.R_H == s * s);
    const Complex r0 = potential_eval(g, 0.0, {chart, q}).R;
    const Complex r1 = potential_eval(g, 1.0, {chart, q}).R;
    CHECK(std::abs((r1 - r0) - Complex(s * s, 0)) < 1e-12 * (1 + std::abs(r1)));
  }
}

TEST_CASE("chart consistency on the overlap annulus") {
  std::mt19937 rng(107);
  std::uniform_real_distribution<double> dmod(0.7, 1.4), darg(0, 2 * M_PI), dH(-3, 3);
  for (int k = 0; k < 500; ++k) {
    const GroupSpec g = random_group(rng);
    const double H = dH(rng);
    const Complex q = std::polar(dmod(rng), darg(rng));
    const Complex w = 1.0 / q;
    const Complex Rq = potential_eval(g, H, {Chart::Q, q}).R;
    const Complex Rw = potential_eval(g, H, {Chart::W, w}).R;
    const double w4 = std::norm(w) * std::norm(w);
    CHECK(std::abs(w4 * Rq - Rw) < 1e-10 * (1 + std::abs(Rw)));
  }
}

TEST_CASE("constant-curvature identity R = (H - i c/2)(1+|q|^2)^2") {
  std::mt19937 rng(109);
  std::uniform_real_distribution<double> dq(-1.4, 1.4), dH(-3, 3), dc(0.1, 4);
  for (int k = 0; k < 300; ++k) {
    const double c = dc(rng);
    const GroupSpec g = GroupSpec::unimodular(c, c, c);
    const Complex q{dq(rng), dq(rng)};
    const double H = dH(rng);
    const double s = 1.0 + std::norm(q);
    const Complex expected = Complex(H, -c / 2) * s * s;
    CHECK(std::abs(potential_eval(g, H, {Chart::Q, q}).R - expected) <
          1e-12 * (1 + std::abs(expected)));
  }
}

TEST_CASE("limit of R/|q|^4 at infinity") {
  CHECK(std::abs(potential_infinity_limit(r3, 2.5) - Complex(2.5, 0)) < 1e-15);
  CHECK(std::abs(potential_infinity_limit(h3, 1.0) - Complex(2, 0)) < 1e-15);
  CHECK(std::abs(potential_infinity_limit(s3, 1.0) - Complex(1, -1)) < 1e-15);
}

TEST_CASE("critical threshold") {
  CHECK(critical_threshold_h0(s3).compact);
  CHECK(!critical_threshold_h0(GroupSpec::unimodular(1, 1, -1)).compact);
  CHECK(critical_threshold_h0(GroupSpec::unimodular(1, 1, -1)).h0 == 0);
  CHECK(critical_threshold_h0(GroupSpec::nonunimodular(0.5, 0.2)).h0 == 1);
}

TEST_CASE("zero scan: H3 with H=1 has the single zero q=0") {
  const auto r = zero_scan(h3, 1.0, 64);
  REQUIRE(!r.identically_zero);
  REQUIRE(r.zeros.size() == 1);
  CHECK(r.zeros[0].chart == Chart::Q);
  CHECK(std::abs(r.zeros[0].value) < 1e-5);
}

TEST_CASE("zero scan: compact group never vanishes") {
  for (double H : {-2.0, 0.0, 0.7}) {
    const auto r = zero_scan(s3, H, 48);
    CHECK(!r.identically_zero);
    CHECK(r.zeros.empty());
  }
}

TEST_CASE("zero scan: R3 cases") {
  const auto none = zero_scan(r3, 2.0, 48);
  CHECK(none.zeros.empty());
  const auto degenerate = zero_scan(r3, 0.0, 48);
  CHECK(degenerate.identically_zero);
}

TEST_CASE("zero scan: infinity zero is reported in chart W") {
  // H3 with H=-1 mirrors the H=1 case: the rescaled potential is
  // -2|w|^2(1+|w|^2), one zero at q = infinity.
  const auto r = zero_scan(h3, -1.0, 64);
  REQUIRE(r.zeros.size() == 1);
  CHECK(r.zeros[0].chart == Chart::W);
  CHECK(std::abs(r.zeros[0].value) < 1e-5);
}

TEST_CASE("zero scan: no zeros above the critical threshold (randomized)") {
  std::mt19937 rng(113);
  std::uniform_real_distribution<double> margin(0.1, 2.0), sgn(0, 1);
  for (int k = 0; k < 12; ++k) {
    const GroupSpec g = random_group(rng);
    const auto crit = critical_threshold_h0(g);
    const double H = (sgn(rng) < 0.5 ? -1 : 1) * (crit.h0 + margin(rng));
    const auto r = zero_scan(g, H, 32);
    CHECK(!r.identically_zero);
    CHECK(r.zeros.empty());
  }
}
