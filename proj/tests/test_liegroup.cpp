#include <doctest.h>

#include <cmath>
#include <random>

#include "pmc/errors.hpp"
#include "pmc/liegroup.hpp"
#include "pmc/rational.hpp"

using namespace pmc;

TEST_CASE("mu values") {
  auto mu = mu_values(0, 0, 0);
  CHECK(mu[0] == 0);
  CHECK(mu[1] == 0);
  CHECK(mu[2] == 0);

  mu = mu_values(2, 2, 2);
  CHECK(mu[0] == 1);
  CHECK(mu[1] == 1);
  CHECK(mu[2] == 1);

  mu = mu_values(1, 1, -1);
  CHECK(mu[0] == doctest::Approx(-0.5));
  CHECK(mu[1] == doctest::Approx(-0.5));
  CHECK(mu[2] == doctest::Approx(1.5));

  // Linear identities mu2+mu3 = c1 etc. on random inputs.
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int k = 0; k < 200; ++k) {
    const double c1 = d(rng), c2 = d(rng), c3 = d(rng);
    const auto m = mu_values(c1, c2, c3);
    CHECK(m[1] + m[2] == doctest::Approx(c1).epsilon(1e-14));
    CHECK(m[0] + m[2] == doctest::Approx(c2).epsilon(1e-14));
    CHECK(m[0] + m[1] == doctest::Approx(c3).epsilon(1e-14));
  }
}

TEST_CASE("group construction and classification") {
  CHECK(GroupSpec::unimodular(0, 0, 0).family() == "R3");
  CHECK(GroupSpec::unimodular(2, 2, 2).family() == "SU(2)");
  CHECK(GroupSpec::unimodular(1, 1, -1).family() == "SL2R~");
  CHECK(GroupSpec::unimodular(1, 1, 0).family() == "E2~");
  CHECK(GroupSpec::unimodular(1, -1, 0).family() == "Sol3");
  CHECK(GroupSpec::unimodular(1, 0, 0).family() == "Nil3");
  CHECK(GroupSpec::unimodular(0, 0, -1).family() == "Nil3");
  CHECK(GroupSpec::nonunimodular(0, 0).family() == "H3");
  CHECK(GroupSpec::nonunimodular(1, 0).family() == "H2xR(-4)");

  CHECK_THROWS_AS(GroupSpec::unimodular(-1, -1, 1), SpecError);
  CHECK_THROWS_AS(GroupSpec::nonunimodular(-0.5, 0), SpecError);
  CHECK_THROWS_AS(GroupSpec::nonunimodular(0, -2), SpecError);
}

TEST_CASE("group JSON round trip") {
  const GroupSpec g1 = GroupSpec::unimodular(1.5, 0.25, -0.5);
  const GroupSpec g2 = GroupSpec::from_json(g1.to_json());
  CHECK(g2.c()[0] == 1.5);
  CHECK(g2.c()[2] == -0.5);
  const GroupSpec n1 = GroupSpec::nonunimodular(0.5, 0.2);
  const GroupSpec n2 = GroupSpec::from_json(n1.to_json());
  CHECK(n2.a() == 0.5);
  CHECK(n2.b() == 0.2);
  CHECK_THROWS_AS(GroupSpec::from_json("{\"kind\":\"frobnicated\"}"), SpecError);
  CHECK_THROWS_AS(GroupSpec::from_json("not json"), SpecError);
}

TEST_CASE("exp_zA closed forms") {
  // a=0, b=0: A = I, e^{zA} = e^z I.
  for (double t : {-1.0, 0.3, 2.0}) {
    const Mat2 m = exp_zA(0, 0, t);
    CHECK(m(0, 0) == doctest::Approx(std::exp(t)).epsilon(1e-14));
    CHECK(m(1, 1) == doctest::Approx(std::exp(t)).epsilon(1e-14));
    CHECK(std::abs(m(0, 1)) < 1e-15);
    CHECK(std::abs(m(1, 0)) < 1e-15);
  }
  // z=0 is the identity for any parameters.
  const Mat2 id = exp_zA(0.7, 1.3, 0);
  CHECK(id(0, 0) == 1.0);
  CHECK(id(1, 1) == 1.0);
  CHECK(id(0, 1) == 0.0);
  // a=1, b=0: A = diag(2,0).
  for (double t : {-0.5, 1.0}) {
    const Mat2 m = exp_zA(1, 0, t);
    CHECK(m(0, 0) == doctest::Approx(std::exp(2 * t)).epsilon(1e-13));
    CHECK(m(1, 1) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("exp_zA one-parameter subgroup property") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dab(0, 2), dz(-2.5, 2.5);
  for (int k = 0; k < 100; ++k) {
    const double a = dab(rng), b = dab(rng);
    const double z1 = dz(rng), z2 = dz(rng);
    const Mat2 m1 = exp_zA(a, b, z1);
    const Mat2 m2 = exp_zA(a, b, z2);
    const Mat2 lhs = exp_zA(a, b, z1 + z2);
    const Mat2 rhs = m1 * m2;
    // Rounding in the product is relative to |M1| |M2|, which can exceed
    // the (cancelling) result scale.
    double n1 = 0, n2 = 0;
    for (int e = 0; e < 4; ++e) {
      n1 = std::max(n1, std::abs(m1.m[e]));
      n2 = std::max(n2, std::abs(m2.m[e]));
    }
    const double scale = std::max(1.0, n1 * n2);
    for (int e = 0; e < 4; ++e) CHECK(std::abs(lhs.m[e] - rhs.m[e]) < 1e-12 * scale);
  }
  // Series branch continuity: discriminant ~ 0 at a = b/sqrt(1+b^2).
  const double b = 0.8;
  const double a_star = b / std::sqrt(1 + b * b);
  const Mat2 m0 = exp_zA(a_star, b, 1.7);
  const Mat2 m1 = exp_zA(a_star + 1e-7, b, 1.7);
  for (int e = 0; e < 4; ++e) CHECK(std::abs(m0.m[e] - m1.m[e]) < 1e-5);
}

TEST_CASE("semidirect product law") {
  const GroupSpec h3 = GroupSpec::nonunimodular(0, 0);
  // Identity element.
  const SemidirectPoint p{0.3, -0.7, 1.1};
  const SemidirectPoint e{0, 0, 0};
  auto r = group_multiply(h3, e, p);
  CHECK(r.x == doctest::Approx(p.x));
  CHECK(r.y == doctest::Approx(p.y));
  CHECK(r.z == doctest::Approx(p.z));

  // H3: ((1,0),1)*((1,0),0) = ((1+e,0),1).
  r = group_multiply(h3, {1, 0, 1}, {1, 0, 0});
  CHECK(r.x == doctest::Approx(1.0 + std::exp(1.0)).epsilon(1e-14));
  CHECK(r.y == doctest::Approx(0.0));
  CHECK(r.z == doctest::Approx(1.0));

  // Abelian model: plain addition.
  const GroupSpec r3 = GroupSpec::unimodular(0, 0, 0);
  r = group_multiply(r3, {1, 2, 3}, {4, 5, 6});
  CHECK(r.x == 5.0);
  CHECK(r.y == 7.0);
  CHECK(r.z == 9.0);

  // Unimodular non-abelian groups have no semidirect model here.
  CHECK_THROWS_AS(group_multiply(GroupSpec::unimodular(2, 2, 2), e, p),
                  BackendUnsupportedError);
}

TEST_CASE("group multiply associativity and inverse") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> d(-1.5, 1.5), dab(0, 1.5);
  for (int k = 0; k < 50; ++k) {
    const GroupSpec g = GroupSpec::nonunimodular(dab(rng), dab(rng));
    const SemidirectPoint p1{d(rng), d(rng), d(rng)};
    const SemidirectPoint p2{d(rng), d(rng), d(rng)};
    const SemidirectPoint p3{d(rng), d(rng), d(rng)};
    const auto lhs = group_multiply(g, group_multiply(g, p1, p2), p3);
    const auto rhs = group_multiply(g, p1, group_multiply(g, p2, p3));
    CHECK(std::abs(lhs.x - rhs.x) < 1e-12 * (1 + std::abs(lhs.x)));
    CHECK(std::abs(lhs.y - rhs.y) < 1e-12 * (1 + std::abs(lhs.y)));
    CHECK(std::abs(lhs.z - rhs.z) < 1e-12);
    const auto inv = group_inverse(g, p1);
    const auto idp = group_multiply(g, p1, inv);
    CHECK(std::abs(idp.x) < 1e-12);
    CHECK(std::abs(idp.y) < 1e-12);
    CHECK(std::abs(idp.z) < 1e-12);
  }
}

TEST_CASE("frame_at") {
  const GroupSpec h3 = GroupSpec::nonunimodular(0, 0);
  auto f0 = frame_at(h3, {0.4, -0.2, 0});
  CHECK(f0[0].x == 1.0);
  CHECK(f0[1].y == 1.0);
  CHECK(f0[2].z == 1.0);
  auto f1 = frame_at(h3, {0, 0, 1});
  CHECK(f1[0].x == doctest::Approx(std::exp(1.0)));
  CHECK(f1[1].y == doctest::Approx(std::exp(1.0)));
  CHECK(f1[2].z == 1.0);
  auto f2 = frame_at(GroupSpec::nonunimodular(1, 0), {0, 0, 0.7});
  CHECK(f2[0].x == doctest::Approx(std::exp(1.4)).epsilon(1e-13));
  CHECK(f2[1].y == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("frame bracket [E3,E1] matches the structure equations by finite differences") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dab(0, 1.5), dz(-1, 1);
  for (int k = 0; k < 20; ++k) {
    const double a = dab(rng), b = dab(rng), z = dz(rng);
    const GroupSpec g = GroupSpec::nonunimodular(a, b);
    const double h = 1e-5;
    const auto fp = frame_at(g, {0, 0, z + h});
    const auto fm = frame_at(g, {0, 0, z - h});
    // [E3,E1] = dE1/dz in coordinates (E3 = d/dz, E1 depends only on z).
    const Vec3 fd = (1.0 / (2 * h)) * (fp[0] - fm[0]);
    const auto fr = frame_at(g, {0, 0, z});
    const Vec3 expected = (1 + a) * fr[0] + b * (1 + a) * fr[1];
    CHECK(std::abs(fd.x - expected.x) < 1e-8 * (1 + std::abs(expected.x)));
    CHECK(std::abs(fd.y - expected.y) < 1e-8 * (1 + std::abs(expected.y)));
  }
}

namespace {

template <typename T>
bool tables_equal(const ConnectionTableT<T>& x, const ConnectionTableT<T>& y) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if (!(x[i][j][k] == y[i][j][k])) return false;
  return true;
}

}  // namespace

TEST_CASE("Koszul connection reproduces the closed-form tables exactly (rationals)") {
  std::mt19937 rng(19);
  std::uniform_int_distribution<int> num(-12, 12), den(1, 9);

  for (int k = 0; k < 50; ++k) {
    Rational c1(num(rng), den(rng)), c2(num(rng), den(rng)), c3(num(rng), den(rng));
    const auto g = koszul_connection(brackets_unimodular(c1, c2, c3));
    const auto ref = lc_unimodular_table(mu_values_t(c1, c2, c3));
    CHECK(tables_equal(g, ref));
  }
  for (int k = 0; k < 50; ++k) {
    Rational a(std::abs(num(rng)), den(rng)), b(std::abs(num(rng)), den(rng));
    const auto g = koszul_connection(brackets_nonunimodular(a, b));
    const auto ref = lc_nonunimodular_table(a, b);
    CHECK(tables_equal(g, ref));
  }
}

TEST_CASE("connection table invariants") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> d(0, 3), dneg(-3, 0);
  for (int k = 0; k < 30; ++k) {
    GroupSpec g = (k % 2 == 0) ? GroupSpec::unimodular(d(rng), d(rng), dneg(rng))
                               : GroupSpec::nonunimodular(d(rng), d(rng));
    const auto gamma = connection_table(g);
    const auto b = (g.kind() == GroupKind::Unimodular)
                       ? brackets_unimodular(g.c()[0], g.c()[1], g.c()[2])
                       : brackets_nonunimodular(g.a(), g.b());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
          // Metric compatibility.
          CHECK(gamma[i][j][l] == doctest::Approx(-gamma[i][l][j]).epsilon(1e-14).scale(1.0));
          // Torsion against the brackets.
          CHECK(gamma[i][j][l] - gamma[j][i][l] ==
                doctest::Approx(b[i][j][l]).epsilon(1e-14).scale(1.0));
        }
  }

  // R3 is flat.
  const auto flat = connection_table(GroupSpec::unimodular(0, 0, 0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) CHECK(flat[i][j][k] == 0.0);

  // Spot values from the paper's tables.
  const GroupSpec uni = GroupSpec::unimodular(1.0, 2.0, 3.0);
  const auto gu = connection_table(uni);
  CHECK(gu[0][1][2] == doctest::Approx(uni.mu()[0]));
  CHECK(gu[1][0][2] == doctest::Approx(-uni.mu()[1]));
  const GroupSpec non = GroupSpec::nonunimodular(0.5, 0.25);
  const auto gn = connection_table(non);
  CHECK(gn[0][0][2] == doctest::Approx(1.5));   // (1+a)
  CHECK(gn[2][0][1] == doctest::Approx(0.25));  // b
  CHECK(gn[2][2][0] == 0.0);
  CHECK(gn[2][2][1] == 0.0);
  CHECK(gn[2][2][2] == 0.0);
}
