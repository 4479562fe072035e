#include "pmc/liegroup.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "pmc/errors.hpp"

namespace pmc {

namespace {

int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

std::string classify_unimodular(double c1, double c2, double c3) {
  int pos = 0, neg = 0, zero = 0;
  for (double c : {c1, c2, c3}) {
    const int s = sign_of(c);
    pos += s > 0;
    neg += s < 0;
    zero += s == 0;
  }
  // Flipping an odd number of frame axes negates all structure constants,
  // so the family only depends on the sign multiset up to overall negation.
  if (neg > pos) std::swap(pos, neg);
  if (pos == 3) return "SU(2)";
  if (pos == 2 && neg == 1) return "SL2R~";
  if (pos == 2 && zero == 1) return "E2~";
  if (pos == 1 && neg == 1) return "Sol3";
  if (pos == 1 && zero == 2) return "Nil3";
  return "R3";
}

GroupSpec GroupSpec::unimodular(double c1, double c2, double c3) {
  for (double c : {c1, c2, c3})
    if (!std::isfinite(c)) throw SpecError("unimodular structure constants must be finite");
  int neg = 0;
  for (double c : {c1, c2, c3}) neg += c < 0;
  if (neg >= 2) throw SpecError("at most one structure constant may be negative");
  GroupSpec g;
  g.kind_ = GroupKind::Unimodular;
  g.c_ = {c1, c2, c3};
  g.mu_ = mu_values(c1, c2, c3);
  g.family_ = classify_unimodular(c1, c2, c3);
  return g;
}

GroupSpec GroupSpec::nonunimodular(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw SpecError("non-unimodular parameters must be finite");
  if (a < 0 || b < 0) throw SpecError("non-unimodular parameters require a >= 0 and b >= 0");
  GroupSpec g;
  g.kind_ = GroupKind::NonUnimodular;
  g.a_ = a;
  g.b_ = b;
  if (a == 0 && b == 0)
    g.family_ = "H3";
  else if (a == 1 && b == 0)
    g.family_ = "H2xR(-4)";
  else
    g.family_ = "nonunimodular";
  return g;
}

bool GroupSpec::compact() const {
  return kind_ == GroupKind::Unimodular && c_[0] > 0 && c_[1] > 0 && c_[2] > 0;
}

bool GroupSpec::abelian() const {
  return kind_ == GroupKind::Unimodular && c_[0] == 0 && c_[1] == 0 && c_[2] == 0;
}

bool GroupSpec::has_semidirect_model() const {
  return kind_ == GroupKind::NonUnimodular || abelian();
}

std::string GroupSpec::to_json() const {
  nlohmann::json j;
  if (kind_ == GroupKind::Unimodular) {
    j["kind"] = "unimodular";
    j["c"] = {c_[0], c_[1], c_[2]};
  } else {
    j["kind"] = "nonunimodular";
    j["a"] = a_;
    j["b"] = b_;
  }
  return j.dump();
}

GroupSpec GroupSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(std::string("bad group JSON: ") + e.what());
  }
  const std::string kind = j.value("kind", "");
  if (kind == "unimodular") {
    const auto& c = j.at("c");
    if (!c.is_array() || c.size() != 3) throw SpecError("group JSON: \"c\" must have 3 entries");
    return unimodular(c[0].get<double>(), c[1].get<double>(), c[2].get<double>());
  }
  if (kind == "nonunimodular")
    return nonunimodular(j.at("a").get<double>(), j.at("b").get<double>());
  throw SpecError("group JSON: kind must be \"unimodular\" or \"nonunimodular\"");
}

Mat2 exp_zA(double a, double b, double z) {
  // A = I + B with B = [[a, -(1-a)b], [(1+a)b, -a]], B^2 = D I,
  // D = a^2(1+b^2) - b^2. Then e^{zA} = e^z (C(u) I + z S(u) B), u = D z^2,
  // C(u) = cosh(sqrt u), S(u) = sinh(sqrt u)/sqrt u as entire functions.
  const Mat2 B{{a, -(1 - a) * b, (1 + a) * b, -a}};
  const double D = a * a * (1 + b * b) - b * b;
  const double u = D * z * z;
  double C, S;
  if (std::abs(u) < 1e-8) {
    C = 0;
    S = 0;
    double term_c = 1, term_s = 1;
    for (int k = 0; k < 12; ++k) {
      C += term_c;
      S += term_s;
      term_c *= u / double((2 * k + 1) * (2 * k + 2));
      term_s *= u / double((2 * k + 2) * (2 * k + 3));
    }
  } else if (u > 0) {
    const double s = std::sqrt(u);
    C = std::cosh(s);
    S = std::sinh(s) / s;
  } else {
    const double s = std::sqrt(-u);
    C = std::cos(s);
    S = std::sin(s) / s;
  }
  const double ez = std::exp(z);
  Mat2 r = C * Mat2::identity() + (z * S) * B;
  return ez * r;
}

Mat2 semidirect_exp(const GroupSpec& g, double z) {
  if (g.kind() == GroupKind::NonUnimodular) return exp_zA(g.a(), g.b(), z);
  if (g.abelian()) return Mat2::identity();
  throw BackendUnsupportedError(
      "semidirect model only exists for non-unimodular groups and the abelian model; "
      "use the quaternion backend for (+,+,+)");
}

SemidirectPoint group_multiply(const GroupSpec& g, const SemidirectPoint& p1,
                               const SemidirectPoint& p2) {
  const Mat2 e = semidirect_exp(g, p1.z);
  const auto q = e.apply(p2.x, p2.y);
  return {p1.x + q[0], p1.y + q[1], p1.z + p2.z};
}

SemidirectPoint group_inverse(const GroupSpec& g, const SemidirectPoint& p) {
  const Mat2 e = semidirect_exp(g, -p.z);
  const auto q = e.apply(p.x, p.y);
  return {-q[0], -q[1], -p.z};
}

std::array<Vec3, 3> frame_at(const GroupSpec& g, const SemidirectPoint& pt) {
  const Mat2 e = semidirect_exp(g, pt.z);
  return {Vec3{e(0, 0), e(1, 0), 0}, Vec3{e(0, 1), e(1, 1), 0}, Vec3{0, 0, 1}};
}

ConnectionTable connection_table(const GroupSpec& g) {
  if (g.kind() == GroupKind::Unimodular) {
    const auto& c = g.c();
    return koszul_connection(brackets_unimodular(c[0], c[1], c[2]));
  }
  return koszul_connection(brackets_nonunimodular(g.a(), g.b()));
}

}  // namespace pmc
