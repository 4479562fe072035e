#pragma once

#include <array>
#include <optional>
#include <string>

#include "pmc/linalg.hpp"

namespace pmc {

enum class GroupKind { Unimodular, NonUnimodular };

/// gamma[i][j][k] = <nabla_{E_i} E_j, E_k> in the canonical orthonormal frame.
template <typename T>
using ConnectionTableT = std::array<std::array<std::array<T, 3>, 3>, 3>;

using ConnectionTable = ConnectionTableT<double>;

/// bracket[i][j][k] = k-component of [E_i, E_j].
template <typename T>
using BracketTable = std::array<std::array<std::array<T, 3>, 3>, 3>;

template <typename T>
std::array<T, 3> mu_values_t(T c1, T c2, T c3) {
  const T half = T(1) / T(2);
  return {half * (-c1 + c2 + c3), half * (c1 - c2 + c3), half * (c1 + c2 - c3)};
}

inline std::array<double, 3> mu_values(double c1, double c2, double c3) {
  return mu_values_t(c1, c2, c3);
}

/// Structure constants of a unimodular group: [E2,E3]=c1 E1, [E3,E1]=c2 E2,
/// [E1,E2]=c3 E3.
template <typename T>
BracketTable<T> brackets_unimodular(T c1, T c2, T c3) {
  BracketTable<T> b{};
  b[1][2][0] = c1;
  b[2][1][0] = -c1;
  b[2][0][1] = c2;
  b[0][2][1] = -c2;
  b[0][1][2] = c3;
  b[1][0][2] = -c3;
  return b;
}

/// Brackets of R^2 x|_A R with A = A(a,b): [E1,E2]=0,
/// [E3,E1]=(1+a)E1 + b(1+a)E2, [E3,E2]=b(a-1)E1 + (1-a)E2.
template <typename T>
BracketTable<T> brackets_nonunimodular(T a, T b) {
  BracketTable<T> t{};
  const T one = T(1);
  t[2][0][0] = one + a;
  t[2][0][1] = b * (one + a);
  t[0][2][0] = -(one + a);
  t[0][2][1] = -(b * (one + a));
  t[2][1][0] = b * (a - one);
  t[2][1][1] = one - a;
  t[1][2][0] = -(b * (a - one));
  t[1][2][1] = -(one - a);
  return t;
}

/// Koszul formula for a left-invariant orthonormal frame:
/// gamma_ijk = ( <[Ei,Ej],Ek> - <[Ej,Ek],Ei> + <[Ek,Ei],Ej> ) / 2.
template <typename T>
ConnectionTableT<T> koszul_connection(const BracketTable<T>& b) {
  ConnectionTableT<T> g{};
  const T half = T(1) / T(2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        g[i][j][k] = half * (b[i][j][k] - b[j][k][i] + b[k][i][j]);
  return g;
}

/// The paper's closed-form connection for unimodular groups,
/// nabla_{E_i} E_j = mu_i E_i x E_j. Kept as an independent regression
/// fixture against the Koszul path.
template <typename T>
ConnectionTableT<T> lc_unimodular_table(const std::array<T, 3>& mu) {
  // epsilon[i][j][k] as the components of E_i x E_j.
  ConnectionTableT<T> g{};
  auto eps = [](int i, int j, int k) -> int {
    if (i == j || j == k || i == k) return 0;
    return ((j - i + 3) % 3 == 1) ? 1 : -1;
  };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        g[i][j][k] = mu[i] * T(eps(i, j, k));
  return g;
}

/// The paper's non-unimodular connection table (trace-2 normalization).
template <typename T>
ConnectionTableT<T> lc_nonunimodular_table(T a, T b) {
  ConnectionTableT<T> g{};
  const T one = T(1);
  g[0][0][2] = one + a;
  g[0][2][0] = -(one + a);
  g[0][1][2] = a * b;
  g[0][2][1] = -(a * b);
  g[1][0][2] = a * b;
  g[1][2][0] = -(a * b);
  g[1][1][2] = one - a;
  g[1][2][1] = -(one - a);
  g[2][0][1] = b;
  g[2][1][0] = -b;
  return g;
}

/// A metric Lie group model: unimodular (c1,c2,c3) or non-unimodular (a,b)
/// with trace(A)=2. Immutable after construction.
class GroupSpec {
 public:
  static GroupSpec unimodular(double c1, double c2, double c3);
  static GroupSpec nonunimodular(double a, double b);

  GroupKind kind() const { return kind_; }
  const std::array<double, 3>& c() const { return c_; }
  double a() const { return a_; }
  double b() const { return b_; }
  const std::array<double, 3>& mu() const { return mu_; }
  const std::string& family() const { return family_; }

  /// True for the (+,+,+) sign pattern (groups diffeomorphic to S^3).
  bool compact() const;
  /// True for the abelian model (0,0,0); admitted in the semidirect backend
  /// with A = 0 so R^3 exercises the same code paths.
  bool abelian() const;
  /// Whether semidirect-coordinate operations are available.
  bool has_semidirect_model() const;

  std::string to_json() const;
  static GroupSpec from_json(const std::string& text);

 private:
  GroupSpec() = default;
  GroupKind kind_ = GroupKind::Unimodular;
  std::array<double, 3> c_{};
  double a_ = 0, b_ = 0;
  std::array<double, 3> mu_{};
  std::string family_;
};

struct SemidirectPoint {
  double x = 0, y = 0, z = 0;
};

/// exp(z A(a,b)) in closed form by eigenvalue cases, with a 12-term scaled
/// Taylor series when the discriminant a^2(1+b^2) - b^2 degenerates.
Mat2 exp_zA(double a, double b, double z);

/// exp(zA) for the group's semidirect model (A=0 for the abelian model).
Mat2 semidirect_exp(const GroupSpec& g, double z);

/// Semidirect product law (p1,z1)*(p2,z2) = (p1 + e^{z1 A} p2, z1+z2).
SemidirectPoint group_multiply(const GroupSpec& g, const SemidirectPoint& p1,
                               const SemidirectPoint& p2);
SemidirectPoint group_inverse(const GroupSpec& g, const SemidirectPoint& p);

/// Left-invariant orthonormal frame {E1,E2,E3} in d/dx,d/dy,d/dz coordinates.
/// Depends only on pt.z.
std::array<Vec3, 3> frame_at(const GroupSpec& g, const SemidirectPoint& pt);

/// Connection coefficients from the Koszul formula applied to the bracket
/// table of the group.
ConnectionTable connection_table(const GroupSpec& g);

/// Classification name for a unimodular sign pattern (Table-style lookup).
std::string classify_unimodular(double c1, double c2, double c3);

}  // namespace pmc
