#include "pmc/weierstrass.hpp"

#include <algorithm>
#include <cmath>

#include "pmc/errors.hpp"
#include "pmc/parallel.hpp"

namespace pmc {

MeshBackend default_backend(const GroupSpec& g) {
  if (g.abelian()) return MeshBackend::Euclidean;
  if (g.kind() == GroupKind::NonUnimodular) return MeshBackend::Semidirect;
  if (g.compact()) return MeshBackend::SU2;
  throw BackendUnsupportedError(
      "no coordinate backend for unimodular sign patterns other than (0,0,0) and (+,+,+)");
}

std::array<double, 3> su2_frame_scales(const GroupSpec& g) {
  if (!g.compact()) throw BackendUnsupportedError("quaternion frame needs the (+,+,+) pattern");
  const auto& c = g.c();
  return {std::sqrt(c[1] * c[2]) / 2, std::sqrt(c[2] * c[0]) / 2, std::sqrt(c[0] * c[1]) / 2};
}

SurfaceMesh::SurfaceMesh(Grid2D grid, MeshBackend backend, GroupSpec group)
    : grid_(grid), backend_(backend), group_(std::move(group)) {
  if (backend_ == MeshBackend::SU2)
    qpos_.resize(grid_.size());
  else
    pos_.resize(grid_.size());
  normal_.resize(grid_.size());
}

double SurfaceMesh::sup_distance(const SurfaceMesh& a, const SurfaceMesh& b) {
  if (a.backend_ != b.backend_ || a.grid_.size() != b.grid_.size())
    throw SpecError("sup_distance: meshes are not comparable");
  double worst = 0;
  for (std::size_t k = 0; k < a.grid_.size(); ++k) {
    if (a.backend_ == MeshBackend::SU2)
      worst = std::max(worst, distance(a.qpos_[k], b.qpos_[k]));
    else
      worst = std::max(worst, norm(a.pos_[k] - b.pos_[k]));
  }
  return worst;
}

namespace {

struct IntegrationData {
  std::vector<Vec3> vx, vy;  // frame components of psi_x and psi_y
  double max_gz = 0, min_gz = 0;
};

// Frame velocities 2 Re A_i and -2 Im A_i at every node.
IntegrationData build_velocities(const TwoChartComplexField& f, const GroupSpec& grp,
                                 int threads) {
  const Grid2D& g = f.grid();
  IntegrationData data;
  data.vx.resize(g.size());
  data.vy.resize(g.size());
  std::vector<double> gz_abs(g.size());
  parallel_for(g.size(), threads, [&](std::size_t idx) {
    const int j = int(idx) / g.nx, i = int(idx) % g.nx;
    const WirtingerDerivs d = wirtinger(f, i, j);
    const EtaCoeffs ec = eta_coeffs(f.g(i, j), d.g_z, f.H(i, j), grp);
    data.vx[idx] = {2 * ec.A[0].real(), 2 * ec.A[1].real(), 2 * ec.A[2].real()};
    data.vy[idx] = {-2 * ec.A[0].imag(), -2 * ec.A[1].imag(), -2 * ec.A[2].imag()};
    gz_abs[idx] = std::abs(d.g_z);
  });
  data.max_gz = *std::max_element(gz_abs.begin(), gz_abs.end());
  data.min_gz = *std::min_element(gz_abs.begin(), gz_abs.end());
  return data;
}

// Relative size of the PDE residual against the magnitudes of its terms.
double relative_residual(const TwoChartComplexField& f, const GroupSpec& grp, int threads) {
  const Grid2D& g = f.grid();
  std::vector<double> res(g.size()), scale(g.size());
  parallel_for(g.size(), threads, [&](std::size_t idx) {
    const int j = int(idx) / g.nx, i = int(idx) % g.nx;
    const WirtingerDerivs d = wirtinger(f, i, j);
    const ChartPoint& gp = f.g(i, j);
    const PotentialEval ev = potential_eval(grp, f.H(i, j), gp.in_chart(d.chart));
    if (std::abs(ev.R) < 1e-13) throw PotentialZeroError("reconstruct: potential vanishes");
    const Complex c1 = ev.R_q / ev.R;
    const Complex c2 = ev.R_qbar / ev.R - std::conj(ev.R_q) / std::conj(ev.R);
    const Complex c3 = ev.R_H / ev.R;
    const Complex t1 = c1 * d.g_z * d.g_zb;
    const Complex t2 = c2 * d.g_z * std::conj(d.g_z);
    const Complex t3 = c3 * d.H_zb * d.g_z;
    res[idx] = std::abs(d.g_zzb - t1 - t2 - t3);
    // |g_z|^2 floors the scale: near-linear solution fields have all terms
    // individually tiny.
    scale[idx] = std::max(std::abs(d.g_zzb) + std::abs(t1) + std::abs(t2) + std::abs(t3),
                          std::norm(d.g_z));
  });
  const double worst = *std::max_element(res.begin(), res.end());
  const double s = *std::max_element(scale.begin(), scale.end());
  return worst / std::max(s, 1e-30);
}

// Midpoint of a velocity sample along one grid line, 4-point Lagrange.
// sample(k) must be valid for the indices this chooses.
template <typename SampleFn>
Vec3 midpoint_value(const SampleFn& sample, int a, int dir, int lo, int hi, bool periodic) {
  const int b = a + dir;
  auto ok = [&](int k) { return periodic || (k >= lo && k <= hi); };
  if (ok(a - dir) && ok(b + dir)) {
    const Vec3 m = (-1.0 / 16) * sample(a - dir) + (9.0 / 16) * sample(a) +
                   (9.0 / 16) * sample(b) + (-1.0 / 16) * sample(b + dir);
    return m;
  }
  if (ok(b + 2 * dir)) {  // one-sided at the start of the line
    return (5.0 / 16) * sample(a) + (15.0 / 16) * sample(b) + (-5.0 / 16) * sample(b + dir) +
           (1.0 / 16) * sample(b + 2 * dir);
  }
  // one-sided at the end of the line
  return (1.0 / 16) * sample(a - 2 * dir) + (-5.0 / 16) * sample(a - dir) +
         (15.0 / 16) * sample(a) + (5.0 / 16) * sample(b);
}

struct Stepper {
  MeshBackend backend;
  const GroupSpec& grp;
  std::array<double, 3> su2_scale{};

  Vec3 semidirect_rhs(const Vec3& p, const Vec3& u) const {
    const Mat2 e = semidirect_exp(grp, p.z);
    const auto xy = e.apply(u.x, u.y);
    return {xy[0], xy[1], u.z};
  }
  Quat su2_rhs(const Quat& q, const Vec3& u) const {
    const Quat a{0, u.x * su2_scale[0], u.y * su2_scale[1], u.z * su2_scale[2]};
    return q * a;
  }

  Vec3 step(const Vec3& p, double dt, const Vec3& u0, const Vec3& um, const Vec3& u1) const {
    if (backend == MeshBackend::Euclidean)
      return p + (dt / 6.0) * (u0 + 4.0 * um + u1);
    const Vec3 k1 = semidirect_rhs(p, u0);
    const Vec3 k2 = semidirect_rhs(p + (dt / 2) * k1, um);
    const Vec3 k3 = semidirect_rhs(p + (dt / 2) * k2, um);
    const Vec3 k4 = semidirect_rhs(p + dt * k3, u1);
    return p + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  Quat step(const Quat& q, double dt, const Vec3& u0, const Vec3& um, const Vec3& u1) const {
    const Quat k1 = su2_rhs(q, u0);
    const Quat k2 = su2_rhs(q + (dt / 2) * k1, um);
    const Quat k3 = su2_rhs(q + (dt / 2) * k2, um);
    const Quat k4 = su2_rhs(q + dt * k3, u1);
    return (q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).normalized();
  }
};

// March along one grid line from the base node in direction dir.
template <typename State, typename VelAt>
void march(std::vector<State>& out, const Grid2D& grid, const Stepper& st, const VelAt& vel,
           int fixed, int from, int to, int dir, bool along_x) {
  const double dt = dir * grid.h;
  const int lo = 0;
  const int hi = along_x ? grid.nx - 1 : grid.ny - 1;
  const bool periodic = along_x ? grid.periodic_x : grid.periodic_y;
  auto idx = [&](int k) {
    const int kk = periodic ? ((k % (hi + 1)) + hi + 1) % (hi + 1) : k;
    return along_x ? grid.index(kk, fixed) : grid.index(fixed, kk);
  };
  auto sample = [&](int k) { return vel(idx(k)); };
  for (int k = from; k != to; k += dir) {
    const Vec3 u0 = sample(k);
    const Vec3 u1 = sample(k + dir);
    const Vec3 um = midpoint_value(sample, k, dir, lo, hi, periodic);
    out[idx(k + dir)] = st.step(out[idx(k)], dt, u0, um, u1);
  }
}

template <typename State>
std::vector<State> integrate(const Grid2D& grid, const Stepper& st, const IntegrationData& data,
                             const State& base, int i0, int j0, bool transpose) {
  std::vector<State> out(grid.size());
  out[grid.index(i0, j0)] = base;
  auto vx = [&](std::size_t k) { return data.vx[k]; };
  auto vy = [&](std::size_t k) { return data.vy[k]; };
  if (!transpose) {
    march(out, grid, st, vx, j0, i0, grid.nx - 1, +1, true);
    march(out, grid, st, vx, j0, i0, 0, -1, true);
    for (int i = 0; i < grid.nx; ++i) {
      march(out, grid, st, vy, i, j0, grid.ny - 1, +1, false);
      march(out, grid, st, vy, i, j0, 0, -1, false);
    }
  } else {
    march(out, grid, st, vy, i0, j0, grid.ny - 1, +1, false);
    march(out, grid, st, vy, i0, j0, 0, -1, false);
    for (int j = 0; j < grid.ny; ++j) {
      march(out, grid, st, vx, j, i0, grid.nx - 1, +1, true);
      march(out, grid, st, vx, j, i0, 0, -1, true);
    }
  }
  return out;
}

template <typename State>
ReconstructResult reconstruct_impl(const TwoChartComplexField& f, const GroupSpec& grp,
                                   MeshBackend backend, const State& base,
                                   const ReconstructOptions& opt) {
  const Grid2D& grid = f.grid();
  if (grid.nx < 4 || grid.ny < 4) throw SpecError("reconstruct: grid too small");

  if (opt.check_residual) {
    const double rel = relative_residual(f, grp, opt.threads);
    if (rel > opt.residual_rel_tol)
      throw SpecError("reconstruct: field does not satisfy the Gauss-map equation (relative "
                      "residual " +
                      std::to_string(rel) + ")");
  }
  const IntegrationData data = build_velocities(f, grp, opt.threads);
  if (data.max_gz <= 0 || data.min_gz < 1e-10 * data.max_gz)
    throw SpecError("reconstruct: g_z vanishes somewhere on the field");

  Stepper st{backend, grp};
  if (backend == MeshBackend::SU2) st.su2_scale = su2_frame_scales(grp);

  const int i0 = opt.base_i >= 0 ? opt.base_i : grid.nx / 2;
  const int j0 = opt.base_j >= 0 ? opt.base_j : grid.ny / 2;
  if (i0 >= grid.nx || j0 >= grid.ny) throw SpecError("reconstruct: base node out of range");

  auto states = integrate(grid, st, data, base, i0, j0, opt.transpose_order);

  ReconstructResult result{SurfaceMesh(grid, backend, grp)};
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if constexpr (std::is_same_v<State, Quat>)
        result.mesh.qpos(i, j) = states[grid.index(i, j)];
      else
        result.mesh.pos(i, j) = states[grid.index(i, j)];
      result.mesh.normal(i, j) = stereo_inv(f.g(i, j));
    }
  result.mesh.mark_normals();

  if (opt.compute_integrability) {
    auto other = integrate(grid, st, data, base, i0, j0, !opt.transpose_order);
    double gap = 0;
    for (std::size_t k = 0; k < other.size(); ++k) {
      if constexpr (std::is_same_v<State, Quat>)
        gap = std::max(gap, distance(states[k], other[k]));
      else
        gap = std::max(gap, norm(states[k] - other[k]));
    }
    result.integrability_gap = gap;
    const double extent = grid.h * std::max(grid.nx, grid.ny);
    result.integrability_warning = gap > 1e-3 * extent;
  }
  return result;
}

}  // namespace

ReconstructResult reconstruct(const TwoChartComplexField& f, const GroupSpec& grp,
                              const Vec3& base, const ReconstructOptions& opt) {
  const MeshBackend backend = default_backend(grp);
  if (backend == MeshBackend::SU2)
    throw BackendUnsupportedError("reconstruct: this group needs a quaternion base point");
  return reconstruct_impl(f, grp, backend, base, opt);
}

ReconstructResult reconstruct(const TwoChartComplexField& f, const GroupSpec& grp,
                              const Quat& base, const ReconstructOptions& opt) {
  if (default_backend(grp) != MeshBackend::SU2)
    throw BackendUnsupportedError("reconstruct: quaternion base needs a (+,+,+) group");
  return reconstruct_impl(f, grp, MeshBackend::SU2, base.normalized(), opt);
}

SurfaceMesh left_translate(const SurfaceMesh& mesh, const SemidirectPoint& g) {
  if (mesh.backend() == MeshBackend::SU2)
    throw SpecError("left_translate: semidirect element on a quaternion mesh");
  SurfaceMesh out = mesh;
  const Grid2D& grid = mesh.grid();
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const Vec3& p = mesh.pos(i, j);
      if (mesh.backend() == MeshBackend::Euclidean) {
        out.pos(i, j) = p + Vec3{g.x, g.y, g.z};
      } else {
        const SemidirectPoint r = group_multiply(mesh.group(), g, {p.x, p.y, p.z});
        out.pos(i, j) = {r.x, r.y, r.z};
      }
    }
  return out;
}

SurfaceMesh left_translate(const SurfaceMesh& mesh, const Quat& g) {
  if (mesh.backend() != MeshBackend::SU2)
    throw SpecError("left_translate: quaternion element on a coordinate mesh");
  SurfaceMesh out = mesh;
  const Grid2D& grid = mesh.grid();
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) out.qpos(i, j) = (g * mesh.qpos(i, j)).normalized();
  return out;
}

namespace {

// Second-order first derivative of a node-indexed quantity.
template <typename Get>
auto line_derivative(const Get& get, int k, int n, bool periodic, double h) -> decltype(get(0)) {
  auto wrap = [&](int t) { return ((t % n) + n) % n; };
  if (periodic) return (1.0 / (2 * h)) * (get(wrap(k + 1)) - get(wrap(k - 1)));
  if (k >= 1 && k + 1 < n) return (1.0 / (2 * h)) * (get(k + 1) - get(k - 1));
  if (k == 0)
    return (1.0 / (6 * h)) * (-11.0 * get(0) + 18.0 * get(1) + (-9.0) * get(2) + 2.0 * get(3));
  return (1.0 / (6 * h)) *
         (11.0 * get(n - 1) + (-18.0) * get(n - 2) + 9.0 * get(n - 3) + (-2.0) * get(n - 4));
}

// Fourth-order first derivative for the tangent fields. These get
// differentiated again, so their truncation error must stay below O(h^2)
// uniformly, including across the stencil switch at the edges.
template <typename Get>
auto line_derivative4(const Get& get, int k, int n, bool periodic, double h) -> decltype(get(0)) {
  if (n < 5) return line_derivative(get, k, n, periodic, h);
  auto wrap = [&](int t) { return ((t % n) + n) % n; };
  auto central = [&](auto at) {
    return (1.0 / (12 * h)) *
           (at(-2) + (-8.0) * at(-1) + 8.0 * at(1) + (-1.0) * at(2));
  };
  if (periodic) return central([&](int t) { return get(wrap(k + t)); });
  if (k >= 2 && k + 2 < n) return central([&](int t) { return get(k + t); });
  auto fwd = [&](int base, double sgn) {
    // offsets 0..4 from the end, with the sign flip for the far edge
    auto at = [&](int t) { return get(base + int(sgn) * t); };
    if (base == 0 || base == n - 1)
      return (sgn / (12 * h)) * ((-25.0) * at(0) + 48.0 * at(1) + (-36.0) * at(2) +
                                 16.0 * at(3) + (-3.0) * at(4));
    return (sgn / (12 * h)) *
           ((-3.0) * at(-1) + (-10.0) * at(0) + 18.0 * at(1) + (-6.0) * at(2) + at(3));
  };
  if (k <= 1) return fwd(k, +1.0);
  return fwd(k, -1.0);
}

Vec3 frame_components(const SurfaceMesh& mesh, int i, int j, const Vec3& dpos_xyz,
                      const Quat& dpos_quat) {
  switch (mesh.backend()) {
    case MeshBackend::Euclidean:
      return dpos_xyz;
    case MeshBackend::Semidirect: {
      const Mat2 e = semidirect_exp(mesh.group(), -mesh.pos(i, j).z);
      const auto xy = e.apply(dpos_xyz.x, dpos_xyz.y);
      return {xy[0], xy[1], dpos_xyz.z};
    }
    case MeshBackend::SU2: {
      const Quat c = mesh.qpos(i, j).conj() * dpos_quat;
      const auto lam = su2_frame_scales(mesh.group());
      return {c.x / lam[0], c.y / lam[1], c.z / lam[2]};
    }
  }
  return {};
}

}  // namespace

TangentField mesh_tangents(const SurfaceMesh& mesh) {
  const Grid2D& g = mesh.grid();
  TangentField t;
  t.tu.resize(g.size());
  t.tv.resize(g.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      Vec3 du_xyz{}, dv_xyz{};
      Quat du_q{0, 0, 0, 0}, dv_q{0, 0, 0, 0};
      if (mesh.backend() == MeshBackend::SU2) {
        du_q = line_derivative4([&](int k) { return mesh.qpos(k, j); }, i, g.nx, g.periodic_x, g.h);
        dv_q = line_derivative4([&](int k) { return mesh.qpos(i, k); }, j, g.ny, g.periodic_y, g.h);
      } else {
        du_xyz = line_derivative4([&](int k) { return mesh.pos(k, j); }, i, g.nx, g.periodic_x, g.h);
        dv_xyz = line_derivative4([&](int k) { return mesh.pos(i, k); }, j, g.ny, g.periodic_y, g.h);
      }
      t.tu[g.index(i, j)] = frame_components(mesh, i, j, du_xyz, du_q);
      t.tv[g.index(i, j)] = frame_components(mesh, i, j, dv_xyz, dv_q);
    }
  return t;
}

TwoChartComplexField mesh_gauss_map(const SurfaceMesh& mesh) {
  const Grid2D& g = mesh.grid();
  const TangentField t = mesh_tangents(mesh);
  std::vector<ChartPoint> gv(g.size());
  std::vector<double> hv(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec3 n = cross(t.tu[k], t.tv[k]);
    const double nn = norm(n);
    if (nn < 1e-12 * (norm(t.tu[k]) * norm(t.tv[k]) + 1e-300))
      throw DegenerateTangentError("mesh_gauss_map: tangents are parallel");
    gv[k] = stereo((1.0 / nn) * n);
  }
  return TwoChartComplexField(g, std::move(gv), std::move(hv));
}

std::vector<double> mesh_mean_curvature(const SurfaceMesh& mesh) {
  const Grid2D& g = mesh.grid();
  const TangentField t = mesh_tangents(mesh);
  const ConnectionTable gamma = connection_table(mesh.group());
  std::vector<double> H(g.size());

  auto gamma_term = [&](const Vec3& X, const Vec3& Y) {
    const double xs[3] = {X.x, X.y, X.z}, ys[3] = {Y.x, Y.y, Y.z};
    Vec3 r{};
    double* rc[3] = {&r.x, &r.y, &r.z};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) *rc[k] += xs[i] * ys[j] * gamma[i][j][k];
    return r;
  };

  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t idx = g.index(i, j);
      const Vec3 tu = t.tu[idx], tv = t.tv[idx];
      const Vec3 nvec = cross(tu, tv);
      const double nn = norm(nvec);
      if (nn < 1e-12 * (norm(tu) * norm(tv) + 1e-300))
        throw DegenerateTangentError("mesh_mean_curvature: tangents are parallel");
      const Vec3 nu = (1.0 / nn) * nvec;

      const Vec3 du_tu =
          line_derivative([&](int k) { return t.tu[g.index(k, j)]; }, i, g.nx, g.periodic_x, g.h);
      const Vec3 dv_tu =
          line_derivative([&](int k) { return t.tu[g.index(i, k)]; }, j, g.ny, g.periodic_y, g.h);
      const Vec3 du_tv =
          line_derivative([&](int k) { return t.tv[g.index(k, j)]; }, i, g.nx, g.periodic_x, g.h);
      const Vec3 dv_tv =
          line_derivative([&](int k) { return t.tv[g.index(i, k)]; }, j, g.ny, g.periodic_y, g.h);

      const double Luu = dot(du_tu + gamma_term(tu, tu), nu);
      const double Luv = 0.5 * (dot(du_tv + gamma_term(tu, tv), nu) +
                                dot(dv_tu + gamma_term(tv, tu), nu));
      const double Lvv = dot(dv_tv + gamma_term(tv, tv), nu);
      const double E = dot(tu, tu), F = dot(tu, tv), G = dot(tv, tv);
      H[idx] = (G * Luu - 2 * F * Luv + E * Lvv) / (2 * (E * G - F * F));
    }
  return H;
}

TwoChartComplexField mesh_extract_field(const SurfaceMesh& mesh) {
  TwoChartComplexField f = mesh_gauss_map(mesh);
  const std::vector<double> H = mesh_mean_curvature(mesh);
  const Grid2D& g = mesh.grid();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f.H(i, j) = H[g.index(i, j)];
  return f;
}

std::vector<double> compatibility_residual(const TwoChartComplexField& f, const GroupSpec& grp) {
  const Grid2D& g = f.grid();
  if (g.nx < 4 || g.ny < 4)
    throw StencilUnavailableError("compatibility_residual: grid too small for stencils");

  std::vector<std::array<Complex, 3>> A(g.size());
  double max_gz = 0, max_g = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const WirtingerDerivs d = wirtinger(f, i, j);
      const EtaCoeffs ec = eta_coeffs(f.g(i, j), d.g_z, f.H(i, j), grp);
      A[g.index(i, j)] = ec.A;
      max_gz = std::max(max_gz, std::abs(d.g_z));
      max_g = std::max(max_g, std::abs(f.g(i, j).value));
    }
  if (max_gz < 1e-10 * (1 + max_g))
    throw SpecError("compatibility_residual: g_z vanishes identically (condition (2) fails)");

  const ConnectionTable gamma = connection_table(grp);
  // Only plaquettes whose corner nodes carry centred stencils: one-sided
  // node data has a different truncation structure and would pollute the
  // mixed-partial defect.
  const int ilo = g.periodic_x ? 0 : 1, ihi = g.periodic_x ? g.nx - 1 : g.nx - 3;
  const int jlo = g.periodic_y ? 0 : 1, jhi = g.periodic_y ? g.ny - 1 : g.ny - 3;
  if (ihi < ilo || jhi < jlo)
    throw StencilUnavailableError("compatibility_residual: no interior plaquettes");
  std::vector<double> out;
  out.reserve(std::size_t(ihi - ilo + 1) * (jhi - jlo + 1));
  for (int j = jlo; j <= jhi; ++j)
    for (int i = ilo; i <= ihi; ++i) {
      const int ip = (i + 1) % g.nx, jp = (j + 1) % g.ny;
      const std::array<Complex, 3>* c[4] = {&A[g.index(i, j)], &A[g.index(ip, j)],
                                            &A[g.index(ip, jp)], &A[g.index(i, jp)]};
      double mag2 = 0;
      for (int k = 0; k < 3; ++k) {
        const Complex dxA = (((*c[1])[k] - (*c[0])[k]) + ((*c[2])[k] - (*c[3])[k])) / (2 * g.h);
        const Complex dyA = (((*c[3])[k] - (*c[0])[k]) + ((*c[2])[k] - (*c[1])[k])) / (2 * g.h);
        const Complex dzbA = 0.5 * (dxA + Complex(0, 1) * dyA);
        Complex gterm = 0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            if (gamma[a][b][k] == 0.0) continue;
            Complex prod = 0;
            for (int corner = 0; corner < 4; ++corner)
              prod += std::conj((*c[corner])[a]) * (*c[corner])[b];
            gterm += 0.25 * prod * gamma[a][b][k];
          }
        // defect_k = dzb A_k - dz conj(A_k) + 2i Im(Gamma term); both pieces
        // are purely imaginary.
        const Complex defect = Complex(0, 2) * (dzbA.imag() + gterm.imag());
        mag2 += std::norm(defect);
      }
      out.push_back(std::sqrt(mag2));
    }
  return out;
}

}  // namespace pmc
