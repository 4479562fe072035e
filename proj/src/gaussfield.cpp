#include "pmc/gaussfield.hpp"

#include <cmath>

#include "pmc/errors.hpp"
#include "pmc/parallel.hpp"

namespace pmc {

namespace {
constexpr Complex kI{0, 1};
constexpr double kPotentialFloor = 1e-13;
}  // namespace

ChartPoint stereo(const Vec3& nu) {
  const double n = std::sqrt(dot(nu, nu));
  if (std::abs(n - 1.0) > 1e-10) throw SpecError("stereo: input must be a unit vector");
  if (nu.z <= 0) {
    // w = (nu1 - i nu2) / (1 - nu3) stays stable through the south pole.
    return {Chart::W, Complex(nu.x, -nu.y) / (1.0 - nu.z)};
  }
  return ChartPoint::from_q(Complex(nu.x, nu.y) / (1.0 + nu.z));
}

Vec3 stereo_inv(const ChartPoint& p) { return PrescribedH::sphere_of(p); }

TwoChartComplexField::TwoChartComplexField(Grid2D grid, std::vector<ChartPoint> g,
                                           std::vector<double> H)
    : grid_(grid), g_(std::move(g)), H_(std::move(H)) {
  if (g_.size() != grid_.size() || H_.size() != grid_.size())
    throw SpecError("field construction: node count mismatch");
}

TwoChartComplexField TwoChartComplexField::sample(const Grid2D& grid,
                                                  const std::function<Complex(Complex)>& g,
                                                  const std::function<double(Complex)>& H) {
  std::vector<ChartPoint> gv(grid.size());
  std::vector<double> hv(grid.size());
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const Complex z = grid.node(i, j);
      gv[grid.index(i, j)] = ChartPoint::from_q(g(z));
      hv[grid.index(i, j)] = H(z);
    }
  return TwoChartComplexField(grid, std::move(gv), std::move(hv));
}

TwoChartComplexField TwoChartComplexField::sample_nu(const Grid2D& grid,
                                                     const std::function<Vec3(Complex)>& nu,
                                                     const std::function<double(Complex)>& H) {
  std::vector<ChartPoint> gv(grid.size());
  std::vector<double> hv(grid.size());
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const Complex z = grid.node(i, j);
      gv[grid.index(i, j)] = stereo(nu(z));
      hv[grid.index(i, j)] = H(z);
    }
  return TwoChartComplexField(grid, std::move(gv), std::move(hv));
}

Complex TwoChartComplexField::g_in_chart(int i, int j, Chart target) const {
  const ChartPoint& p = g_[grid_.index(i, j)];
  if (p.chart == target) return p.value;
  const Complex v = 1.0 / p.value;
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw StencilUnavailableError("chart conversion hit a pole inside a stencil");
  return v;
}

namespace {

// Index resolver: wraps periodic directions, returns -1 when outside.
int resolve(int k, int n, bool periodic) {
  if (periodic) return ((k % n) + n) % n;
  return (k >= 0 && k < n) ? k : -1;
}

struct Stencil1D {
  // value(t) samples f at offset t from the node along one grid direction.
  std::function<Complex(int)> value;
  bool has(int lo, int hi) const {
    for (int t = lo; t <= hi; ++t)
      if (!avail(t)) return false;
    return true;
  }
  std::function<bool(int)> avail;
};

// Second-order first and second derivatives with one-sided fallbacks.
void derive_1d(const Stencil1D& s, double h, Complex& d1, Complex& d2) {
  if (s.has(-1, 1)) {
    d1 = (s.value(1) - s.value(-1)) / (2 * h);
    d2 = (s.value(1) - 2.0 * s.value(0) + s.value(-1)) / (h * h);
    return;
  }
  if (s.has(0, 3)) {
    d1 = (-3.0 * s.value(0) + 4.0 * s.value(1) - s.value(2)) / (2 * h);
    d2 = (2.0 * s.value(0) - 5.0 * s.value(1) + 4.0 * s.value(2) - s.value(3)) / (h * h);
    return;
  }
  if (s.has(-3, 0)) {
    d1 = (3.0 * s.value(0) - 4.0 * s.value(-1) + s.value(-2)) / (2 * h);
    d2 = (2.0 * s.value(0) - 5.0 * s.value(-1) + 4.0 * s.value(-2) - s.value(-3)) / (h * h);
    return;
  }
  throw StencilUnavailableError("no second-order stencil at node");
}

}  // namespace

WirtingerDerivs wirtinger(const TwoChartComplexField& f, int i, int j,
                          std::optional<Chart> force) {
  const Grid2D& g = f.grid();
  const Chart chart = force.value_or(f.g(i, j).chart);

  auto avail_x = [&](int t) { return resolve(i + t, g.nx, g.periodic_x) >= 0; };
  auto avail_y = [&](int t) { return resolve(j + t, g.ny, g.periodic_y) >= 0; };
  auto gx = [&](int t) { return f.g_in_chart(resolve(i + t, g.nx, g.periodic_x), j, chart); };
  auto gy = [&](int t) { return f.g_in_chart(i, resolve(j + t, g.ny, g.periodic_y), chart); };
  auto hx = [&](int t) { return Complex(f.H(resolve(i + t, g.nx, g.periodic_x), j), 0); };
  auto hy = [&](int t) { return Complex(f.H(i, resolve(j + t, g.ny, g.periodic_y)), 0); };

  Complex gx1, gx2, gy1, gy2;
  derive_1d({gx, avail_x}, g.h, gx1, gx2);
  derive_1d({gy, avail_y}, g.h, gy1, gy2);
  Complex hx1, hx2, hy1, hy2;
  derive_1d({hx, avail_x}, g.h, hx1, hx2);
  derive_1d({hy, avail_y}, g.h, hy1, hy2);

  WirtingerDerivs d;
  d.chart = chart;
  d.g_z = 0.5 * (gx1 - kI * gy1);
  d.g_zb = 0.5 * (gx1 + kI * gy1);
  d.g_zzb = 0.25 * (gx2 + gy2);
  d.H_zb = 0.5 * (hx1 + kI * hy1);
  return d;
}

EtaCoeffs eta_coeffs(const ChartPoint& g, Complex g_z, double H, const GroupSpec& grp) {
  const PotentialEval ev = potential_eval(grp, H, g);
  if (std::abs(ev.R) < kPotentialFloor)
    throw PotentialZeroError("eta_coeffs: potential vanishes at evaluation point");
  const Complex vb = std::conj(g.value);
  EtaCoeffs out;
  out.eta = 4.0 * vb * g_z / ev.R;
  Complex A1 = (vb * vb - 1.0) * g_z / ev.R;
  Complex A2 = kI * (vb * vb + 1.0) * g_z / ev.R;
  Complex A3 = 2.0 * vb * g_z / ev.R;
  if (g.chart == Chart::W) {
    // q -> 1/q is the half-turn about the first frame axis on the target
    // sphere, so the true frame components flip sign in slots 2 and 3.
    A2 = -A2;
    A3 = -A3;
  }
  out.A = {A1, A2, A3};
  const double s = 1.0 + std::norm(g.value);
  out.lambda = 4.0 * s * s * std::norm(g_z) / std::norm(ev.R);
  return out;
}

Complex pde_residual_at(const GroupSpec& grp, const ChartPoint& g, double H,
                        const WirtingerDerivs& d) {
  const PotentialEval ev = potential_eval(grp, H, g.in_chart(d.chart));
  if (std::abs(ev.R) < kPotentialFloor)
    throw PotentialZeroError("pde_residual: potential vanishes at evaluation point");
  const Complex c1 = ev.R_q / ev.R;
  const Complex c2 = ev.R_qbar / ev.R - std::conj(ev.R_q) / std::conj(ev.R);
  const Complex c3 = ev.R_H / ev.R;
  return d.g_zzb - c1 * d.g_z * d.g_zb - c2 * d.g_z * std::conj(d.g_z) - c3 * d.H_zb * d.g_z;
}

std::vector<Complex> pde_residual(const TwoChartComplexField& f, const GroupSpec& grp,
                                  int threads) {
  const Grid2D& g = f.grid();
  std::vector<Complex> out(g.size());
  parallel_for(g.size(), threads, [&](std::size_t idx) {
    const int j = int(idx) / g.nx;
    const int i = int(idx) % g.nx;
    out[idx] = pde_residual_at(grp, f.g(i, j), f.H(i, j), wirtinger(f, i, j));
  });
  return out;
}

ReducedCoeffs reduced_coefficients(const PrescribedH& h, const GroupSpec& grp,
                                   const ChartPoint& q) {
  const auto hp = h.partials(q);
  const PotentialEval ev = potential_eval(grp, hp.value, q);
  if (std::abs(ev.R) < kPotentialFloor) {
    throw PotentialZeroError("reduced_coefficients: R(H(q),q) = 0 near q = (" +
                             std::to_string(q.value.real()) + ", " +
                             std::to_string(q.value.imag()) +
                             (q.chart == Chart::W ? ") [chart W]" : ")"));
  }
  const Complex Rq_tot = ev.R_q + ev.R_H * hp.dq;
  const Complex Rqb_tot = ev.R_qbar + ev.R_H * hp.dqbar;
  ReducedCoeffs rc;
  rc.M = 1.0 / ev.R;
  rc.M_q = -Rq_tot / (ev.R * ev.R);
  rc.M_qbar = -Rqb_tot / (ev.R * ev.R);
  rc.A = Rq_tot / ev.R;
  rc.B = std::conj(rc.M_q) / std::conj(rc.M) - rc.M_qbar / rc.M +
         ev.R_H * hp.dqbar * std::conj(rc.M);
  return rc;
}

Complex reduced_residual_at(const PrescribedH& h, const GroupSpec& grp, const ChartPoint& g,
                            const WirtingerDerivs& d) {
  const ReducedCoeffs rc = reduced_coefficients(h, grp, g.in_chart(d.chart));
  return d.g_zzb - rc.A * d.g_z * d.g_zb - rc.B * d.g_z * std::conj(d.g_z);
}

}  // namespace pmc
