#include "pmc/modelsphere.hpp"

#include <algorithm>
#include <cmath>

#include "pmc/errors.hpp"

namespace pmc {

namespace {

constexpr double kPoleSeriesEnd = 1e-3;
constexpr double kHullTmin = 0.05;  // |G| window of rotational models
constexpr double kHullTmax = 20.0;

// Axially symmetric restriction h(t), t = nu3, with derivative.
struct AxialH {
  const PrescribedH* h;

  static AxialH make(const PrescribedH& h) {
    // The restriction only exists for axially symmetric prescriptions.
    for (double t : {-0.9, -0.4, 0.1, 0.6}) {
      const double r = std::sqrt(1 - t * t);
      const double v0 = h.value(Vec3{r, 0, t});
      for (double phi : {0.9, 2.2, 4.0}) {
        const double v = h.value(Vec3{r * std::cos(phi), r * std::sin(phi), t});
        if (std::abs(v - v0) > 1e-12 * (1 + std::abs(v0)))
          throw SpecError("rotational generator needs h = h(nu3)");
      }
    }
    return {&h};
  }

  double value(double t) const {
    const double r = std::sqrt(std::max(0.0, 1 - t * t));
    return h->value(Vec3{r, 0, t});
  }
  double deriv(double t) const {
    const double r = std::sqrt(std::max(0.0, 1 - t * t));
    if (r > 1e-6) {
      // Tangential chain rule along nu(t) = (sqrt(1-t^2), 0, t).
      if (auto g = h->raw_gradient(Vec3{r, 0, t})) return g->z - g->x * (t / r);
    }
    const double d = 1e-6;
    const double tp = std::min(1.0, t + d), tm = std::max(-1.0, t - d);
    return (value(tp) - value(tm)) / (tp - tm);
  }
};

struct ProfileState {
  double x, z;
};

double kappa1_of(const AxialH& h, double theta, double x) {
  return 2 * h.value(std::cos(theta)) - std::sin(theta) / x;
}

// Series start x = a th + b th^3, z = th^2/(2 h1), a = 1/h1,
// b = -a/6 + a^2 h1'/4.
ProfileState pole_series(const AxialH& h, double theta) {
  const double h1 = h.value(1.0);
  const double a = 1.0 / h1;
  const double b = -a / 6.0 + a * a * h.deriv(1.0) / 4.0;
  return {a * theta + b * theta * theta * theta, theta * theta / (2 * h1)};
}

// Regular branch through the south pole: same series in phi = pi - theta
// for the mirrored prescription h(-t). x agrees, z runs downhill.
double south_series_x(const AxialH& h, double phi) {
  const double hs = h.value(-1.0);
  const double a = 1.0 / hs;
  // d/dt' of h(-t') at t' = 1 is -h'(-1).
  const double b = -a / 6.0 - a * a * h.deriv(-1.0) / 4.0;
  return a * phi + b * phi * phi * phi;
}

}  // namespace

double RotationalProfile::diameter() const {
  double xmax = 0, zmin = 0, zmax = 0;
  for (int k = 0; k <= valid_until; ++k) {
    xmax = std::max(xmax, x[k]);
    zmin = std::min(zmin, z[k]);
    zmax = std::max(zmax, z[k]);
  }
  return std::max(2 * xmax, zmax - zmin);
}

double RotationalProfile::prescribed_identity_residual(const PrescribedH& h) const {
  const AxialH ah = AxialH::make(h);
  const int n = valid_until;
  if (n < 5) return 0;
  const double step = theta[1] - theta[0];
  double worst = 0;
  for (int k = 2; k + 2 <= n; ++k) {
    // Keep each stencil inside one data source; mixing the marched samples
    // with the pole-series tails contaminates the derivative.
    const bool in_marched = (k - 2 > series_north_until) && (k + 2 < series_south_from);
    const bool in_north = k + 2 <= series_north_until;
    const bool in_south = k - 2 >= series_south_from;
    if (!(in_marched || in_north || in_south)) continue;
    const double xp = (x[k - 2] - 8 * x[k - 1] + 8 * x[k + 1] - x[k + 2]) / (12 * step);
    const double zp = (z[k - 2] - 8 * z[k - 1] + 8 * z[k + 1] - z[k + 2]) / (12 * step);
    const double k1_geom = 1.0 / std::hypot(xp, zp);
    worst = std::max(worst, std::abs(0.5 * (k1_geom + k2[k]) - ah.value(std::cos(theta[k]))));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Cubic Hermite tables on non-uniform abscissas.

namespace {

struct HermiteTable {
  std::vector<double> x, y, d;

  bool in_range(double xq) const { return !x.empty() && xq >= x.front() && xq <= x.back(); }

  double eval(double xq, double* deriv = nullptr) const {
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t j = (it == x.begin()) ? 0 : std::size_t(it - x.begin()) - 1;
    j = std::min(j, x.size() - 2);
    const double hx = x[j + 1] - x[j];
    const double t = (xq - x[j]) / hx;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    if (deriv) {
      const double g00 = (6 * t2 - 6 * t) / hx, g10 = 3 * t2 - 4 * t + 1;
      const double g01 = (-6 * t2 + 6 * t) / hx, g11 = 3 * t2 - 2 * t;
      *deriv = g00 * y[j] + g10 * d[j] + g01 * y[j + 1] + g11 * d[j + 1];
    }
    return h00 * y[j] + h10 * hx * d[j] + h01 * y[j + 1] + h11 * hx * d[j + 1];
  }
};

// Per-sample closed-form data along a profile.
struct SampleData {
  double theta, x, z, k1, k2;
  double k1p, k2p;  // d/dtheta
  double rho, rhop;
  double u;  // filled by cumulative integration
};

SampleData sample_data(const AxialH& h, double theta, double x, double z) {
  SampleData s{};
  s.theta = theta;
  s.x = x;
  s.z = z;
  const double st = std::sin(theta), ct = std::cos(theta);
  s.k2 = st / x;
  s.k1 = 2 * h.value(ct) - s.k2;
  const double xp = ct / s.k1;
  s.k2p = ct / x - st * xp / (x * x);
  s.k1p = -2 * h.deriv(ct) * st - s.k2p;
  const double sum = s.k1 + s.k2;
  s.rho = (s.k1 - s.k2) / sum;
  s.rhop = 2 * (s.k1p * s.k2 - s.k1 * s.k2p) / (sum * sum);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Rotational model sphere.

namespace {

class RotationalModel final : public ModelSphere {
 public:
  RotationalModel(GroupSpec grp, PrescribedH h, const std::vector<SampleData>& samples)
      : ModelSphere(std::move(grp), std::move(h)) {
    for (const SampleData& s : samples) {
      const double T = std::tan(s.theta / 2);
      const double l = std::log(T);
      const double dl_dth = 1.0 / std::sin(s.theta);
      u_of_l_.x.push_back(l);
      u_of_l_.y.push_back(s.u);
      u_of_l_.d.push_back(s.k2 / s.k1);
      rho_of_l_.x.push_back(l);
      rho_of_l_.y.push_back(s.rho);
      rho_of_l_.d.push_back(s.rhop / dl_dth);
      const double du_dth = 1.0 / (s.k1 * s.x);
      th_of_u_.x.push_back(s.u);
      th_of_u_.y.push_back(s.theta);
      th_of_u_.d.push_back(1.0 / du_dth);
      T_of_u_.x.push_back(s.u);
      T_of_u_.y.push_back(T);
      T_of_u_.d.push_back(T * s.k1 / s.k2);
      margin_ = std::min(margin_, T * T * s.k1 / s.k2);
    }
  }

  LEval L_at(const ChartPoint& q) const override {
    if (!in_hull(q)) throw ModelDomainMissError("L_at: Gauss value outside the model hull");
    const Complex v = q.value;
    const Complex vb = std::conj(v);
    const double l = chart_log_radius(q);
    double rho_l = 0;
    const double rho = rho_of_l_.eval(l, &rho_l);
    const ReducedCoeffs rc = M_at(q);
    LEval out;
    if (q.chart == Chart::Q) {
      const Complex ratio = vb / v;
      out.L = -rho * ratio * rc.M;
      out.L_q = -(rho_l / (2.0 * v) * ratio * rc.M - rho * vb / (v * v) * rc.M +
                  rho * ratio * rc.M_q);
      out.L_qbar = -(rho_l / (2.0 * vb) * ratio * rc.M + rho / v * rc.M +
                     rho * ratio * rc.M_qbar);
    } else {
      // Rescaled Lambda = |q|^4 L; same shape with w/wbar and the rescaled M.
      const Complex ratio = v / vb;
      out.L = -rho * ratio * rc.M;
      out.L_q = -(-rho_l / (2.0 * v) * ratio * rc.M + rho / vb * rc.M + rho * ratio * rc.M_q);
      out.L_qbar = -(-rho_l / (2.0 * vb) * ratio * rc.M - rho * v / (vb * vb) * rc.M +
                     rho * ratio * rc.M_qbar);
    }
    return out;
  }

  Complex gauss_inverse(const ChartPoint& q) const override {
    if (!in_hull(q)) throw ModelDomainMissError("gauss_inverse: value outside the model hull");
    const double l = chart_log_radius(q);
    const double u = u_of_l_.eval(l);
    const double phi = (q.chart == Chart::Q) ? std::arg(-q.value) : std::arg(-std::conj(q.value));
    return {u, phi};
  }

  GData gauss_at(Complex zmodel) const override {
    const double u = zmodel.real(), phi = zmodel.imag();
    if (!T_of_u_.in_range(u))
      throw ModelDomainMissError("gauss_at: model coordinate outside the strip");
    double Tp = 0;
    const double T = T_of_u_.eval(u, &Tp);
    const Complex eip = std::polar(1.0, phi);
    const Complex G = -T * eip;
    GData d;
    d.G = ChartPoint::from_q(G);
    const Complex Gz = -0.5 * (Tp + T) * eip;
    const Complex Gzb = -0.5 * (Tp - T) * eip;
    if (d.G.chart == Chart::Q) {
      d.G_z = Gz;
      d.G_zb = Gzb;
    } else {
      d.G_z = -Gz / (G * G);
      d.G_zb = -Gzb / (G * G);
    }
    return d;
  }

  TwoChartComplexField own_field(int n) const override {
    Grid2D grid;
    grid.h = 2 * M_PI / n;
    grid.ny = n;
    grid.y0 = 0;
    grid.periodic_y = true;
    const double ulo = th_of_u_.x.front() + 4 * grid.h;
    const double uhi = th_of_u_.x.back() - 4 * grid.h;
    if (uhi <= ulo) throw SpecError("own_field: resolution too coarse for the model strip");
    grid.x0 = ulo;
    grid.nx = int((uhi - ulo) / grid.h) + 1;
    std::vector<ChartPoint> gv(grid.size());
    std::vector<double> hv(grid.size());
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const GData d = gauss_at(grid.node(i, j));
        gv[grid.index(i, j)] = d.G;
        hv[grid.index(i, j)] = h_.value(d.G);
      }
    TwoChartComplexField f(grid, std::move(gv), std::move(hv));
    f.set_prescribed(h_);
    return f;
  }

  bool in_hull(const ChartPoint& q) const override {
    if (q.infinite() || q.value == Complex(0, 0)) return false;
    return u_of_l_.in_range(chart_log_radius(q));
  }
  bool periodic_coords() const override { return true; }
  double diffeo_margin() const override { return margin_; }

 private:
  static double chart_log_radius(const ChartPoint& q) {
    const double l = std::log(std::abs(q.value));
    return q.chart == Chart::Q ? l : -l;
  }

  HermiteTable u_of_l_, rho_of_l_, th_of_u_, T_of_u_;
  double margin_ = 1e300;
};

// Round sphere: G = id, L = 0.
class RoundModel final : public ModelSphere {
 public:
  RoundModel(double H0) : ModelSphere(GroupSpec::unimodular(0, 0, 0), PrescribedH::constant(H0)) {}

  LEval L_at(const ChartPoint&) const override { return {0, 0, 0}; }

  Complex gauss_inverse(const ChartPoint& q) const override {
    if (q.infinite())
      throw InverseInterpolationError("gauss_inverse: the identity chart hits infinity");
    return q.as_q();
  }

  GData gauss_at(Complex zmodel) const override {
    GData d;
    d.G = ChartPoint::from_q(zmodel);
    if (d.G.chart == Chart::Q) {
      d.G_z = 1;
      d.G_zb = 0;
    } else {
      d.G_z = -1.0 / (zmodel * zmodel);
      d.G_zb = 0;
    }
    return d;
  }

  TwoChartComplexField own_field(int n) const override {
    Grid2D grid;
    grid.nx = grid.ny = n;
    grid.h = 4.4 / (n - 1);
    grid.x0 = grid.y0 = -2.2;
    std::vector<ChartPoint> gv(grid.size());
    std::vector<double> hv(grid.size());
    const double H0 = h_.value(Vec3{0, 0, 1});
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        gv[grid.index(i, j)] = ChartPoint::from_q(grid.node(i, j));
        hv[grid.index(i, j)] = H0;
      }
    TwoChartComplexField f(grid, std::move(gv), std::move(hv));
    f.set_prescribed(h_);
    return f;
  }

  bool in_hull(const ChartPoint&) const override { return true; }
  bool periodic_coords() const override { return false; }
  double diffeo_margin() const override { return 1.0; }
};

// Shared profile integration: marches theta samples with RK4 from a given
// start state, in both directions when asked.
struct OdeRhs {
  const AxialH& h;
  bool ok = true;

  ProfileState operator()(double theta, const ProfileState& s) {
    const double k1 = kappa1_of(h, theta, s.x);
    if (k1 <= 1e-9 || s.x <= 0) {
      ok = false;
      return {0, 0};
    }
    return {std::cos(theta) / k1, std::sin(theta) / k1};
  }
};

bool rk4_step(OdeRhs& rhs, double theta, double dt, ProfileState& s) {
  const ProfileState k1 = rhs(theta, s);
  const ProfileState k2 = rhs(theta + dt / 2, {s.x + dt / 2 * k1.x, s.z + dt / 2 * k1.z});
  const ProfileState k3 = rhs(theta + dt / 2, {s.x + dt / 2 * k2.x, s.z + dt / 2 * k2.z});
  const ProfileState k4 = rhs(theta + dt, {s.x + dt * k3.x, s.z + dt * k3.z});
  if (!rhs.ok) return false;
  s.x += dt / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
  s.z += dt / 6 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z);
  return s.x > 0;
}

// Cumulative isothermal coordinate u (du = dtheta/(kappa1 x)) over samples,
// Simpson with interpolated midpoints.
void fill_isothermal(std::vector<SampleData>& s) {
  const int n = int(s.size());
  std::vector<double> f(n);
  for (int k = 0; k < n; ++k) f[k] = 1.0 / (s[k].k1 * s[k].x);
  auto fmid = [&](int k) {
    if (k >= 1 && k + 2 < n)
      return (-f[k - 1] + 9 * f[k] + 9 * f[k + 1] - f[k + 2]) / 16.0;
    if (k + 2 < n) return (5 * f[k] + 15 * f[k + 1] - 5 * f[k + 2] + f[k + 3]) / 16.0;
    return (f[k - 2] - 5 * f[k - 1] + 15 * f[k] + 5 * f[k + 1]) / 16.0;
  };
  s[0].u = 0;
  for (int k = 0; k + 1 < n; ++k) {
    const double h = s[k + 1].theta - s[k].theta;
    s[k + 1].u = s[k].u + h / 6.0 * (f[k] + 4 * fmid(k) + f[k + 1]);
  }
  // Centre u at the sample nearest the equator of the Gauss image.
  double u_mid = s[0].u;
  double best = 1e300;
  for (const SampleData& d : s) {
    const double gap = std::abs(d.theta - M_PI / 2);
    if (gap < best) {
      best = gap;
      u_mid = d.u;
    }
  }
  for (SampleData& d : s) d.u -= u_mid;
}

std::vector<SampleData> window_samples(const RotationalProfile& p, const AxialH& ah) {
  const double th_lo = 2 * std::atan(kHullTmin);
  const double th_hi = 2 * std::atan(kHullTmax);
  std::vector<SampleData> out;
  for (int k = 0; k <= p.valid_until; ++k) {
    if (p.theta[k] < th_lo || p.theta[k] > th_hi) continue;
    out.push_back(sample_data(ah, p.theta[k], p.x[k], p.z[k]));
  }
  if (out.size() < 8) throw SpecError("profile too short for an isothermal window");
  fill_isothermal(out);
  return out;
}

}  // namespace

std::shared_ptr<const ModelSphere> round_model(double H0) {
  if (!(H0 > 0)) throw SpecError("round_model: H0 must be positive");
  return std::make_shared<RoundModel>(H0);
}

std::shared_ptr<const ModelSphere> isothermal_reparametrization(const RotationalProfile& profile,
                                                                const PrescribedH& h) {
  if (!profile.strictly_convex || profile.valid_until + 1 != int(profile.theta.size()))
    throw SpecError("isothermal_reparametrization needs a closed strictly convex profile");
  const AxialH ah = AxialH::make(h);
  return std::make_shared<RotationalModel>(GroupSpec::unimodular(0, 0, 0), h,
                                           window_samples(profile, ah));
}

RotationalResult rotational_model(const PrescribedH& h, int n_steps, double closure_tol_factor) {
  if (n_steps < 64) throw SpecError("rotational_model: use at least 64 steps");
  const AxialH ah = AxialH::make(h);
  if (h.min_on_sphere() <= 0) throw SpecError("rotational_model: h must be positive");

  RotationalResult result;
  RotationalProfile& p = result.profile;
  const int n = n_steps;
  const double step = M_PI / n;
  p.theta.resize(n + 1);
  p.x.assign(n + 1, 0);
  p.z.assign(n + 1, 0);
  p.k1.assign(n + 1, 0);
  p.k2.assign(n + 1, 0);
  for (int k = 0; k <= n; ++k) p.theta[k] = k * step;
  p.antipodal_symmetric = h.antipodal_defect() < 1e-12;

  const double h1 = ah.value(1.0);
  p.k1[0] = p.k2[0] = h1;

  // Series fill below the handoff angle, then 4th-order marching.
  OdeRhs rhs{ah};
  int k_start = 1;
  while (k_start <= n && p.theta[k_start] <= kPoleSeriesEnd) ++k_start;
  p.series_north_until = k_start - 1;
  for (int k = 1; k < k_start; ++k) {
    const ProfileState s = pole_series(ah, p.theta[k]);
    p.x[k] = s.x;
    p.z[k] = s.z;
    p.k2[k] = std::sin(p.theta[k]) / s.x;
    p.k1[k] = 2 * ah.value(std::cos(p.theta[k])) - p.k2[k];
  }
  ProfileState state = pole_series(ah, kPoleSeriesEnd);
  double theta_c = kPoleSeriesEnd;
  bool pinched = false;
  int last = k_start - 1;
  // March up to the south handoff angle; the ratio sin(theta)/x degenerates
  // to 0/0 inside the final series zone of a closing profile.
  int k_stop = n;
  while (k_stop > 0 && p.theta[k_stop] > M_PI - kPoleSeriesEnd) --k_stop;
  for (int k = k_start; k <= k_stop; ++k) {
    if (!rk4_step(rhs, theta_c, p.theta[k] - theta_c, state)) {
      pinched = true;
      break;
    }
    theta_c = p.theta[k];
    p.x[k] = state.x;
    p.z[k] = state.z;
    p.k2[k] = std::sin(p.theta[k]) / state.x;
    p.k1[k] = 2 * ah.value(std::cos(p.theta[k])) - p.k2[k];
    last = k;
    if (p.k1[k] <= 1e-9) {
      pinched = true;
      break;
    }
  }
  p.valid_until = last;

  if (pinched) {
    result.status = RotationalResult::Status::Pinched;
    return result;
  }

  const double phi_stop = M_PI - theta_c;
  if (state.x < 10 * phi_stop) {
    // Heading into the closure cone: measure the deviation from the regular
    // south branch. The deviation grows like 1/phi toward the pole, so
    // anchor it at the handoff angle to keep runs of different step counts
    // comparable.
    p.closure_defect =
        std::abs(state.x - south_series_x(ah, phi_stop)) * (phi_stop / kPoleSeriesEnd);
    const double hs = ah.value(-1.0);
    p.series_south_from = k_stop + 1;
    for (int k = k_stop + 1; k <= n; ++k) {
      const double phi = M_PI - p.theta[k];
      p.x[k] = south_series_x(ah, phi);
      p.z[k] = state.z + (phi_stop * phi_stop - phi * phi) / (2 * hs);
      p.k2[k] = phi > 0 ? std::sin(p.theta[k]) / p.x[k] : hs;
      p.k1[k] = 2 * ah.value(std::cos(p.theta[k])) - p.k2[k];
      p.valid_until = k;
    }
  } else {
    // Bounded away from the axis: the equation stays regular through pi.
    for (int k = k_stop + 1; k <= n; ++k) {
      if (!rk4_step(rhs, theta_c, p.theta[k] - theta_c, state)) break;
      theta_c = p.theta[k];
      p.x[k] = state.x;
      p.z[k] = state.z;
      p.k2[k] = std::sin(p.theta[k]) / state.x;
      p.k1[k] = 2 * ah.value(std::cos(p.theta[k])) - p.k2[k];
      p.valid_until = k;
    }
    p.closure_defect = std::abs(p.x[p.valid_until]);
  }
  // Pole limits are exact when the profile closes.
  p.k2[n] = ah.value(-1.0);
  p.k1[n] = ah.value(-1.0);
  bool convex = true;
  for (int k = 0; k <= n; ++k)
    if (p.k1[k] <= 0 || p.k2[k] <= 0) convex = false;
  p.strictly_convex = convex;

  const double tol = closure_tol_factor * p.diameter();
  if (p.closure_defect > tol || !convex) {
    result.status = RotationalResult::Status::ClosureDefect;
    return result;
  }
  result.status = RotationalResult::Status::Closed;
  result.model = isothermal_reparametrization(p, h);
  return result;
}

TwoChartComplexField rotational_annulus_field(const PrescribedH& h, double theta0, double x0,
                                              double theta_lo, double theta_hi, int n_steps,
                                              int n_phi, int n_across) {
  if (!(0 < theta_lo && theta_lo < theta0 && theta0 < theta_hi && theta_hi < M_PI))
    throw SpecError("rotational_annulus_field: need 0 < theta_lo < theta0 < theta_hi < pi");
  const AxialH ah = AxialH::make(h);
  const int n = n_steps;
  const double step = (theta_hi - theta_lo) / n;
  const int k0 = int(std::lround((theta0 - theta_lo) / step));

  std::vector<SampleData> samples(n + 1);
  // March from theta0 outwards in both directions.
  auto march = [&](int from, int to, int dir) {
    OdeRhs rhs{ah};
    ProfileState s{samples[from].x, samples[from].z};
    double theta = samples[from].theta;
    for (int k = from + dir; dir > 0 ? k <= to : k >= to; k += dir) {
      if (!rk4_step(rhs, theta, dir * step, s))
        throw ProfilePinchError("rotational_annulus_field: profile pinches in the window");
      theta += dir * step;
      samples[k] = sample_data(ah, theta, s.x, s.z);
    }
  };
  samples[k0] = sample_data(ah, theta_lo + k0 * step, x0, 0.0);
  if (samples[k0].k1 <= 0)
    throw ProfilePinchError("rotational_annulus_field: kappa1 <= 0 at the seed");
  march(k0, n, +1);
  march(k0, 0, -1);
  fill_isothermal(samples);

  // Sample the annulus on its conformal (u, phi) grid.
  if (n_across > 0) {
    // Pick the spacing so n_across nodes span the strip (minus the own_field
    // margins), then round to a divisor of the period.
    const double span = samples.back().u - samples.front().u;
    const double target = span / (n_across - 1 + 8);
    n_phi = std::max(16, int(std::lround(2 * M_PI / target)));
  }
  RotationalModel model(GroupSpec::unimodular(0, 0, 0), h, samples);
  return model.own_field(n_phi);
}

// ---------------------------------------------------------------------------
// eq4M / eq4L residuals over a two-chart q-grid.

LMPdeResiduals verify_LM_pdes(const ModelSphere& model, int nq, LMDerivMode mode) {
  // Both identities are statements about the unrescaled L(q), M(q); the
  // chart-W half of the grid reaches the far field through q = 1/w, which
  // stays in double range for any model hull.
  LMPdeResiduals out;
  const double lim = 1.5;
  const double hq = 2 * lim / (nq - 1);
  for (int chart_id = 0; chart_id < 2; ++chart_id) {
    const bool inverted = chart_id == 1;
    auto wnode = [&](int i, int j) { return Complex(-lim + i * hq, -lim + j * hq); };
    auto qpoint = [&](int i, int j) -> ChartPoint {
      const Complex w = wnode(i, j);
      return {Chart::Q, inverted ? 1.0 / w : w};
    };
    for (int j = 1; j + 1 < nq; ++j)
      for (int i = 1; i + 1 < nq; ++i) {
        if (inverted && wnode(i, j) == Complex(0, 0)) continue;
        const ChartPoint q = qpoint(i, j);
        bool usable = model.in_hull(q) && std::isfinite(q.value.real());
        for (const ChartPoint& nb :
             {qpoint(i - 1, j), qpoint(i + 1, j), qpoint(i, j - 1), qpoint(i, j + 1)})
          usable = usable && model.in_hull(nb) && std::isfinite(nb.value.real());
        if (!usable) continue;

        const ReducedCoeffs rc = model.M_at(q);
        const auto hp = model.prescribed().partials(q);
        const double s = 1.0 + std::norm(q.value);
        const double w2 = s * s;

        Complex M_qbar = rc.M_qbar;
        ModelSphere::LEval le = model.L_at(q);
        Complex L_q = le.L_q, L_qbar = le.L_qbar;
        if (mode == LMDerivMode::FiniteDifference) {
          // Difference the smooth per-grid samples; on the inverted grid
          // the chain rule d/dq = -w^2 d/dw converts back.
          auto Mv = [&](int a, int b) { return model.M_at(qpoint(a, b)).M; };
          auto Lv = [&](int a, int b) { return model.L_at(qpoint(a, b)).L; };
          const Complex Mx = (Mv(i + 1, j) - Mv(i - 1, j)) / (2 * hq);
          const Complex My = (Mv(i, j + 1) - Mv(i, j - 1)) / (2 * hq);
          const Complex Lx = (Lv(i + 1, j) - Lv(i - 1, j)) / (2 * hq);
          const Complex Ly = (Lv(i, j + 1) - Lv(i, j - 1)) / (2 * hq);
          Complex Mw_b = 0.5 * (Mx + Complex(0, 1) * My);
          Complex Lw = 0.5 * (Lx - Complex(0, 1) * Ly);
          Complex Lw_b = 0.5 * (Lx + Complex(0, 1) * Ly);
          if (!inverted) {
            M_qbar = Mw_b;
            L_q = Lw;
            L_qbar = Lw_b;
          } else {
            const Complex w = wnode(i, j);
            const Complex wb = std::conj(w);
            M_qbar = -wb * wb * Mw_b;
            L_q = -w * w * Lw;
            L_qbar = -wb * wb * Lw_b;
          }
        }

        const Complex r4M =
            M_qbar + (std::conj(rc.A) + rc.B) * rc.M - hp.dqbar * w2 * std::norm(rc.M);
        const Complex r4L =
            (L_q + 2.0 * rc.A * le.L) * std::conj(le.L) -
            (L_qbar + 2.0 * rc.B * le.L + std::conj(rc.B) * rc.M -
             le.L * hp.dqbar * std::conj(rc.M) * w2) *
                std::conj(rc.M);
        out.eq4M = std::max(out.eq4M, std::abs(r4M));
        out.eq4L = std::max(out.eq4L, std::abs(r4L));
      }
  }
  return out;
}

}  // namespace pmc
