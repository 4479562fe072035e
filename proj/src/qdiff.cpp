#include "pmc/qdiff.hpp"

#include <algorithm>
#include <cmath>

#include "pmc/errors.hpp"
#include "pmc/parallel.hpp"

namespace pmc {

namespace {
constexpr Complex kI{0, 1};
}

QDiffField hopf_differential(const SurfaceMesh& mesh) {
  return hopf_differential(mesh, mesh_extract_field(mesh));
}

QDiffField hopf_differential(const SurfaceMesh& mesh, const TwoChartComplexField& f) {
  const Grid2D& g = f.grid();
  const ConnectionTable gamma = connection_table(mesh.group());
  QDiffField out{g, std::vector<Complex>(g.size()), std::vector<Chart>(g.size())};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t idx = g.index(i, j);
      const WirtingerDerivs d = wirtinger(f, i, j);
      const ChartPoint& gp = f.g(i, j);
      const PotentialEval ev = potential_eval(mesh.group(), f.H(i, j), gp);
      out.route[idx] = gp.chart;
      if (std::abs(ev.R) < 1e-13) {
        // Constant-Gauss-map orbit sitting exactly on a zero of R: the
        // surface is the totally umbilic leaf and P vanishes.
        if (std::abs(d.g_z) < 1e-10 && std::abs(d.g_zb) < 1e-10) {
          out.Q[idx] = 0;
          continue;
        }
        throw PotentialZeroError("hopf_differential: potential vanishes");
      }
      const EtaCoeffs ec = eta_coeffs(gp, d.g_z, f.H(i, j), mesh.group());
      const Vec3 nu = stereo_inv(gp);
      const double nus[3] = {nu.x, nu.y, nu.z};
      Complex contraction = 0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int c = 0; c < 3; ++c) {
            if (gamma[a][b][c] == 0.0) continue;
            contraction += gamma[a][b][c] * ec.A[a] * nus[b] * ec.A[c];
          }
      out.Q[idx] = 2.0 * d.g_z * std::conj(d.g_zb) / ev.R - contraction;
      out.route[idx] = gp.chart;
    }
  return out;
}

QDiffField q_differential(const TwoChartComplexField& f, const ModelSphere& model, int threads) {
  const Grid2D& g = f.grid();
  QDiffField out{g, std::vector<Complex>(g.size()), std::vector<Chart>(g.size())};
  parallel_for(g.size(), threads, [&](std::size_t idx) {
    const int j = int(idx) / g.nx, i = int(idx) % g.nx;
    const ChartPoint& gp = f.g(i, j);
    if (!model.in_hull(gp))
      throw ModelDomainMissError("q_differential: Gauss value left the model hull");
    const WirtingerDerivs d = wirtinger(f, i, j);
    const Complex L = model.L_at(gp).L;
    const Complex M = model.M_at(gp).M;
    if (gp.chart == Chart::Q) {
      out.Q[idx] = L * d.g_z * d.g_z + M * d.g_z * std::conj(d.g_zb);
    } else {
      // Rescaled route: Q = Lambda (wbar/w)^2 w_z^2 + Mtilde w_z conj(w_zb).
      const Complex w = gp.value;
      const Complex r = std::conj(w) / w;
      out.Q[idx] = L * r * r * d.g_z * d.g_z + M * d.g_z * std::conj(d.g_zb);
    }
    out.route[idx] = gp.chart;
  });
  return out;
}

namespace {

// alpha and beta of the dbar identity at one node, in the node's chart.
struct AlphaBeta {
  Complex alpha, beta;
};

AlphaBeta alpha_beta(const ModelSphere& model, const ChartPoint& gp, const WirtingerDerivs& d) {
  const auto hp = model.prescribed().partials(gp);
  const ReducedCoeffs rc = model.M_at(gp);
  const ModelSphere::LEval le = model.L_at(gp);
  const double s = 1.0 + std::norm(gp.value);
  AlphaBeta ab;
  ab.alpha = hp.dqbar * std::conj(rc.M) * (s * s) * std::conj(d.g_z);
  if (gp.chart == Chart::Q) {
    ab.beta = (le.L_q + 2.0 * rc.A * le.L) / std::conj(rc.M) * d.g_z * d.g_z / std::conj(d.g_z);
  } else {
    // Transform of (L_q + 2 A L) through q = 1/w with the rescaled tables.
    const Complex w = gp.value;
    const Complex wb = std::conj(w);
    const Complex Atil = rc.A;  // chart-W reduced coefficient
    const Complex core = 2.0 * le.L - w * (le.L_q + 2.0 * Atil * le.L);
    ab.beta = -core * (wb * wb) / (w * w * w) * d.g_z * d.g_z /
              (std::conj(rc.M) * std::conj(d.g_z));
  }
  return ab;
}

// Chart-free complex derivative of a node array along one grid direction.
template <typename Get>
Complex array_derivative(const Get& get, int k, int n, bool periodic, double h, bool& ok) {
  auto wrap = [&](int t) { return ((t % n) + n) % n; };
  if (periodic) return (get(wrap(k + 1)) - get(wrap(k - 1))) / (2 * h);
  if (k >= 1 && k + 1 < n) return (get(k + 1) - get(k - 1)) / (2 * h);
  if (k == 0 && n >= 3) return (-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2 * h);
  if (k == n - 1 && n >= 3)
    return (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) / (2 * h);
  ok = false;
  return {};
}

// Fourth-order central variant: used for the dbar defect so the Q-stencil
// truncation sits below the O(h^2) error the Q values already carry.
template <typename Get>
Complex array_derivative4(const Get& get, int k, int n, bool periodic, double h, bool& ok) {
  auto wrap = [&](int t) { return ((t % n) + n) % n; };
  auto at = [&](int t) { return get(periodic ? wrap(k + t) : k + t); };
  if (!periodic && (k < 2 || k + 2 >= n)) {
    ok = false;
    return {};
  }
  return (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12 * h);
}

}  // namespace

namespace {

// Q at a node, evaluated through a prescribed chart route; keeps the
// truncation error of a whole stencil in one smooth family.
Complex q_value_via(const TwoChartComplexField& f, const ModelSphere& model, int i, int j,
                    Chart route) {
  const ChartPoint gp = f.g(i, j).in_chart(route);
  const WirtingerDerivs d = wirtinger(f, i, j, route);
  const Complex L = model.L_at(gp).L;
  const Complex M = model.M_at(gp).M;
  if (route == Chart::Q) return L * d.g_z * d.g_z + M * d.g_z * std::conj(d.g_zb);
  const Complex r = std::conj(gp.value) / gp.value;
  return L * r * r * d.g_z * d.g_z + M * d.g_z * std::conj(d.g_zb);
}

}  // namespace

DbarResult dbar_identity_residual(const QDiffField& Q, const TwoChartComplexField& f,
                                  const ModelSphere& model) {
  const Grid2D& g = f.grid();
  DbarResult out;
  out.residual.assign(g.size(), 0.0);
  out.evaluated.assign(g.size(), false);
  // Nodes whose Q-stencil touches one-sided field stencils see a different
  // truncation family on each side; keep the defect to the centred interior
  // (margin 4: the 5-point Q stencil must not reach the one-sided band).
  const int ilo = g.periodic_x ? 0 : 4, ihi = g.periodic_x ? g.nx - 1 : g.nx - 5;
  const int jlo = g.periodic_y ? 0 : 4, jhi = g.periodic_y ? g.ny - 1 : g.ny - 5;
  for (int j = jlo; j <= jhi; ++j)
    for (int i = ilo; i <= ihi; ++i) {
      const std::size_t idx = g.index(i, j);
      const ChartPoint& gp = f.g(i, j);
      if (!model.in_hull(gp)) continue;
      WirtingerDerivs d;
      try {
        d = wirtinger(f, i, j);
      } catch (const StencilUnavailableError&) {
        continue;
      }
      if (std::abs(d.g_z) < 1e-12) continue;

      // Finite differences of Q with every stencil value computed through
      // the centre's route (values are route-independent in the limit, but
      // mixing routes puts an O(h^2) kink right where it gets divided by h).
      const Chart route = gp.chart;
      auto qv = [&](int a, int b) -> Complex {
        const int ia = g.periodic_x ? ((a % g.nx) + g.nx) % g.nx : a;
        const int jb = g.periodic_y ? ((b % g.ny) + g.ny) % g.ny : b;
        return q_value_via(f, model, ia, jb, route);
      };
      bool ok = true;
      Complex qx, qy;
      try {
        qx = array_derivative4([&](int k) { return qv(k, j); }, i, g.nx, g.periodic_x, g.h, ok);
        qy = array_derivative4([&](int k) { return qv(i, k); }, j, g.ny, g.periodic_y, g.h, ok);
      } catch (const Error&) {
        continue;  // a stencil neighbour left the hull or lost its stencil
      }
      if (!ok) continue;
      const Complex q_zb = 0.5 * (qx + kI * qy);
      const AlphaBeta ab = alpha_beta(model, gp, d);
      const Complex q0 = q_value_via(f, model, i, j, route);
      const Complex defect = q_zb - ab.alpha * q0 - ab.beta * std::conj(q0);
      out.residual[idx] = std::abs(defect);
      out.evaluated[idx] = true;
      out.max_defect = std::max(out.max_defect, out.residual[idx]);
      out.scale = std::max(out.scale, std::abs(q_zb));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Zero localization by the argument principle.

namespace {

struct WindingScan {
  const QDiffField& Q;
  int ncx, ncy;
  bool wrap_x, wrap_y;

  Complex value(int i, int j) const {
    const Grid2D& g = Q.grid;
    const int ii = wrap_x ? ((i % g.nx) + g.nx) % g.nx : i;
    const int jj = wrap_y ? ((j % g.ny) + g.ny) % g.ny : j;
    return Q.Q[g.index(ii, jj)];
  }

  // Winding of arg Q around the rectangle of cells [i0,i0+w) x [j0,j0+h),
  // traversed through fine nodes. ok=false when an increment is ambiguous.
  double rect_winding(int i0, int j0, int w, int h, bool& ok) const {
    double total = 0;
    Complex prev = value(i0, j0);
    auto advance = [&](int i, int j) {
      const Complex cur = value(i, j);
      if (cur == Complex(0, 0) || prev == Complex(0, 0)) {
        ok = false;
        return;
      }
      const double inc = std::arg(cur / prev);
      if (std::abs(inc) > M_PI - 1e-9) ok = false;
      total += inc;
      prev = cur;
    };
    for (int i = i0 + 1; i <= i0 + w; ++i) advance(i, j0);
    for (int j = j0 + 1; j <= j0 + h; ++j) advance(i0 + w, j);
    for (int i = i0 + w - 1; i >= i0; --i) advance(i, j0 + h);
    for (int j = j0 + h - 1; j >= j0; --j) advance(i0, j);
    return total / (2 * M_PI);
  }

  int rect_winding_checked(int i0, int j0, int w, int h, double* defect_out = nullptr) const {
    bool ok = true;
    const double raw = rect_winding(i0, j0, w, h, ok);
    if (!ok) throw BoundaryZeroError("zero of Q sits on a plaquette corner or edge");
    const int rounded = int(std::lround(raw));
    const double defect = std::abs(raw - rounded);
    if (defect > 0.2) throw BoundaryZeroError("winding failed to round to an integer");
    if (defect_out) *defect_out = defect;
    return rounded;
  }
};

Complex refine_cell_zero(const QDiffField& Q, int ci, int cj) {
  const Grid2D& g = Q.grid;
  auto at = [&](int i, int j) {
    return Q.Q[g.index(((i % g.nx) + g.nx) % g.nx, ((j % g.ny) + g.ny) % g.ny)];
  };
  const Complex q00 = at(ci, cj), q10 = at(ci + 1, cj);
  const Complex q11 = at(ci + 1, cj + 1), q01 = at(ci, cj + 1);
  double s = 0.5, t = 0.5;
  for (int it = 0; it < 25; ++it) {
    const Complex F = (1 - s) * (1 - t) * q00 + s * (1 - t) * q10 + s * t * q11 +
                      (1 - s) * t * q01;
    const Complex Fs = (1 - t) * (q10 - q00) + t * (q11 - q01);
    const Complex Ft = (1 - s) * (q01 - q00) + s * (q11 - q10);
    const double a11 = Fs.real(), a12 = Ft.real(), a21 = Fs.imag(), a22 = Ft.imag();
    const double det = a11 * a22 - a12 * a21;
    if (std::abs(det) < 1e-300) break;
    const double ds = (a22 * F.real() - a12 * F.imag()) / det;
    const double dt = (-a21 * F.real() + a11 * F.imag()) / det;
    s = std::clamp(s - ds, 0.0, 1.0);
    t = std::clamp(t - dt, 0.0, 1.0);
  }
  return Q.grid.node(0, 0) + Complex((ci + s) * g.h, (cj + t) * g.h);
}

void descend(const WindingScan& scan, int i0, int j0, int w, int h, int parent_winding,
             std::vector<ZeroRecord>& out) {
  if (parent_winding == 0) return;
  if (w == 1 && h == 1) {
    ZeroRecord r;
    r.ci = i0;
    r.cj = j0;
    scan.rect_winding_checked(i0, j0, 1, 1, &r.rounding_defect);
    r.winding = parent_winding;
    r.position = refine_cell_zero(scan.Q, i0, j0);
    out.push_back(r);
    return;
  }
  const int w1 = std::max(1, w / 2), h1 = std::max(1, h / 2);
  int found = 0;
  struct Child {
    int i, j, w, h, wind;
  };
  std::vector<Child> children;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int ci = i0 + a * w1, cj = j0 + b * h1;
      const int cw = a == 0 ? w1 : w - w1, ch = b == 0 ? h1 : h - h1;
      if (cw <= 0 || ch <= 0) continue;
      const int wind = scan.rect_winding_checked(ci, cj, cw, ch);
      found += wind;
      if (wind != 0) children.push_back({ci, cj, cw, ch, wind});
    }
  if (found != parent_winding)
    throw BoundaryZeroError("zero of Q sits on a refinement boundary");
  for (const Child& c : children) descend(scan, c.i, c.j, c.w, c.h, c.wind, out);
}

}  // namespace

IndexReport zeros_and_indices(const QDiffField& Q, Topology topology) {
  const Grid2D& g = Q.grid;
  const bool closed = topology != Topology::Disk;
  if (topology == Topology::Torus && !(g.periodic_x && g.periodic_y))
    throw SpecError("torus topology needs a doubly periodic grid");

  WindingScan scan{Q, g.periodic_x ? g.nx : g.nx - 1, g.periodic_y ? g.ny : g.ny - 1,
                   g.periodic_x, g.periodic_y};

  IndexReport report;
  // Brute-force plaquette sum for closed topologies (each interior edge
  // cancels, so this is the total degree).
  if (closed) {
    for (int j = 0; j < scan.ncy; ++j)
      for (int i = 0; i < scan.ncx; ++i)
        report.plaquette_sum += scan.rect_winding_checked(i, j, 1, 1);
  }

  // Coarse blocks (3 levels up from the cells), then descend.
  const int B = 8;
  for (int j0 = 0; j0 < scan.ncy; j0 += B)
    for (int i0 = 0; i0 < scan.ncx; i0 += B) {
      const int w = std::min(B, scan.ncx - i0);
      const int h = std::min(B, scan.ncy - j0);
      const int wind = scan.rect_winding_checked(i0, j0, w, h);
      descend(scan, i0, j0, w, h, wind, report.zeros);
    }

  std::sort(report.zeros.begin(), report.zeros.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    return a.cj != b.cj ? a.cj < b.cj : a.ci < b.ci;
  });

  // Merge records closer than the sampling resolution: a multiple zero near
  // a cell corner aliases into adjacent simple records whose windings add
  // (a 4-point cell boundary can only register winding +-1).
  std::vector<ZeroRecord> merged;
  std::vector<bool> used(report.zeros.size(), false);
  for (std::size_t a = 0; a < report.zeros.size(); ++a) {
    if (used[a]) continue;
    ZeroRecord acc = report.zeros[a];
    Complex pos_sum = acc.position;
    int count = 1;
    for (std::size_t b = a + 1; b < report.zeros.size(); ++b) {
      if (used[b]) continue;
      if (std::abs(report.zeros[b].position - acc.position) <= 2.5 * g.h) {
        acc.winding += report.zeros[b].winding;
        acc.rounding_defect = std::max(acc.rounding_defect, report.zeros[b].rounding_defect);
        pos_sum += report.zeros[b].position;
        ++count;
        used[b] = true;
      }
    }
    acc.position = (1.0 / count) * pos_sum;
    if (acc.winding != 0) merged.push_back(acc);
  }
  report.zeros = std::move(merged);

  for (const ZeroRecord& z : report.zeros) report.winding_sum += z.winding;
  if (closed) {
    report.expected = topology == Topology::Sphere ? -4 : 0;
    report.matches_poincare_hopf = (report.plaquette_sum == *report.expected);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Contact map residual.

ContactResult contact_residual(const TwoChartComplexField& f, const ModelSphere& model) {
  const Grid2D& g = f.grid();
  ContactResult out;
  out.phi_zbar.assign(g.size(), 0.0);
  out.identity_defect.assign(g.size(), 0.0);

  // Contact-map values; invalid nodes poison their stencils.
  std::vector<Complex> phi(g.size());
  std::vector<char> valid(g.size(), 0);
  const bool strip = model.periodic_coords();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t idx = g.index(i, j);
      try {
        if (strip) {
          phi[idx] = model.gauss_inverse(f.g(i, j));
        } else {
          const ChartPoint& gp = f.g(i, j);
          if (gp.infinite()) continue;
          phi[idx] = gp.value;  // FD below works in the node's own chart
        }
        valid[idx] = 1;
      } catch (const Error&) {
        continue;
      }
    }

  auto phi_at = [&](int i, int j, Chart chart_of_centre, const Complex& centre) -> Complex {
    const std::size_t idx = g.index(i, j);
    Complex v = phi[idx];
    if (strip) {
      // Unwrap the angular coordinate to the centre's branch.
      double dim = v.imag() - centre.imag();
      while (dim > M_PI) dim -= 2 * M_PI;
      while (dim < -M_PI) dim += 2 * M_PI;
      return {v.real(), centre.imag() + dim};
    }
    if (f.g(i, j).chart != chart_of_centre) v = 1.0 / v;
    return v;
  };

  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t idx = g.index(i, j);
      if (!valid[idx]) continue;
      // Central stencil only (wrapping where periodic).
      auto nb = [&](int di, int dj, bool& ok) -> std::size_t {
        int ii = i + di, jj = j + dj;
        if (g.periodic_x) ii = ((ii % g.nx) + g.nx) % g.nx;
        if (g.periodic_y) jj = ((jj % g.ny) + g.ny) % g.ny;
        if (ii < 0 || jj < 0 || ii >= g.nx || jj >= g.ny) ok = false;
        return ok ? g.index(ii, jj) : 0;
      };
      bool ok = true;
      for (int d = -1; d <= 1 && ok; d += 2) {
        std::size_t k1 = nb(d, 0, ok);
        std::size_t k2 = nb(0, d, ok);
        if (ok) ok = valid[k1] && valid[k2];
      }
      if (!ok) continue;

      const Chart cn = f.g(i, j).chart;
      const Complex centre = phi[idx];
      auto wrap_i = [&](int k) { return g.periodic_x ? ((k % g.nx) + g.nx) % g.nx : k; };
      auto wrap_j = [&](int k) { return g.periodic_y ? ((k % g.ny) + g.ny) % g.ny : k; };
      const Complex px1 = phi_at(wrap_i(i + 1), j, cn, centre);
      const Complex px0 = phi_at(wrap_i(i - 1), j, cn, centre);
      const Complex py1 = phi_at(i, wrap_j(j + 1), cn, centre);
      const Complex py0 = phi_at(i, wrap_j(j - 1), cn, centre);
      const Complex dx = (px1 - px0) / (2 * g.h);
      const Complex dy = (py1 - py0) / (2 * g.h);
      const Complex phi_zb = 0.5 * (dx + kI * dy);

      // Right-hand side of the inverse-map identity at phi(z).
      WirtingerDerivs d;
      try {
        d = wirtinger(f, i, j);
      } catch (const StencilUnavailableError&) {
        continue;
      }
      Complex rhs;
      if (strip) {
        ModelSphere::GData gd;
        try {
          gd = model.gauss_at(centre);
        } catch (const Error&) {
          continue;
        }
        // Express the field derivatives in G's chart.
        Complex gz = d.g_z, gzb = d.g_zb;
        if (gd.G.chart != cn) {
          const Complex v = f.g(i, j).value;
          gz = -gz / (v * v);
          gzb = -gzb / (v * v);
        }
        const double jac = std::norm(gd.G_z) - std::norm(gd.G_zb);
        if (jac <= 0) continue;
        rhs = (std::conj(gd.G_z) * gzb - gd.G_zb * std::conj(gz)) / jac;
      } else {
        // Identity Gauss map: the same chart conventions make the
        // right-hand side the conjugate derivative itself.
        rhs = d.g_zb;
      }

      out.phi_zbar[idx] = std::abs(phi_zb);
      out.identity_defect[idx] = std::abs(phi_zb - rhs);
      out.max_phi_zbar = std::max(out.max_phi_zbar, out.phi_zbar[idx]);
      out.max_defect = std::max(out.max_defect, out.identity_defect[idx]);
    }
  return out;
}

}  // namespace pmc
