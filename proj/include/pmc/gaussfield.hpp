#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pmc/liegroup.hpp"
#include "pmc/potential.hpp"
#include "pmc/prescribed.hpp"

namespace pmc {

/// Structured grid in a conformal parameter z = x + i y, equal spacing in
/// both directions. periodic_y wraps the j index (log-polar sphere covers).
struct Grid2D {
  int nx = 0, ny = 0;
  double h = 0;
  double x0 = 0, y0 = 0;
  bool periodic_x = false;
  bool periodic_y = false;

  Complex node(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
  std::size_t index(int i, int j) const { return std::size_t(j) * nx + i; }
  std::size_t size() const { return std::size_t(nx) * ny; }
};

/// Stereographic projection of a unit vector (south-pole chart near nu3=-1).
ChartPoint stereo(const Vec3& nu);
/// Inverse stereographic projection; exact unit vector by construction.
Vec3 stereo_inv(const ChartPoint& p);

/// Grid-sampled extended-complex Gauss map plus mean curvature. Chart flags
/// change only across the overlap annulus; neighbours are converted into the
/// stencil centre's chart before differencing.
class TwoChartComplexField {
 public:
  TwoChartComplexField() = default;
  TwoChartComplexField(Grid2D grid, std::vector<ChartPoint> g, std::vector<double> H);

  /// Sample g(z), H(z) on the grid; chart chosen canonically per node.
  static TwoChartComplexField sample(const Grid2D& grid,
                                     const std::function<Complex(Complex)>& g,
                                     const std::function<double(Complex)>& H);
  /// Sample a Gauss map given as a unit-vector field (no chart pitfalls at
  /// the south pole).
  static TwoChartComplexField sample_nu(const Grid2D& grid,
                                        const std::function<Vec3(Complex)>& nu,
                                        const std::function<double(Complex)>& H);

  const Grid2D& grid() const { return grid_; }
  const ChartPoint& g(int i, int j) const { return g_[grid_.index(i, j)]; }
  double H(int i, int j) const { return H_[grid_.index(i, j)]; }
  ChartPoint& g(int i, int j) { return g_[grid_.index(i, j)]; }
  double& H(int i, int j) { return H_[grid_.index(i, j)]; }

  void set_prescribed(PrescribedH h) { prescribed_ = std::move(h); }
  const std::optional<PrescribedH>& prescribed() const { return prescribed_; }

  /// g at (i,j) expressed in `target` chart (overlap-annulus conversion).
  Complex g_in_chart(int i, int j, Chart target) const;

 private:
  Grid2D grid_;
  std::vector<ChartPoint> g_;
  std::vector<double> H_;
  std::optional<PrescribedH> prescribed_;
};

/// Finite-difference Wirtinger data at a node, in the node's chart.
struct WirtingerDerivs {
  Complex g_z, g_zb, g_zzb;
  Complex H_zb;
  Chart chart = Chart::Q;
};

/// Second-order central differences; one-sided second-order at patch edges.
/// `force` overrides the evaluation chart (stencil values are converted),
/// which keeps the truncation error smooth across chart-transition rings.
WirtingerDerivs wirtinger(const TwoChartComplexField& f, int i, int j,
                          std::optional<Chart> force = std::nullopt);

/// eta, the frame components A_i of psi_z, and the conformal factor lambda.
/// The A_i use the combined forms ((gbar^2-1) g_z / R etc.) that remove the
/// spurious 1/gbar at g = 0. Chart-W input is handled through the rescaled
/// potential; the returned A_i are always the true frame components.
struct EtaCoeffs {
  Complex eta;  // in the evaluation chart
  std::array<Complex, 3> A;
  double lambda;
};
EtaCoeffs eta_coeffs(const ChartPoint& g, Complex g_z, double H, const GroupSpec& grp);

/// Gauss-map PDE residual from explicit derivative data.
Complex pde_residual_at(const GroupSpec& grp, const ChartPoint& g, double H,
                        const WirtingerDerivs& d);

/// Per-node residual of the Gauss-map equation over the whole field.
std::vector<Complex> pde_residual(const TwoChartComplexField& f, const GroupSpec& grp,
                                  int threads = 1);

/// M(q) = 1/R(H(q),q) and the reduced PDE coefficients for prescribed H;
/// total q-derivatives include the H(q) dependence by the chain rule.
struct ReducedCoeffs {
  Complex M;
  Complex A;
  Complex B;
  Complex M_q, M_qbar;
};
ReducedCoeffs reduced_coefficients(const PrescribedH& h, const GroupSpec& grp,
                                   const ChartPoint& q);

/// Residual of the reduced equation g_zzb = A(g) g_z g_zb + B(g) |g_z|^2.
Complex reduced_residual_at(const PrescribedH& h, const GroupSpec& grp, const ChartPoint& g,
                            const WirtingerDerivs& d);

}  // namespace pmc
