#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "pmc/gaussfield.hpp"
#include "pmc/prescribed.hpp"

namespace pmc {

/// Profile of a rotational prescribed-H surface, sampled on a uniform grid
/// of the Gauss-map polar angle theta in [0,pi]: x = distance to the axis,
/// z = height, kappa_1/kappa_2 = principal curvatures.
struct RotationalProfile {
  std::vector<double> theta, x, z, k1, k2;
  double closure_defect = 0;
  bool strictly_convex = false;
  bool antipodal_symmetric = false;
  int valid_until = 0;       // samples [0, valid_until] hold data
  int series_north_until = 0;  // samples <= this come from the pole series
  int series_south_from = 1 << 30;  // samples >= this come from the south series

  double diameter() const;
  /// max |(k1_geom + k2)/2 - h(cos theta)| with k1 recomputed from the path
  /// by 4th-order differences (an integrator check, not a tautology).
  double prescribed_identity_residual(const PrescribedH& h) const;
};

class ModelSphere;

struct RotationalResult {
  enum class Status { Closed, Pinched, ClosureDefect };
  Status status = Status::Closed;
  RotationalProfile profile;
  std::shared_ptr<const ModelSphere> model;  // only when closed & convex
};

/// Integrates dx/dtheta = cos(theta)/kappa_1, dz/dtheta = sin(theta)/kappa_1
/// with kappa_1 = 2 h(cos theta) - sin(theta)/x, series start at the pole,
/// classical 4th-order steps. Builds the model sphere when the profile
/// closes strictly convex.
RotationalResult rotational_model(const PrescribedH& h, int n_steps,
                                  double closure_tol_factor = 1e-6);

/// Reference sphere S with Gauss-map diffeomorphism G, prescribed curvature
/// h, and the derived fields L(q), M(q). M and its partials are closed-form
/// through the potential; L carries the shape of S.
class ModelSphere {
 public:
  virtual ~ModelSphere() = default;

  const GroupSpec& group() const { return grp_; }
  const PrescribedH& prescribed() const { return h_; }

  /// L and its chart-variable partials; chart-W values are the rescaled
  /// |q|^4 L with finite limits.
  struct LEval {
    Complex L, L_q, L_qbar;
  };
  virtual LEval L_at(const ChartPoint& q) const = 0;

  /// Model conformal coordinate of the point with Gauss value q.
  virtual Complex gauss_inverse(const ChartPoint& q) const = 0;

  /// G and its derivatives (in G's chart) at a model coordinate.
  struct GData {
    ChartPoint G;
    Complex G_z, G_zb;
  };
  virtual GData gauss_at(Complex zmodel) const = 0;

  /// The model's own field (g = G, H = h o G) at resolution n.
  virtual TwoChartComplexField own_field(int n) const = 0;

  virtual bool in_hull(const ChartPoint& q) const = 0;
  /// Whether model coordinates live on a periodic angular strip.
  virtual bool periodic_coords() const = 0;
  /// min(|G_z|^2 - |G_zb|^2) over the model (diffeomorphism margin).
  virtual double diffeo_margin() const = 0;

  /// M(q) = 1/R(h(q),q) with total-derivative partials (chart-aware).
  ReducedCoeffs M_at(const ChartPoint& q) const { return reduced_coefficients(h_, grp_, q); }

 protected:
  ModelSphere(GroupSpec grp, PrescribedH h) : grp_(std::move(grp)), h_(std::move(h)) {}
  GroupSpec grp_;
  PrescribedH h_;
};

/// The closed-form round sphere of radius 1/H0 in R^3: G = id, L = 0.
std::shared_ptr<const ModelSphere> round_model(double H0);

/// Conformal (u, phi) structure on a closed strictly convex profile:
/// du = ds/x along the profile. Exposed for tests; rotational_model calls it.
std::shared_ptr<const ModelSphere> isothermal_reparametrization(const RotationalProfile& profile,
                                                                const PrescribedH& h);

/// Rotational prescribed-H band started from non-polar initial data
/// x(theta0) = x0 (a Delaunay-type annulus when h is constant), sampled as a
/// field on its own conformal (u, phi) grid with n_phi nodes around. When
/// n_across > 0 the spacing is chosen so that many nodes span the annulus
/// instead (the band is conformally short, so a square grid cannot exist).
TwoChartComplexField rotational_annulus_field(const PrescribedH& h, double theta0, double x0,
                                              double theta_lo, double theta_hi, int n_steps,
                                              int n_phi, int n_across = 0);

/// eq4M / eq4L residuals of the model's L, M fields, max over a two-chart
/// q-grid of resolution nq. FiniteDifference mode takes the q-derivatives of
/// L and M from the grid; ClosedForm uses the model's derivative data.
struct LMPdeResiduals {
  double eq4M = 0;
  double eq4L = 0;
};
enum class LMDerivMode { ClosedForm, FiniteDifference };
LMPdeResiduals verify_LM_pdes(const ModelSphere& model, int nq, LMDerivMode mode);

}  // namespace pmc
