#pragma once

#include <optional>
#include <vector>

#include "pmc/modelsphere.hpp"
#include "pmc/weierstrass.hpp"

namespace pmc {

/// Coefficient field of a quadratic differential Q dz^2 on a grid. The value
/// is chart-free in the target (chart-W nodes are computed through the
/// rescaled model data); route records which way each node was evaluated.
struct QDiffField {
  Grid2D grid;
  std::vector<Complex> Q;
  std::vector<Chart> route;

  const Complex& at(int i, int j) const { return Q[grid.index(i, j)]; }
};

/// Hopf differential P = 2 g_z gbar_z / R - sum gamma_ijk A_i nu_j A_k from
/// mesh data; the gamma contraction vanishes in R^3. The second form uses a
/// caller-supplied (g,H) field instead of re-extracting it. Totally umbilic
/// orbits with R = 0 and g_z = 0 (the H=1 leaves of a semidirect group) get
/// P = 0 rather than a potential-zero rejection.
QDiffField hopf_differential(const SurfaceMesh& mesh);
QDiffField hopf_differential(const SurfaceMesh& mesh, const TwoChartComplexField& f);

/// Q_H = L(g) g_z^2 + M(g) g_z gbar_z against a model sphere.
QDiffField q_differential(const TwoChartComplexField& f, const ModelSphere& model,
                          int threads = 1);

/// Residual of (Q)_zbar = alpha Q + beta conj(Q) with (Q)_zbar by finite
/// differences; the checkable content of the paper's zero-index claims.
struct DbarResult {
  std::vector<double> residual;   // |defect| per evaluated node (0 on skipped)
  std::vector<bool> evaluated;
  double max_defect = 0;
  double scale = 0;               // max |(Q)_zbar| over evaluated nodes
  double relative() const { return scale > 0 ? max_defect / scale : 0; }
};
DbarResult dbar_identity_residual(const QDiffField& Q, const TwoChartComplexField& f,
                                  const ModelSphere& model);

enum class Topology { Disk, Sphere, Torus };

struct ZeroRecord {
  int ci = 0, cj = 0;        // finest cell
  Complex position;          // refined location (grid coordinates)
  int winding = 0;           // degree of arg Q around the cell
  double rounding_defect = 0;
  double line_field_index() const { return -winding / 2.0; }
};

struct IndexReport {
  std::vector<ZeroRecord> zeros;
  int winding_sum = 0;            // over detected zeros
  int plaquette_sum = 0;          // brute-force sum over all fine plaquettes
  std::optional<int> expected;    // 4g-4 for closed topologies
  bool matches_poincare_hopf = false;
};

/// Argument-principle zero localization with 3-level coarsening, plus the
/// Poincare-Hopf count for closed topologies.
IndexReport zeros_and_indices(const QDiffField& Q, Topology topology);

/// |phi_zbar| for the contact map phi = G^{-1} o g (Claim-2 mechanism), and
/// the defect of the inverse-map identity it satisfies.
struct ContactResult {
  std::vector<double> phi_zbar;    // |phi_zbar| per node (FD)
  std::vector<double> identity_defect;  // |phi_zbar - rhs| per node
  double max_phi_zbar = 0;
  double max_defect = 0;
};
ContactResult contact_residual(const TwoChartComplexField& f, const ModelSphere& model);

}  // namespace pmc
