#pragma once

#include <vector>

#include "pmc/gaussfield.hpp"
#include "pmc/liegroup.hpp"

namespace pmc {

enum class MeshBackend { Euclidean, Semidirect, SU2 };

/// Backend a group reconstructs in: R^3 integrates directly, non-unimodular
/// groups via semidirect coordinates, (+,+,+) via unit quaternions.
MeshBackend default_backend(const GroupSpec& g);

/// Frame scales lambda_i = sqrt(c_j c_k)/2 that match the quaternion
/// brackets to the structure equations of a (+,+,+) group.
std::array<double, 3> su2_frame_scales(const GroupSpec& g);

/// Structured grid of ambient points with unit-normal data (components in
/// the left-invariant frame).
class SurfaceMesh {
 public:
  SurfaceMesh(Grid2D grid, MeshBackend backend, GroupSpec group);

  const Grid2D& grid() const { return grid_; }
  MeshBackend backend() const { return backend_; }
  const GroupSpec& group() const { return group_; }

  Vec3& pos(int i, int j) { return pos_[grid_.index(i, j)]; }
  const Vec3& pos(int i, int j) const { return pos_[grid_.index(i, j)]; }
  Quat& qpos(int i, int j) { return qpos_[grid_.index(i, j)]; }
  const Quat& qpos(int i, int j) const { return qpos_[grid_.index(i, j)]; }
  Vec3& normal(int i, int j) { return normal_[grid_.index(i, j)]; }
  const Vec3& normal(int i, int j) const { return normal_[grid_.index(i, j)]; }

  bool has_normals() const { return has_normals_; }
  void mark_normals() { has_normals_ = true; }

  /// Ambient distance between matching nodes of two meshes (sup over grid).
  static double sup_distance(const SurfaceMesh& a, const SurfaceMesh& b);

 private:
  Grid2D grid_;
  MeshBackend backend_;
  GroupSpec group_;
  std::vector<Vec3> pos_;
  std::vector<Quat> qpos_;
  std::vector<Vec3> normal_;
  bool has_normals_ = false;
};

struct ReconstructOptions {
  int base_i = -1, base_j = -1;  // default: grid centre
  bool check_residual = true;
  double residual_rel_tol = 1e-4;
  bool transpose_order = false;  // integrate base column first, then rows
  bool compute_integrability = true;
  int threads = 1;
};

struct ReconstructResult {
  SurfaceMesh mesh;
  double integrability_gap = 0;
  bool integrability_warning = false;
};

/// Integrates psi_z = sum_i A_i (E_i o psi) along grid rows then columns
/// with classical 4th-order steps; psi(base node) = base.
ReconstructResult reconstruct(const TwoChartComplexField& f, const GroupSpec& grp,
                              const Vec3& base, const ReconstructOptions& opt = {});
ReconstructResult reconstruct(const TwoChartComplexField& f, const GroupSpec& grp,
                              const Quat& base, const ReconstructOptions& opt = {});

/// Left translation by a group element, node-wise.
SurfaceMesh left_translate(const SurfaceMesh& mesh, const SemidirectPoint& g);
SurfaceMesh left_translate(const SurfaceMesh& mesh, const Quat& g);

/// Frame components of the discrete tangents along the two grid directions.
struct TangentField {
  std::vector<Vec3> tu, tv;
};
TangentField mesh_tangents(const SurfaceMesh& mesh);

/// Discrete Gauss map: stereo projection of the metric cross product of the
/// tangents, oriented so (psi_u, psi_v, N) is positive. H is left at zero.
TwoChartComplexField mesh_gauss_map(const SurfaceMesh& mesh);

/// Mean curvature from discrete fundamental forms, with the connection
/// correction in frame components. Convention: H = +1/r for a sphere of
/// radius r with the inward normal (the one whose Gauss map is the
/// stereographic identity).
std::vector<double> mesh_mean_curvature(const SurfaceMesh& mesh);

/// Gauss map and mean curvature in one extraction.
TwoChartComplexField mesh_extract_field(const SurfaceMesh& mesh);

/// Mixed-partial (Frobenius) defect of the integration data per plaquette,
/// on the plaquettes whose corners have centred stencils; O(h^2) for
/// solution fields, stagnating otherwise.
std::vector<double> compatibility_residual(const TwoChartComplexField& f, const GroupSpec& grp);

}  // namespace pmc
