#pragma once

#include <string>

#include "pmc/errors.hpp"
#include "pmc/modelsphere.hpp"
#include "pmc/qdiff.hpp"
#include "pmc/weierstrass.hpp"

namespace pmc {

/// Parsing/file-format failures (distinct from semantic validation).
struct ConfigError : Error {
  using Error::Error;
};

/// 17 significant digits, reproducible across runs.
std::string format17(double v);

/// Field CSV: a metadata comment line, then i,j,chart,re_g,im_g,H.
void write_field_csv(const TwoChartComplexField& f, const std::string& path);
TwoChartComplexField read_field_csv(const std::string& path);

/// Q-coefficient CSV: i,j,abs_q,arg_q (plus re/im for reuse).
void write_qdiff_csv(const QDiffField& q, const std::string& path);
QDiffField read_qdiff_csv(const std::string& path);

/// Profile CSV: theta,x,z,k1,k2.
void write_profile_csv(const RotationalProfile& p, const std::string& path);

/// OBJ with positions and per-vertex normals; semidirect coordinates are
/// written as x y z, quaternion meshes project to the imaginary part.
void write_mesh_obj(const SurfaceMesh& mesh, const std::string& path);

/// JSON sidecar describing a mesh (group, backend, base point, resolution).
void write_mesh_sidecar(const SurfaceMesh& mesh, const std::string& path);

}  // namespace pmc
