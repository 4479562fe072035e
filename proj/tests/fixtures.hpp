#pragma once

// Analytic seed meshes and fields shared by the unit and acceptance suites.

#include <cmath>

#include "pmc/weierstrass.hpp"

namespace pmc::fixtures {

inline Grid2D square(int n, double lim) {
  Grid2D g;
  g.nx = g.ny = n;
  g.h = 2 * lim / (n - 1);
  g.x0 = g.y0 = -lim;
  return g;
}

/// Sphere of radius 1/H0 in R^3, parametrized by its own Gauss map
/// (psi = c - nu/H0, stored normal nu inward, H = +H0).
inline SurfaceMesh euclidean_sphere(int n, double H0, double lim = 0.9,
                                    Vec3 centre = {1, 2, 3}) {
  const Grid2D grid = square(n, lim);
  SurfaceMesh mesh(grid, MeshBackend::Euclidean, GroupSpec::unimodular(0, 0, 0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vec3 nu = stereo_inv(ChartPoint::from_q(grid.node(i, j)));
      mesh.pos(i, j) = centre - (1.0 / H0) * nu;
      mesh.normal(i, j) = nu;
    }
  mesh.mark_normals();
  return mesh;
}

/// Geodesic-type sphere in H3: a Euclidean sphere in the half-space picture
/// (x, y, sigma), mapped to semidirect coordinates via z = log sigma. The
/// stereographic parameter is conformal for the ambient metric too.
inline SurfaceMesh h3_sphere(int n, double re = 0.4, double sigma0 = 1.0, double lim = 0.9) {
  const Grid2D grid = square(n, lim);
  SurfaceMesh mesh(grid, MeshBackend::Semidirect, GroupSpec::nonunimodular(0, 0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vec3 nu = stereo_inv(ChartPoint::from_q(grid.node(i, j)));
      const double sigma = sigma0 - re * nu.z;
      mesh.pos(i, j) = {-re * nu.x, -re * nu.y, std::log(sigma)};
    }
  return mesh;
}

/// Geodesic sphere of radius r about the identity in the round S^3
/// (c = (2,2,2)), conformal log-polar parametrization.
inline SurfaceMesh su2_sphere(int n, double r = 0.6, double lim = 1.2) {
  const Grid2D grid = square(n, lim);
  SurfaceMesh mesh(grid, MeshBackend::SU2, GroupSpec::unimodular(2, 2, 2));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Complex z = grid.node(i, j);
      const double t = 2 * std::atan(std::exp(z.real()));
      const Vec3 nh{std::sin(t) * std::cos(z.imag()), std::sin(t) * std::sin(z.imag()),
                    std::cos(t)};
      mesh.qpos(i, j) = Quat{std::cos(r), std::sin(r) * nh.x, std::sin(r) * nh.y,
                             std::sin(r) * nh.z};
    }
  return mesh;
}

/// Unit-radius circular cylinder about the z axis in R^3, conformal
/// parametrization (u around, v along), outward normal orientation from the
/// grid; H = -1/2 with the resulting normal.
inline SurfaceMesh cylinder(int n) {
  Grid2D grid;
  grid.nx = grid.ny = n;
  grid.h = 2 * M_PI / n;
  grid.x0 = 0;
  grid.y0 = -M_PI;
  grid.periodic_x = true;
  SurfaceMesh mesh(grid, MeshBackend::Euclidean, GroupSpec::unimodular(0, 0, 0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Complex z = grid.node(i, j);
      mesh.pos(i, j) = {std::cos(z.real()), std::sin(z.real()), z.imag()};
    }
  return mesh;
}

/// Cylinder parametrized the other way round (circle along v): the inward
/// orientation, H = +1/2.
inline SurfaceMesh cylinder_inward(int n) {
  Grid2D grid;
  grid.nx = grid.ny = n;
  grid.h = 2 * M_PI / n;
  grid.x0 = -M_PI;
  grid.y0 = 0;
  grid.periodic_y = true;
  SurfaceMesh mesh(grid, MeshBackend::Euclidean, GroupSpec::unimodular(0, 0, 0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Complex z = grid.node(i, j);
      mesh.pos(i, j) = {std::cos(z.imag()), std::sin(z.imag()), z.real()};
    }
  return mesh;
}

/// The analytic field of cylinder_inward: g = -e^{iv}, H = 1/2.
inline TwoChartComplexField cylinder_inward_field(int n) {
  Grid2D grid;
  grid.nx = grid.ny = n;
  grid.h = 2 * M_PI / n;
  grid.x0 = -M_PI;
  grid.y0 = 0;
  grid.periodic_y = true;
  return TwoChartComplexField::sample(
      grid, [](Complex z) { return -std::polar(1.0, z.imag()); },
      [](Complex) { return 0.5; });
}

/// Leaf z = z0 of the canonical foliation of a semidirect group.
inline SurfaceMesh leaf(const GroupSpec& g, int n, double z0, double lim = 1.0) {
  const Grid2D grid = square(n, lim);
  SurfaceMesh mesh(grid, MeshBackend::Semidirect, g);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Complex z = grid.node(i, j);
      mesh.pos(i, j) = {z.real(), z.imag(), z0};
    }
  return mesh;
}

/// The round-sphere solution field g(z) = z, H = H0.
inline TwoChartComplexField round_field(int n, double lim, double H0) {
  return TwoChartComplexField::sample(
      square(n, lim), [](Complex z) { return z; }, [H0](Complex) { return H0; });
}

}  // namespace pmc::fixtures
