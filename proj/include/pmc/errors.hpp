#pragma once

#include <stdexcept>
#include <string>

namespace pmc {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid group parameters or malformed configuration.
struct SpecError : Error {
  using Error::Error;
};

/// The potential R(H,q) vanishes (or underflows) where a formula divides by it.
struct PotentialZeroError : Error {
  using Error::Error;
};

/// A finite-difference stencil cannot be assembled at the requested node.
struct StencilUnavailableError : Error {
  using Error::Error;
};

/// Reconstruction requested in a group without a coordinate backend.
struct BackendUnsupportedError : Error {
  using Error::Error;
};

/// Discrete tangent vectors are (numerically) parallel.
struct DegenerateTangentError : Error {
  using Error::Error;
};

/// A Gauss-map value left the interpolation hull of a model sphere.
struct ModelDomainMissError : Error {
  using Error::Error;
};

/// The discrete inverse of the model Gauss map failed to land in the grid.
struct InverseInterpolationError : Error {
  using Error::Error;
};

/// Rotational profile lost strict convexity (kappa_1 <= 0) mid-integration.
struct ProfilePinchError : Error {
  using Error::Error;
};

/// A quadratic-differential zero sits on a plaquette corner after refinement.
struct BoundaryZeroError : Error {
  using Error::Error;
};

}  // namespace pmc
