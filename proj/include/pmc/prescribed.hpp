#pragma once

#include <functional>
#include <optional>

#include "pmc/linalg.hpp"
#include "pmc/potential.hpp"

namespace pmc {

/// A prescribed mean curvature function on the sphere of Gauss-map values,
/// with first-derivative access in either stereographic chart. Derivatives
/// come from a user-supplied gradient when available and fall back to
/// central differences on the chart variable; the method in use is recorded
/// per evaluation.
class PrescribedH {
 public:
  enum class DerivMethod { ClosedForm, CentralFD };

  using Fn = std::function<double(const Vec3&)>;
  using Grad = std::function<Vec3(const Vec3&)>;

  explicit PrescribedH(Fn f) : f_(std::move(f)) {}
  PrescribedH(Fn f, Grad grad) : f_(std::move(f)), grad_(std::move(grad)) {}

  static PrescribedH constant(double H0);
  /// h as a function of t = nu_3 only (rotationally symmetric prescriptions).
  static PrescribedH axial(std::function<double(double)> h, std::function<double(double)> dh);

  double value(const Vec3& nu) const { return f_(nu); }
  double value(const ChartPoint& p) const { return f_(sphere_of(p)); }

  struct Partials {
    double value;
    Complex dq;     // derivative in the chart variable
    Complex dqbar;  // conjugate partial (= conj(dq) for real-valued H)
    DerivMethod method;
  };
  Partials partials(const ChartPoint& p) const;

  bool has_closed_form() const { return bool(grad_); }
  /// Raw gradient of the extension, when supplied.
  std::optional<Vec3> raw_gradient(const Vec3& nu) const {
    if (!grad_) return std::nullopt;
    return grad_(nu);
  }

  /// Sampled max |h(nu) - h(-nu)|; zero (to 1e-12) flags antipodal symmetry.
  double antipodal_defect(int samples = 512) const;
  /// Sampled min of h over the sphere.
  double min_on_sphere(int samples = 512) const;

  /// Unit sphere point represented by a chart point.
  static Vec3 sphere_of(const ChartPoint& p);

 private:
  Fn f_;
  Grad grad_;
};

}  // namespace pmc
