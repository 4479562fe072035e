#include "pmc/prescribed.hpp"

#include <cmath>

namespace pmc {

PrescribedH PrescribedH::constant(double H0) {
  return PrescribedH([H0](const Vec3&) { return H0; }, [](const Vec3&) { return Vec3{0, 0, 0}; });
}

PrescribedH PrescribedH::axial(std::function<double(double)> h, std::function<double(double)> dh) {
  return PrescribedH([h](const Vec3& nu) { return h(nu.z); },
                     [dh](const Vec3& nu) { return Vec3{0, 0, dh(nu.z)}; });
}

Vec3 PrescribedH::sphere_of(const ChartPoint& p) {
  const Complex v = p.value;
  const double s = 1.0 + std::norm(v);
  Vec3 n{2.0 * v.real() / s, 2.0 * v.imag() / s, (1.0 - std::norm(v)) / s};
  if (p.chart == Chart::W) {
    n.y = -n.y;
    n.z = -n.z;
  }
  return n;
}

PrescribedH::Partials PrescribedH::partials(const ChartPoint& p) const {
  const double val = value(p);
  if (grad_) {
    const Vec3 nu = sphere_of(p);
    const Vec3 gr = grad_(nu);
    const Complex v = p.value;
    const Complex vb = std::conj(v);
    const double s = 1.0 + std::norm(v);
    const double s2 = s * s;
    // d nu_i / d(chart variable); chart W flips the second and third rows.
    Complex d1 = (1.0 - vb * vb) / s2;
    Complex d2 = Complex(0, -1) * (1.0 + vb * vb) / s2;
    Complex d3 = -2.0 * vb / s2;
    if (p.chart == Chart::W) {
      d2 = -d2;
      d3 = -d3;
    }
    const Complex dq = gr.x * d1 + gr.y * d2 + gr.z * d3;
    return {val, dq, std::conj(dq), DerivMethod::ClosedForm};
  }
  const double step = 1e-5;
  const Complex v = p.value;
  const double fxp = value(ChartPoint{p.chart, v + Complex(step, 0)});
  const double fxm = value(ChartPoint{p.chart, v - Complex(step, 0)});
  const double fyp = value(ChartPoint{p.chart, v + Complex(0, step)});
  const double fym = value(ChartPoint{p.chart, v - Complex(0, step)});
  const double hx = (fxp - fxm) / (2 * step);
  const double hy = (fyp - fym) / (2 * step);
  const Complex dq = 0.5 * Complex(hx, -hy);
  return {val, dq, std::conj(dq), DerivMethod::CentralFD};
}

namespace {

// Fibonacci sphere sample, deterministic.
Vec3 sphere_sample(int k, int n) {
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  const double z = 1.0 - 2.0 * (k + 0.5) / n;
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = 2.0 * M_PI * std::fmod(k / golden, 1.0);
  return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace

double PrescribedH::antipodal_defect(int samples) const {
  double worst = 0;
  for (int k = 0; k < samples; ++k) {
    const Vec3 n = sphere_sample(k, samples);
    worst = std::max(worst, std::abs(f_(n) - f_(Vec3{-n.x, -n.y, -n.z})));
  }
  return worst;
}

double PrescribedH::min_on_sphere(int samples) const {
  double best = f_(Vec3{0, 0, 1});
  for (int k = 0; k < samples; ++k) best = std::min(best, f_(sphere_sample(k, samples)));
  return best;
}

}  // namespace pmc
