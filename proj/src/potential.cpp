#include "pmc/potential.hpp"

#include <algorithm>
#include <cmath>

#include "pmc/errors.hpp"
#include "pmc/parallel.hpp"

namespace pmc {

namespace {

constexpr Complex kI{0, 1};

Complex theta_unimodular(const std::array<double, 3>& mu, Complex q) {
  const Complex q2 = q * q;
  const double t2 = std::norm(1.0 + q2);  // |1+q^2|^2
  const double t1 = std::norm(1.0 - q2);
  const double t3 = std::norm(q);
  return -0.5 * kI * (mu[1] * t2 + mu[0] * t1 + 4.0 * mu[2] * t3);
}

// d/dq of the unimodular Theta: |1+q^2|^2 -> 2q(1+qbar^2),
// |1-q^2|^2 -> -2q(1-qbar^2), |q|^2 -> qbar.
Complex theta_unimodular_dq(const std::array<double, 3>& mu, Complex q) {
  const Complex qb = std::conj(q);
  const Complex qb2 = qb * qb;
  return -0.5 * kI *
         (mu[1] * 2.0 * q * (1.0 + qb2) - mu[0] * 2.0 * q * (1.0 - qb2) + 4.0 * mu[2] * qb);
}

Complex theta_unimodular_dqbar(const std::array<double, 3>& mu, Complex q) {
  const Complex qb = std::conj(q);
  const Complex q2 = q * q;
  return -0.5 * kI *
         (mu[1] * 2.0 * qb * (1.0 + q2) - mu[0] * 2.0 * qb * (1.0 - q2) + 4.0 * mu[2] * q);
}

// Theta for the trace-2 semidirect groups, and its |w|^4-rescaled form in
// chart W (the first two terms flip sign under q -> 1/w; the b-term keeps
// its shape).
Complex theta_nonunimodular(double a, double b, Complex q, Chart chart) {
  const Complex q2 = q * q;
  const Complex qb2 = std::conj(q2);
  const double n4 = std::norm(q) * std::norm(q);  // |q|^4
  const double sign = (chart == Chart::Q) ? 1.0 : -1.0;
  return sign * (-(1.0 - n4) - a * (q2 - qb2)) -
         kI * b * (2.0 * std::norm(q) - a * (q2 + qb2));
}

Complex theta_nonunimodular_dq(double a, double b, Complex q, Chart chart) {
  const Complex qb = std::conj(q);
  const double sign = (chart == Chart::Q) ? 1.0 : -1.0;
  return sign * (2.0 * q * qb * qb - 2.0 * a * q) - kI * b * (2.0 * qb - 2.0 * a * q);
}

Complex theta_nonunimodular_dqbar(double a, double b, Complex q, Chart chart) {
  const Complex qb = std::conj(q);
  const double sign = (chart == Chart::Q) ? 1.0 : -1.0;
  return sign * (2.0 * q * q * qb + 2.0 * a * qb) - kI * b * (2.0 * q - 2.0 * a * qb);
}

}  // namespace

Complex theta(const GroupSpec& g, const ChartPoint& p) {
  if (g.kind() == GroupKind::Unimodular) {
    // The unimodular Theta is invariant under the |w|^4 rescale: the same
    // formula evaluated at w covers chart W.
    return theta_unimodular(g.mu(), p.value);
  }
  return theta_nonunimodular(g.a(), g.b(), p.value, p.chart);
}

PotentialEval potential_eval(const GroupSpec& g, double H, const ChartPoint& p) {
  const Complex q = p.value;
  const Complex qb = std::conj(q);
  const double s = 1.0 + std::norm(q);
  PotentialEval e;
  e.chart = p.chart;
  e.R_H = s * s;
  Complex th, th_q, th_qb;
  if (g.kind() == GroupKind::Unimodular) {
    th = theta_unimodular(g.mu(), q);
    th_q = theta_unimodular_dq(g.mu(), q);
    th_qb = theta_unimodular_dqbar(g.mu(), q);
  } else {
    th = theta_nonunimodular(g.a(), g.b(), q, p.chart);
    th_q = theta_nonunimodular_dq(g.a(), g.b(), q, p.chart);
    th_qb = theta_nonunimodular_dqbar(g.a(), g.b(), q, p.chart);
  }
  e.R = H * s * s + th;
  e.R_q = 2.0 * H * qb * s + th_q;
  e.R_qbar = 2.0 * H * q * s + th_qb;
  return e;
}

Complex potential_infinity_limit(const GroupSpec& g, double H) {
  return potential_eval(g, H, ChartPoint::infinity()).R;
}

CriticalH critical_threshold_h0(const GroupSpec& g) {
  if (g.compact()) return {true, 0};
  if (g.kind() == GroupKind::Unimodular) return {false, 0};
  return {false, 1};
}

namespace {

struct Candidate {
  Chart chart;
  Complex start;
};

// Damped Gauss-Newton on (Re R, Im R) as a real 2x2 system; the Jacobian in
// real coordinates follows from the Wirtinger partials. Levenberg damping
// handles the rank-deficient case (e.g. R real-valued with a quadratic
// zero), at the cost of linear convergence there.
bool refine_zero(const GroupSpec& g, double H, Chart chart, Complex start, Complex& out) {
  Complex q = start;
  double lambda = 1e-12;
  double best = std::abs(potential_eval(g, H, {chart, q}).R);
  for (int it = 0; it < 300; ++it) {
    const PotentialEval e = potential_eval(g, H, {chart, q});
    const double f1 = e.R.real(), f2 = e.R.imag();
    const double fn = std::hypot(f1, f2);
    if (fn < 1e-13) {
      out = q;
      return true;
    }
    // d/dx = R_q + R_qbar, d/dy = i (R_q - R_qbar).
    const Complex dx = e.R_q + e.R_qbar;
    const Complex dy = kI * (e.R_q - e.R_qbar);
    const double a11 = dx.real(), a12 = dy.real();
    const double a21 = dx.imag(), a22 = dy.imag();
    // Normal equations with Levenberg damping.
    const double g1 = a11 * f1 + a21 * f2;
    const double g2 = a12 * f1 + a22 * f2;
    const double h11 = a11 * a11 + a21 * a21 + lambda;
    const double h12 = a11 * a12 + a21 * a22;
    const double h22 = a12 * a12 + a22 * a22 + lambda;
    const double det = h11 * h22 - h12 * h12;
    if (det == 0 || !std::isfinite(det)) return false;
    const double sx = (h22 * g1 - h12 * g2) / det;
    const double sy = (h11 * g2 - h12 * g1) / det;
    Complex q_new = q - Complex(sx, sy);
    double fn_new = std::abs(potential_eval(g, H, {chart, q_new}).R);
    if (fn_new < fn) {
      q = q_new;
      lambda = std::max(lambda * 0.3, 1e-14);
      best = std::min(best, fn_new);
    } else {
      lambda *= 10;
      if (lambda > 1e12) return false;
    }
  }
  if (best < 1e-13) {
    out = q;
    return true;
  }
  return false;
}

Vec3 sphere_point(Chart chart, Complex v) {
  const double s = 1.0 + std::norm(v);
  Vec3 n{2.0 * v.real() / s, 2.0 * v.imag() / s, (1.0 - std::norm(v)) / s};
  if (chart == Chart::W) {
    n.y = -n.y;
    n.z = -n.z;
  }
  return n;
}

}  // namespace

ZeroScanResult zero_scan(const GroupSpec& g, double H, int grid_n, int threads) {
  if (grid_n < 16) throw SpecError("zero_scan requires grid_n >= 16");
  const int n = grid_n;
  const double lim = 1.5;
  const double h = 2.0 * lim / (n - 1);

  ZeroScanResult result;
  std::vector<Complex> vals[2];
  vals[0].resize(std::size_t(n) * n);
  vals[1].resize(std::size_t(n) * n);
  double max_abs = 0;
  for (int c = 0; c < 2; ++c) {
    const Chart chart = c == 0 ? Chart::Q : Chart::W;
    parallel_for(std::size_t(n) * n, threads, [&](std::size_t idx) {
      const int j = int(idx) / n, i = int(idx) % n;
      const Complex q(-lim + i * h, -lim + j * h);
      vals[c][idx] = potential_eval(g, H, {chart, q}).R;
    });
    for (const Complex& v : vals[c]) max_abs = std::max(max_abs, std::abs(v));
  }
  if (max_abs < 1e-13) {
    result.identically_zero = true;
    return result;
  }

  std::vector<Candidate> cand;
  for (int c = 0; c < 2; ++c) {
    const Chart chart = c == 0 ? Chart::Q : Chart::W;
    auto at = [&](int i, int j) { return vals[c][std::size_t(j) * n + i]; };
    // Plaquette winding of arg R.
    for (int j = 0; j + 1 < n; ++j)
      for (int i = 0; i + 1 < n; ++i) {
        const Complex corner[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
        double total = 0;
        bool degenerate = false;
        for (int k = 0; k < 4; ++k) {
          const Complex a = corner[k], b = corner[(k + 1) % 4];
          if (a == Complex(0, 0) || b == Complex(0, 0)) {
            degenerate = true;
            break;
          }
          total += std::arg(b / a);
        }
        const bool wind = !degenerate && std::abs(total) > 1.0;
        if (wind || degenerate) {
          const Complex center(-lim + (i + 0.5) * h, -lim + (j + 0.5) * h);
          cand.push_back({chart, center});
        }
      }
    // Local minima of |R| (winding misses zeros without sign change).
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double v = std::abs(at(i, j));
        bool is_min = true;
        for (int dj = -1; dj <= 1 && is_min; ++dj)
          for (int di = -1; di <= 1; ++di) {
            if (di == 0 && dj == 0) continue;
            const int ii = i + di, jj = j + dj;
            if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
            if (std::abs(at(ii, jj)) < v) {
              is_min = false;
              break;
            }
          }
        if (is_min && v < 0.05 * max_abs)
          cand.push_back({chart, Complex(-lim + i * h, -lim + j * h)});
      }
  }

  std::vector<std::pair<Vec3, ChartPoint>> found;
  for (const Candidate& c : cand) {
    Complex zero;
    if (!refine_zero(g, H, c.chart, c.start, zero)) continue;
    if (std::abs(zero) > lim + 0.25) continue;  // belongs to the other chart's scan
    const Vec3 p = sphere_point(c.chart, zero);
    bool dup = false;
    for (const auto& f : found)
      if (norm(p - f.first) < 1e-6) {
        dup = true;
        break;
      }
    if (!dup) {
      ChartPoint cp{c.chart, zero};
      // Canonical chart for reporting.
      if (std::abs(zero) > 1.0) cp = cp.in_chart(c.chart == Chart::Q ? Chart::W : Chart::Q);
      found.push_back({p, cp});
    }
  }
  for (auto& f : found) result.zeros.push_back(f.second);
  return result;
}

}  // namespace pmc
