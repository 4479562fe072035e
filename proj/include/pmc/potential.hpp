#pragma once

#include <vector>

#include "pmc/liegroup.hpp"
#include "pmc/linalg.hpp"

namespace pmc {

/// The extended plane is covered by two stereographic charts: Q holds q
/// itself, W holds w = 1/q (so W with value 0 is q = infinity). The overlap
/// annulus 2/3 < |q| < 3/2 is valid in either chart.
enum class Chart { Q, W };

struct ChartPoint {
  Chart chart = Chart::Q;
  Complex value{0, 0};

  bool infinite() const { return chart == Chart::W && value == Complex(0, 0); }

  /// Value of q itself; infinity maps to a huge-but-finite sentinel only via
  /// the caller checking infinite() first.
  Complex as_q() const { return chart == Chart::Q ? value : 1.0 / value; }

  ChartPoint in_chart(Chart target) const {
    if (target == chart) return *this;
    return {target, 1.0 / value};
  }

  /// Canonical representative: chart Q for |q| <= 1, else chart W.
  static ChartPoint from_q(Complex q) {
    if (std::abs(q) <= 1.0) return {Chart::Q, q};
    return {Chart::W, 1.0 / q};
  }
  static ChartPoint infinity() { return {Chart::W, {0, 0}}; }
};

/// R and its Wirtinger partials at a point. In chart W all entries refer to
/// the rescaled potential Rt(H,w) = |w|^4 R(H,1/w) and its w-partials.
struct PotentialEval {
  Complex R;
  Complex R_q;     // d/dq (or d/dw in chart W)
  Complex R_qbar;  // d/dqbar (or d/dwbar)
  double R_H;      // (1+|q|^2)^2; real by construction
  Chart chart = Chart::Q;
};

/// Theta(q) of the potential (the H-independent part); rescaled in chart W.
Complex theta(const GroupSpec& g, const ChartPoint& p);

/// R(H,q) = H(1+|q|^2)^2 + Theta(q) with closed-form partials.
PotentialEval potential_eval(const GroupSpec& g, double H, const ChartPoint& p);

/// lim_{q->inf} R(H,q)/|q|^4, i.e. the rescaled potential at w = 0.
Complex potential_infinity_limit(const GroupSpec& g, double H);

/// Critical mean curvature h0(X): R(H,.) has no zeros for |H| > h0. The
/// (+,+,+) groups are compact and R never vanishes for any H.
struct CriticalH {
  bool compact = false;
  double h0 = 0;
};
CriticalH critical_threshold_h0(const GroupSpec& g);

struct ZeroScanResult {
  bool identically_zero = false;
  std::vector<ChartPoint> zeros;
};

/// All zeros of q -> R(H,q) on the extended plane: plaquette winding plus
/// local-minimum seeding on a two-chart grid, then damped Newton refinement
/// to |R| < 1e-12, deduplicated within radius 1e-6 on the sphere.
ZeroScanResult zero_scan(const GroupSpec& g, double H, int grid_n, int threads = 1);

}  // namespace pmc
