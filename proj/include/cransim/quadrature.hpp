#pragma once

// Adaptive Gauss-Kronrod 7-15 quadrature over a finite interval.
//
// The integrators in this library map every improper integral onto a finite
// interval with a smoothing substitution before calling integrate(), so this
// kernel only has to deal with well-behaved integrands.  Error control is by
// absolute tolerance, equidistributed over subintervals by width, with a
// floating-point floor so that a request near machine precision on a steep
// integrand cannot recurse forever.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace cransim {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;       // accumulated error estimate
  bool converged = true;    // false if the interval budget was exhausted
  std::size_t intervals = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 abscissae on [0,1] (symmetric about 0) and weights.
// Even indices are Kronrod-only points, odd indices the embedded Gauss-7.
inline constexpr double gk_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double gk_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double gk_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

// One 15-point rule application on [a,b]; returns the Kronrod value and an
// error estimate from the Gauss-7 / Kronrod-15 difference.
template <typename F>
inline void gk15(F&& f, double a, double b, double& value, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = gk_wk[7] * fc;
  double g = gk_wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * gk_x[i];
    const double fs = f(c - dx) + f(c + dx);
    k += gk_wk[i] * fs;
    if (i % 2 == 1) g += gk_wg[i / 2] * fs;
  }
  value = k * h;
  err = std::abs((k - g) * h);
}

}  // namespace detail

// Integrate f over [a,b] to absolute tolerance abs_tol.  Work is bounded by
// max_intervals; on exhaustion the remaining subintervals are accepted as-is
// and converged is set to false.
template <typename F>
QuadResult integrate(F&& f, double a, double b, double abs_tol = 1e-10,
                     std::size_t max_intervals = 4000) {
  QuadResult res;
  if (a == b) return res;

  struct Seg {
    double a, b, value, err;
  };
  const double total_width = std::abs(b - a);
  constexpr double eps = std::numeric_limits<double>::epsilon();

  std::vector<Seg> stack;
  {
    double v, e;
    detail::gk15(f, a, b, v, e);
    stack.push_back({a, b, v, e});
  }

  std::size_t used = 1;
  while (!stack.empty()) {
    Seg s = stack.back();
    stack.pop_back();
    const double width = std::abs(s.b - s.a);
    const double budget = abs_tol * (width / total_width);
    // Accept on meeting the width-proportional budget, or when the estimate
    // has hit the floating-point floor for this subinterval's magnitude.
    const bool at_floor = s.err <= 50.0 * eps * std::abs(s.value) ||
                          width <= 50.0 * eps * total_width;
    if (s.err <= budget || at_floor || used >= max_intervals) {
      res.value += s.value;
      res.error += s.err;
      if (s.err > budget && !at_floor) res.converged = false;
      continue;
    }
    const double m = 0.5 * (s.a + s.b);
    double v1, e1, v2, e2;
    detail::gk15(f, s.a, m, v1, e1);
    detail::gk15(f, m, s.b, v2, e2);
    stack.push_back({s.a, m, v1, e1});
    stack.push_back({m, s.b, v2, e2});
    ++used;
  }
  res.intervals = used;
  return res;
}

}  // namespace cransim
