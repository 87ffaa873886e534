#pragma once

// Test-only numerical oracles, kept independent of the implementation paths
// they check.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Noncentral chi-square density with 2 degrees of freedom via the standard
// Bessel form; the quadrature of this density is the CDF oracle.
inline double ncx2_density_2dof(double x, double lambda) {
  if (x < 0.0) return 0.0;
  if (lambda == 0.0) return 0.5 * std::exp(-x / 2.0);
  return 0.5 * std::exp(-(x + lambda) / 2.0) * std::cyl_bessel_i(0.0, std::sqrt(lambda * x));
}

inline double ncx2_cdf_by_quadrature(double x, double lambda) {
  if (x <= 0.0) return 0.0;
  return integrate([lambda](double t) { return ncx2_density_2dof(t, lambda); }, 0.0, x);
}

}  // namespace oracles
