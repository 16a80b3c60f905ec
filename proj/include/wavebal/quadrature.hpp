#pragma once

#include <cmath>
#include <functional>

#include "wavebal/errors.hpp"

namespace wavebal {

namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double fa, double b, double fb,
                                   double m, double fm, double whole,
                                   double tol, int depth) {
  if (depth > 48)
    throw NumericalError("adaptive quadrature did not converge on [" +
                         std::to_string(a) + ", " + std::to_string(b) + "]");
  // An interval this close to float resolution cannot be refined further;
  // whatever feature lives inside it contributes below every tolerance in
  // use. Accept rather than recurse into pure rounding noise.
  if (std::isfinite(whole) && b - a <= 1e-13 * (std::abs(a) + std::abs(b) + 1.0))
    return whole;
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol,
                              depth + 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol,
                              depth + 1);
}

}  // namespace detail

/// Adaptive Simpson integration of f over [a, b] with absolute tolerance.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = detail::simpson(a, fa, b, fb, fm);
  return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 0);
}

}  // namespace wavebal
