#pragma once

#include <cmath>

namespace cik {

/// Shape parameters of the normalization loss: n picks the sign of the
/// Gaussian, s the center, c the Gaussian spread, r the quartic skirt.
struct GrooveParams {
  int n = 1;
  double s = 0.0;
  double c = 0.2;
  double r = 5.0;

  bool valid() const { return (n == 0 || n == 1) && c > 0.0 && r >= 0.0 && std::isfinite(s); }
};

/// (-1)^n exp(-(x - s)^2 / (2 c^2)) + r (x - s)^4
inline double groove_loss(double x, const GrooveParams& p) {
  const double d = x - p.s;
  const double d2 = d * d;
  const double gauss = std::exp(-d2 / (2.0 * p.c * p.c));
  return (p.n == 1 ? -gauss : gauss) + p.r * d2 * d2;
}

}  // namespace cik
