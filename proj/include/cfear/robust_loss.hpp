#pragma once

#include <cmath>

namespace cfear {

/// Robust loss L_delta applied to registration residuals. Huber is convex
/// (quadratic core, linear tails); Cauchy has bounded influence.
struct RobustLoss {
  enum class Kind { Huber, Cauchy };

  Kind kind = Kind::Huber;
  double scale = 0.1;  // delta for Huber, c for Cauchy; > 0

  double value(double r) const {
    const double a = std::abs(r);
    if (kind == Kind::Huber) {
      if (a <= scale) return 0.5 * r * r;
      return scale * (a - 0.5 * scale);
    }
    const double q = r / scale;
    return 0.5 * scale * scale * std::log1p(q * q);
  }

  /// dL/dr.
  double influence(double r) const {
    if (kind == Kind::Huber) {
      if (std::abs(r) <= scale) return r;
      return r > 0.0 ? scale : -scale;
    }
    const double q = r / scale;
    return r / (1.0 + q * q);
  }

  /// influence(r)/r, the IRLS weight; continuous limit 1 at r = 0.
  double irls_weight(double r) const {
    const double a = std::abs(r);
    if (kind == Kind::Huber) {
      if (a <= scale) return 1.0;
      return scale / a;
    }
    const double q = r / scale;
    return 1.0 / (1.0 + q * q);
  }

  static RobustLoss huber(double delta) { return {Kind::Huber, delta}; }
  static RobustLoss cauchy(double c) { return {Kind::Cauchy, c}; }
};

}  // namespace cfear
