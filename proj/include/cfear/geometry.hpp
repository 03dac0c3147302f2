#pragma once

#include <Eigen/Core>
#include <cmath>

namespace cfear {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a <= 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

/// Rigid transform in the plane, x = (x, y, theta) with theta in (-pi, pi].
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2() = default;
  Pose2(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  Mat2 rotation() const {
    const double c = std::cos(theta), s = std::sin(theta);
    Mat2 r;
    r << c, -s, s, c;
    return r;
  }

  Vec2 translation() const { return {x, y}; }

  Vec2 operator*(const Vec2& p) const {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * p.x() - s * p.y() + x, s * p.x() + c * p.y() + y};
  }

  Pose2 operator*(const Pose2& o) const {
    const Vec2 t = (*this) * Vec2(o.x, o.y);
    return {t.x(), t.y(), theta + o.theta};
  }

  Pose2 inverse() const {
    const double c = std::cos(theta), s = std::sin(theta);
    return {-(c * x + s * y), -(-s * x + c * y), -theta};
  }

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta); }
};

/// Body-frame velocity (vx, vy, omega), the constant-twist motion model.
struct Twist2 {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;

  Twist2 operator*(double s) const { return {vx * s, vy * s, omega * s}; }
  bool is_zero() const { return vx == 0.0 && vy == 0.0 && omega == 0.0; }
};

namespace detail {
// sin(t)/t and (1-cos(t))/t with series fallback near zero.
inline void exp_coeffs(double t, double& a, double& b) {
  if (std::abs(t) < 1e-8) {
    a = 1.0 - t * t / 6.0;
    b = 0.5 * t - t * t * t / 24.0;
  } else {
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t;
  }
}
}  // namespace detail

/// SE(2) exponential: pose reached after unit time under constant twist xi.
inline Pose2 se2_exp(const Twist2& xi) {
  double a, b;
  detail::exp_coeffs(xi.omega, a, b);
  return {a * xi.vx - b * xi.vy, b * xi.vx + a * xi.vy, xi.omega};
}

/// SE(2) logarithm, inverse of se2_exp.
inline Twist2 se2_log(const Pose2& p) {
  double a, b;
  detail::exp_coeffs(p.theta, a, b);
  const double det = a * a + b * b;
  return {(a * p.x + b * p.y) / det, (-b * p.x + a * p.y) / det, p.theta};
}

/// Eigen-decomposition of a symmetric 2x2 matrix. Eigenvalues ascending,
/// columns of vectors are the matching unit eigenvectors. For (near-)isotropic
/// input returns the canonical axes.
struct SymEigen2 {
  double eval_min = 0.0;
  double eval_max = 0.0;
  Vec2 evec_min{1.0, 0.0};
  Vec2 evec_max{0.0, 1.0};
};

inline SymEigen2 sym_eigen2(const Mat2& m) {
  const double a = m(0, 0), b = 0.5 * (m(0, 1) + m(1, 0)), c = m(1, 1);
  const double tr = a + c;
  const double diff = a - c;
  const double disc = std::sqrt(diff * diff + 4.0 * b * b);
  SymEigen2 out;
  out.eval_min = 0.5 * (tr - disc);
  out.eval_max = 0.5 * (tr + disc);
  if (disc < 1e-300) {
    out.evec_min = {1.0, 0.0};
    out.evec_max = {0.0, 1.0};
    return out;
  }
  // Eigenvector for eval_max from the better-conditioned column.
  Vec2 v1{b, out.eval_max - a};
  Vec2 v2{out.eval_max - c, b};
  Vec2 vmax = (v1.squaredNorm() > v2.squaredNorm()) ? v1 : v2;
  const double n = vmax.norm();
  if (n < 1e-300) {
    out.evec_min = {1.0, 0.0};
    out.evec_max = {0.0, 1.0};
    return out;
  }
  vmax /= n;
  out.evec_max = vmax;
  out.evec_min = {-vmax.y(), vmax.x()};
  return out;
}

}  // namespace cfear
