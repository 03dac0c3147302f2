#include <doctest.h>

#include <random>

#include "cfear/features.hpp"

using namespace cfear;

namespace {

FilteredPoint fp(double x, double y, double intensity = 1.0, double t = 0.0, int az = 0) {
  return {Vec2(x, y), intensity, t, az};
}

// Random full-rank clusters, each well inside its own grid cell.
std::vector<FilteredPoint> random_clusters(std::mt19937& rng, int n_clusters, double resolution) {
  std::uniform_int_distribution<int> cell(-6, 6);
  std::uniform_real_distribution<double> inner(0.25, 0.75);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  std::uniform_real_distribution<double> w(0.3, 1.0);
  std::vector<FilteredPoint> pts;
  for (int c = 0; c < n_clusters; ++c) {
    const Vec2 center((cell(rng) + inner(rng)) * resolution, (cell(rng) + inner(rng)) * resolution);
    for (int i = 0; i < 8; ++i) {
      const Vec2 p = center + Vec2(jitter(rng), jitter(rng)) * resolution;
      pts.push_back(fp(p.x(), p.y(), w(rng)));
    }
  }
  return pts;
}

}  // namespace

TEST_CASE("zero twist leaves points untouched") {
  const std::vector<FilteredPoint> pts = {fp(1.0, 2.0, 0.5, 0.1), fp(-3.0, 0.5, 0.9, 0.2)};
  const auto out = motion_compensate(pts, Twist2{}, 0.15);
  for (size_t i = 0; i < pts.size(); ++i) {
    CHECK(out[i].position == pts[i].position);
    CHECK(out[i].intensity == pts[i].intensity);
  }
}

TEST_CASE("forward translation shifts a later point forward") {
  // Sensor moving +x at 1 m/s; a point captured 0.1 s after t_ref at (10, 0)
  // lands at (10.1, 0) when re-expressed at t_ref.
  const auto out = motion_compensate({fp(10.0, 0.0, 1.0, 0.1)}, Twist2{1.0, 0.0, 0.0}, 0.0);
  CHECK(out[0].position.x() == doctest::Approx(10.1));
  CHECK(out[0].position.y() == doctest::Approx(0.0));
}

TEST_CASE("zero elapsed time is a no-op even when rotating") {
  const auto out = motion_compensate({fp(4.0, -2.0, 1.0, 0.5)}, Twist2{0.0, 0.0, 2.0}, 0.5);
  CHECK(out[0].position.x() == doctest::Approx(4.0));
  CHECK(out[0].position.y() == doctest::Approx(-2.0));
}

TEST_CASE("compensating with the negated twist restores the input") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<FilteredPoint> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(fp(30.0 * u(rng), 30.0 * u(rng), 0.5, 0.25 * u(rng)));
    const Twist2 tw{8.0 * u(rng), 2.0 * u(rng), 1.5 * u(rng)};
    const auto there = motion_compensate(pts, tw, 0.1);
    const auto back = motion_compensate(there, Twist2{-tw.vx, -tw.vy, -tw.omega}, 0.1);
    for (size_t i = 0; i < pts.size(); ++i)
      CHECK((back[i].position - pts[i].position).norm() < 1e-9);
  }
}

TEST_CASE("coincident points floor the covariance at the absolute minimum") {
  std::vector<FilteredPoint> pts(6, fp(4.0, 7.0));
  const SurfacePointSet set = compute_surface_points(pts, 10.0, 6);
  REQUIRE(set.size() == 1);
  const SurfacePoint& sp = set.points[0];
  CHECK(sp.mean.x() == doctest::Approx(4.0));
  CHECK(sp.mean.y() == doctest::Approx(7.0));
  CHECK(sp.covariance(0, 0) == doctest::Approx(kCovAbsFloor));
  CHECK(sp.covariance(1, 1) == doctest::Approx(kCovAbsFloor));
  CHECK(sp.covariance(0, 1) == doctest::Approx(0.0));
  CHECK(sp.support == 6);
}

TEST_CASE("collinear cluster: weighted covariance along the line, floored across") {
  std::vector<FilteredPoint> pts;
  for (int i = 0; i <= 5; ++i) pts.push_back(fp(static_cast<double>(i), 0.0));
  const SurfacePointSet set = compute_surface_points(pts, 10.0, 6);
  REQUIRE(set.size() == 1);
  const SurfacePoint& sp = set.points[0];
  CHECK(sp.mean.x() == doctest::Approx(2.5));
  CHECK(sp.mean.y() == doctest::Approx(0.0));
  // Intensity-weighted estimator sum w (p-mu)^2 / sum w = 17.5 / 6.
  const double var_along = 17.5 / 6.0;
  CHECK(sp.covariance(0, 0) == doctest::Approx(var_along).epsilon(1e-12));
  CHECK(sp.covariance(1, 1) == doctest::Approx(std::max(kCovAbsFloor, kCovRelFloor * var_along)));
  // Normal across the line; the sign tie (dot with -mean is zero) resolves +y.
  CHECK(sp.normal.x() == doctest::Approx(0.0));
  CHECK(sp.normal.y() == doctest::Approx(1.0));
}

TEST_CASE("intensity weighting shifts the centroid") {
  const std::vector<FilteredPoint> pts = {fp(0.0, 0.0, 3.0), fp(1.0, 0.0, 1.0)};
  const SurfacePointSet set = compute_surface_points(pts, 10.0, 2);
  REQUIRE(set.size() == 1);
  CHECK(set.points[0].mean.x() == doctest::Approx(0.25));
  CHECK(set.points[0].intensity_sum == doctest::Approx(4.0));
}

TEST_CASE("cells below n_min are dropped") {
  std::vector<FilteredPoint> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(fp(0.1 * i, 0.2));     // 5 points, cell (0,0)
  for (int i = 0; i < 6; ++i) pts.push_back(fp(20.0 + 0.1 * i, 0.2));  // 6 points
  const SurfacePointSet set = compute_surface_points(pts, 3.0, 6);
  REQUIRE(set.size() == 1);
  CHECK(set.points[0].mean.x() > 10.0);
}

TEST_CASE("translation by whole cells shifts means and preserves shape") {
  std::mt19937 rng(41);
  const double res = 3.0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = random_clusters(rng, 6, res);
    const Vec2 shift(res * 4, res * -2);
    auto shifted = pts;
    for (auto& p : shifted) p.position += shift;
    const SurfacePointSet a = compute_surface_points(pts, res, 4);
    const SurfacePointSet b = compute_surface_points(shifted, res, 4);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK((b.points[i].mean - a.points[i].mean - shift).norm() < 1e-9);
      CHECK((b.points[i].covariance - a.points[i].covariance).norm() < 1e-9);
      const double align = std::abs(b.points[i].normal.dot(a.points[i].normal));
      CHECK(align == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("quarter-turn rotation maps the grid onto itself") {
  std::mt19937 rng(47);
  const double res = 3.0;
  Mat2 rot;
  rot << 0.0, -1.0, 1.0, 0.0;  // +90 degrees
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = random_clusters(rng, 6, res);
    auto rotated = pts;
    for (auto& p : rotated) p.position = rot * p.position;
    const SurfacePointSet a = compute_surface_points(pts, res, 4);
    const SurfacePointSet b = compute_surface_points(rotated, res, 4);
    REQUIRE(a.size() == b.size());
    // Match by rotated mean; output order differs after rotation.
    for (const SurfacePoint& sa : a.points) {
      const Vec2 want = rot * sa.mean;
      const auto it = std::find_if(b.points.begin(), b.points.end(), [&](const SurfacePoint& sb) {
        return (sb.mean - want).norm() < 1e-9;
      });
      REQUIRE(it != b.points.end());
      CHECK((it->covariance - rot * sa.covariance * rot.transpose()).norm() < 1e-9);
      CHECK(std::abs(it->normal.dot(Vec2(rot * sa.normal))) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("emitted covariances are positive definite and well-conditioned") {
  std::mt19937 rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = random_clusters(rng, 8, 3.0);
    const SurfacePointSet set = compute_surface_points(pts, 3.0, 4);
    for (const SurfacePoint& sp : set.points) {
      const SymEigen2 e = sym_eigen2(sp.covariance);
      CHECK(e.eval_min > 0.0);
      CHECK(e.eval_max / e.eval_min <= 1.0 / kCovRelFloor + 1.0);
      CHECK(sp.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
      // The normal is the smallest-eigenvalue eigenvector of the covariance.
      CHECK((sp.covariance * sp.normal - e.eval_min * sp.normal).norm() < 1e-9);
      // Oriented toward the sensor (or the tie-break convention).
      CHECK(sp.normal.dot(-sp.mean) >= -1e-9);
    }
  }
}

TEST_CASE("surface points are ordered by cell index") {
  std::mt19937 rng(59);
  const auto pts = random_clusters(rng, 10, 3.0);
  const SurfacePointSet set = compute_surface_points(pts, 3.0, 4);
  for (size_t i = 1; i < set.size(); ++i) {
    const auto cell = [&](const Vec2& m) {
      return std::pair(static_cast<int>(std::floor(m.x() / 3.0)),
                       static_cast<int>(std::floor(m.y() / 3.0)));
    };
    CHECK(cell(set.points[i - 1].mean) < cell(set.points[i].mean));
  }
}
