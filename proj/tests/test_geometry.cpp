#include <scatterfm/errors.hpp>
#include <scatterfm/geometry.hpp>

#include "support/gen.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <numbers>

namespace sfm {
namespace {

constexpr double kPi = std::numbers::pi;

double reference_perimeter(const std::function<Vec2(double)>& velocity) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double t) { return velocity(t).norm(); }, 0.0, 2.0 * kPi, 15, 1e-14);
}

TEST(Geometry, CircleNodesNormalsWeights) {
  const Vec2 c(0.4, -1.1);
  const auto mesh = discretize_curve({Circle{c, 1.7}}, 64);
  ASSERT_EQ(mesh.size(), 64);
  EXPECT_EQ(mesh.kind, MeshKind::smooth_periodic);
  for (int j = 0; j < mesh.size(); ++j) {
    EXPECT_NEAR((mesh.nodes[j] - c).norm(), 1.7, 1e-14);
    EXPECT_NEAR(mesh.normals[j].dot((mesh.nodes[j] - c) / 1.7), 1.0, 1e-14);
    EXPECT_NEAR(mesh.normals[j].dot(mesh.tangents[j]), 0.0, 1e-14);
    EXPECT_NEAR(mesh.weights[j], 2.0 * kPi * 1.7 / 64, 1e-14);
  }
}

TEST(Geometry, KitePerimeterMatchesAdaptiveQuadrature) {
  const double ref = reference_perimeter([](double t) {
    return Vec2(-std::sin(t) - 1.3 * std::sin(2.0 * t), 1.5 * std::cos(t));
  });
  EXPECT_NEAR(discretize_curve({Kite{}}, 128).total_length(), ref, 1e-12 * ref);
}

TEST(Geometry, EllipsePerimeterProperty) {
  testing::Gen gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Ellipse e = gen.ellipse();
    SCOPED_TRACE(trial);
    const double a = e.semiaxes.x();
    const double b = e.semiaxes.y();
    const double ref = reference_perimeter([&](double t) { return Vec2(-a * std::sin(t), b * std::cos(t)); });
    const auto mesh = discretize_curve({e}, 96);
    EXPECT_NEAR(mesh.total_length(), ref, 1e-12 * ref);
    // Outward normals: a point nudged along the normal leaves the ellipse.
    for (int j = 0; j < mesh.size(); j += 7) {
      const Vec2 p = mesh.nodes[j] + 1e-3 * mesh.normals[j] - e.center;
      EXPECT_GT(std::pow(p.x() / a, 2) + std::pow(p.y() / b, 2), 1.0);
    }
  }
}

TEST(Geometry, PanelWeightsSumToLength) {
  const auto seg = discretize_curve({Segment{{-1.0, 0.5}, {2.0, 4.5}}}, 40);
  EXPECT_EQ(seg.kind, MeshKind::panels);
  EXPECT_FALSE(seg.closed);
  EXPECT_NEAR(seg.total_length(), 5.0, 1e-13);
  // Grading: end panels are shorter than central ones.
  EXPECT_LT(seg.weights.front(), 0.1 * seg.weights[20]);

  const auto arc = discretize_curve({CircularArc{{0.0, 0.0}, 2.0, 0.0, kPi / 2}}, 32);
  EXPECT_NEAR(arc.total_length(), kPi, 1e-13);

  const auto square = discretize_curve({Polygon{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}}}, 40);
  EXPECT_NEAR(square.total_length(), 4.0, 1e-13);
  // Clockwise input is reoriented: normals point away from the centre.
  for (int j = 0; j < square.size(); ++j) {
    EXPECT_GT(square.normals[j].dot(square.nodes[j] - Vec2(0.5, 0.5)), 0.0);
  }
}

TEST(Geometry, RejectsInvalidShapes) {
  EXPECT_THROW(validate({Circle{{0, 0}, -1.0}}), InvalidInput);
  EXPECT_THROW(validate({Ellipse{{0, 0}, {1.0, 0.0}}}), InvalidInput);
  EXPECT_THROW(validate({Segment{{1, 1}, {1, 1}}}), InvalidInput);
  EXPECT_THROW(validate({CircularArc{{0, 0}, 1.0, 0.0, 2.0 * kPi}}), InvalidInput);
  EXPECT_THROW(validate({Polygon{{{0, 0}, {1, 0}}}}), InvalidInput);
  EXPECT_THROW(validate({Polygon{{{0, 0}, {1, 0}, {1, 0}, {0, 1}}}}), InvalidInput);
  EXPECT_THROW(validate({Polygon{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}}), InvalidInput);  // bow tie
  EXPECT_THROW(validate({Polygon{{{0, 0}, {1, 0}, {2, 0}}}}), InvalidInput);          // zero area
  EXPECT_THROW(discretize_curve({Circle{}}, 7), InvalidInput);
  EXPECT_THROW(discretize_curve({Segment{}}, 3), InvalidInput);
  EXPECT_THROW(discretize_curve({Polygon{{{0, 0}, {1, 0}, {0, 1}}}}, 5), InvalidInput);
}

TEST(Geometry, ScreenMasks) {
  const auto mesh = discretize_curve({Circle{}}, 16);
  const auto half = with_screen(mesh, 0.0, kPi - 1e-12);
  EXPECT_EQ(half.screen_indices(), (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7}));
  const auto range = with_screen_range(mesh, 3, 5);
  EXPECT_EQ(range.screen_indices(), (std::vector<int>{3, 4, 5}));
  EXPECT_THROW(with_screen_range(mesh, 5, 16), InvalidInput);
  EXPECT_THROW(with_screen(mesh, 0.01, 0.02), InvalidInput);
  EXPECT_NE(mesh.id, discretize_curve({Circle{}}, 18).id);
  EXPECT_EQ(mesh.id, discretize_curve({Circle{}}, 16).id);
}

TEST(Geometry, SamplingGridLayout) {
  const SamplingGrid g({-2.0, 2.0, -1.0, 1.0}, 5, 3);
  ASSERT_EQ(g.size(), 15);
  EXPECT_EQ(g.point(0, 0), Vec2(-2.0, -1.0));
  EXPECT_EQ(g.point(2, 4), Vec2(2.0, 1.0));
  EXPECT_EQ(g.points()[1], Vec2(-1.0, -1.0));  // row-major, x fastest
  EXPECT_THROW(SamplingGrid({0.0, 0.0, 0.0, 1.0}, 2, 2), InvalidInput);
}

TEST(Geometry, InsideAndDistance) {
  const auto poly = sample_polyline({Kite{}}, 1024);
  EXPECT_TRUE(inside_polyline(poly, {0.0, 0.0}));
  EXPECT_TRUE(inside_polyline(poly, {0.5, 0.0}));
  EXPECT_FALSE(inside_polyline(poly, {3.0, 0.0}));
  // The kite meets the positive x axis at x = 1.
  EXPECT_NEAR(distance_to_polyline(poly, {3.0, 0.0}, true), 2.0, 1e-9);
  const std::vector<Vec2> seg{{-1.0, 0.0}, {1.0, 0.0}};
  EXPECT_DOUBLE_EQ(distance_to_polyline(seg, {0.0, 2.0}, false), 2.0);
  EXPECT_DOUBLE_EQ(distance_to_polyline(seg, {4.0, 4.0}, false), 5.0);
}

}  // namespace
}  // namespace sfm
