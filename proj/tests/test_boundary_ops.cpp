#include <scatterfm/boundary_ops.hpp>
#include <scatterfm/errors.hpp>
#include <scatterfm/scattering.hpp>
#include <scatterfm/special.hpp>

#include "support/gen.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace sfm {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr cdouble kI{0.0, 1.0};

TEST(Special, WronskianProperty) {
  testing::Gen gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.integer(1, 20);
    const double x = gen.uniform(0.2, 30.0);
    const double y_prime = (bessel_y(n + 1, x) - bessel_y(n - 1, x)) * -0.5;
    const double w = bessel_j(n, x) * y_prime - bessel_j_prime(n, x) * bessel_y(n, x);
    EXPECT_NEAR(w, 2.0 / (kPi * x), 1e-12 * (1.0 + std::abs(bessel_y(n, x))));
  }
}

TEST(Special, HankelAndMieCoefficient) {
  EXPECT_NEAR(std::abs(hankel1(0, 1.0) - cdouble(0.7651976865579666, 0.08825696421567696)), 0.0, 1e-15);
  // |1 + 2 a_n| = 1 is the energy balance of each mode.
  for (int n = 0; n < 12; ++n) EXPECT_NEAR(std::abs(1.0 + 2.0 * mie_dirichlet_coefficient(n, 3.7)), 1.0, 1e-14);
}

TEST(WaveContext, ConversionsAndGuards) {
  const auto c = WaveContext::from_lambda(-9.0);
  EXPECT_DOUBLE_EQ(c.k(), 3.0);
  EXPECT_DOUBLE_EQ(WaveContext::from_wavenumber(2.0).lambda(), -4.0);
  EXPECT_THROW(WaveContext::from_wavenumber(0.0), InvalidInput);
  EXPECT_THROW(WaveContext::from_lambda(1.0), InvalidInput);
}

TEST(DirectionGrid, AnglesWeightsAntipodes) {
  const DirectionGrid g(8);
  EXPECT_DOUBLE_EQ(g.weights()[3], 2.0 * kPi / 8);
  for (int j = 0; j < 8; ++j) {
    EXPECT_EQ(g.antipode(g.antipode(j)), j);
    EXPECT_NEAR((g.directions()[j] + g.directions()[g.antipode(j)]).norm(), 0.0, 1e-15);
  }
}

// On a circle e^{in theta} is an eigenvector of each operator with the
// eigenvalues below (averaged traces).
struct DiskEigen {
  cdouble v, k, t;
};

DiskEigen disk_eigenvalues(int n, double k, double r) {
  const double x = k * r;
  const cdouble j = bessel_j(n, x);
  const cdouble jp = bessel_j_prime(n, x);
  return {kI * kPi * r / 2.0 * j * hankel1(n, x),
          kI * kPi * x / 4.0 * (j * hankel1_prime(n, x) + jp * hankel1(n, x)),
          kI * kPi * k * x / 2.0 * jp * hankel1_prime(n, x)};
}

TEST(BoundaryOps, DiskEigenvalueOracle) {
  testing::Gen gen(5);
  for (int trial = 0; trial < 6; ++trial) {
    const double r = gen.uniform(0.5, 1.5);
    const double k = gen.uniform(0.5, 6.0);
    const Vec2 c(gen.uniform(-1, 1), gen.uniform(-1, 1));
    SCOPED_TRACE(::testing::Message() << "r=" << r << " k=" << k);
    const int n = 128;
    const auto mesh = discretize_curve({Circle{c, r}}, n);
    const auto ctx = WaveContext::from_wavenumber(k);
    const auto V = assemble_boundary_operator(mesh, ctx, OperatorKind::V).entries;
    const auto K = assemble_boundary_operator(mesh, ctx, OperatorKind::K).entries;
    const auto Kp = assemble_boundary_operator(mesh, ctx, OperatorKind::Kp).entries;
    const auto T = assemble_boundary_operator(mesh, ctx, OperatorKind::T).entries;
    for (int m : {0, 1, 2, 5, 11}) {
      Eigen::VectorXcd e(n);
      for (int j = 0; j < n; ++j) e[j] = std::exp(kI * double(m) * mesh.params[j]);
      const auto ev = disk_eigenvalues(m, k, r);
      EXPECT_LT((V * e - ev.v * e).norm(), 1e-12 * e.norm());
      EXPECT_LT((K * e - ev.k * e).norm(), 1e-12 * e.norm());
      EXPECT_LT((Kp * e - ev.k * e).norm(), 1e-12 * e.norm());
      EXPECT_LT((T * e - ev.t * e).norm(), 1e-11 * std::max(1.0, std::abs(ev.t)) * e.norm());
    }
  }
}

TEST(BoundaryOps, SymmetryOnKite) {
  const auto mesh = discretize_curve({Kite{}}, 96);
  const auto ctx = WaveContext::from_wavenumber(3.0);
  const auto V = assemble_boundary_operator(mesh, ctx, OperatorKind::V).entries;
  const auto K = assemble_boundary_operator(mesh, ctx, OperatorKind::K).entries;
  const auto Kp = assemble_boundary_operator(mesh, ctx, OperatorKind::Kp).entries;
  const auto T = assemble_boundary_operator(mesh, ctx, OperatorKind::T).entries;
  EXPECT_LT((V - V.transpose()).norm(), 1e-14 * V.norm());
  EXPECT_LT((T - T.transpose()).norm(), 1e-14 * T.norm());
  EXPECT_LT((Kp - K.transpose()).norm(), 1e-14 * K.norm());
}

TEST(BoundaryOps, OperatorMetadata) {
  const auto mesh = discretize_curve({Circle{}}, 16);
  const auto op = assemble_boundary_operator(mesh, WaveContext::from_wavenumber(1.0), OperatorKind::T);
  EXPECT_EQ(op.mesh_id, mesh.id);
  EXPECT_EQ(op.kind, OperatorKind::T);
  EXPECT_EQ(op.row_space, TraceSpace::neumann_data);
}

TEST(BoundaryOps, RejectsCoincidentNodes) {
  auto mesh = discretize_curve({Segment{}}, 8);
  mesh.nodes[3] = mesh.nodes[4];
  EXPECT_THROW(assemble_boundary_operator(mesh, WaveContext::from_wavenumber(1.0), OperatorKind::V), InvalidInput);
}

TEST(BoundaryOps, ConstantDensityFarField) {
  // int_{|y|=R} e^{-ik xhat.y} ds = 2 pi R J_0(kR) for every direction.
  const double r = 1.3;
  const double k = 2.5;
  const auto mesh = discretize_curve({Circle{{0.0, 0.0}, r}}, 64);
  const DirectionGrid dirs(16);
  const auto u = eval_farfield_of_density(mesh, WaveContext::from_wavenumber(k), dirs,
                                          Eigen::VectorXcd::Ones(mesh.size()), Layer::single);
  for (int j = 0; j < dirs.size(); ++j) EXPECT_NEAR(std::abs(u[j] - 2.0 * kPi * r * bessel_j(0, k * r)), 0.0, 1e-13);
}

TEST(BoundaryOps, SolvedDensityReproducesMiePattern) {
  const double r = 1.3;
  const auto ctx = WaveContext::from_wavenumber(2.0);
  const auto mesh = discretize_curve({Circle{{0.0, 0.0}, r}}, 128);
  const DirectionGrid dirs(32);
  const auto V = assemble_boundary_operator(mesh, ctx, OperatorKind::V).entries;
  const Eigen::VectorXcd ui = plane_wave_dirichlet(mesh, ctx, {std::cos(0.4), std::sin(0.4)});
  const Eigen::VectorXcd phi = V.partialPivLu().solve(-to_weighted(mesh, ui));
  const auto pattern = eval_farfield_of_density(mesh, ctx, dirs, from_weighted(mesh, phi), Layer::single);
  const auto exact = disk_dirichlet_pattern(r, ctx, dirs, 0.4);
  EXPECT_LT((pattern - exact).norm(), 1e-12 * exact.norm());
}

TEST(BoundaryOps, TraceMatrixEntries) {
  const auto mesh = discretize_curve({Kite{}}, 32);
  const auto ctx = WaveContext::from_wavenumber(2.0);
  const DirectionGrid dirs(8);
  const auto L = assemble_trace_matrix(mesh, ctx, dirs, TraceKind::neumann, 0.5);
  EXPECT_EQ(L.entries.rows(), 8);
  EXPECT_EQ(L.entries.cols(), 32);
  const int j = 3;
  const Eigen::VectorXcd tr = plane_wave_neumann(mesh, ctx, dirs.directions()[j]);
  for (int m = 0; m < mesh.size(); ++m) {
    const cdouble expect = 0.5 * std::sqrt(dirs.weights()[j] * mesh.weights[m]) * std::conj(tr[m]);
    EXPECT_NEAR(std::abs(L.entries(j, m) - expect), 0.0, 1e-15);
  }
  EXPECT_DOUBLE_EQ(trace_scaling_constant(), 1.0 / (std::sqrt(2.0) * 2.0 * kPi));
}

TEST(BoundaryOps, WeightedRoundTrip) {
  testing::Gen gen(9);
  const auto mesh = discretize_curve({Polygon{{{0, 0}, {2, 0}, {1, 1.5}}}}, 30);
  const Eigen::VectorXcd v = gen.cvector(30);
  EXPECT_LT((from_weighted(mesh, to_weighted(mesh, v)) - v).norm(), 1e-14 * v.norm());
}

TEST(BoundaryOps, PanelSchemeOnFineRegularPolygon) {
  // A 48-gon inscribed in the unit circle scatters almost like the disk.
  std::vector<Vec2> v;
  for (int i = 0; i < 48; ++i) v.emplace_back(std::cos(2 * kPi * i / 48), std::sin(2 * kPi * i / 48));
  const auto ctx = WaveContext::from_wavenumber(2.0);
  const DirectionGrid dirs(32);
  const auto F = far_field_operator(discretize_curve({Polygon{v}}, 384), ctx, {DirichletBC{}}, dirs);
  const auto oracle = disk_dirichlet_oracle(1.0, ctx, dirs);
  EXPECT_LT((F.F - oracle.F).norm() / oracle.F.norm(), 2e-2);
}

}  // namespace
}  // namespace sfm
