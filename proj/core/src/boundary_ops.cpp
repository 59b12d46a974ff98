#include "scatterfm/boundary_ops.hpp"

#include "scatterfm/errors.hpp"
#include "scatterfm/parallel.hpp"
#include "scatterfm/special.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace sfm {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr cdouble kI{0.0, 1.0};

void check_distinct(double r, int i, int j) {
  if (!(r > 0.0)) {
    throw InvalidInput("mesh nodes " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
  }
}

// Kress weights R(t_i - t_j), indexed by (i - j) mod n.
std::vector<double> log_weights(int n) {
  std::vector<double> r(n);
  const int terms = (n - 1) / 2;
  for (int d = 0; d < n; ++d) {
    const double tau = 2.0 * kPi * d / n;
    double s = 0.0;
    for (int m = 1; m <= terms; ++m) s += std::cos(m * tau) / m;
    r[d] = -4.0 * kPi / n * s;
    if (n % 2 == 0) r[d] -= 4.0 * kPi / (static_cast<double>(n) * n) * std::cos(0.5 * n * tau);
  }
  return r;
}

// Trigonometric differentiation matrix on n equispaced nodes.
Eigen::MatrixXd diff_matrix(int n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double h = 2.0 * kPi / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double half = 0.5 * (i - j) * h;
      const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = 0.5 * sign * (n % 2 == 0 ? 1.0 / std::tan(half) : 1.0 / std::sin(half));
    }
  }
  return d;
}

double log_sin_term(double dt) {
  const double s = std::sin(0.5 * dt);
  return std::log(4.0 * s * s);
}

Eigen::MatrixXcd smooth_single_layer(const BoundaryMesh& mesh, double k) {
  const int n = mesh.size();
  const double h = 2.0 * kPi / n;
  const auto rw = log_weights(n);
  Eigen::MatrixXcd v(n, n);
  parallel_for(n, [&](int i) {
    const double spi = mesh.speed[i];
    for (int j = i; j < n; ++j) {
      const double spj = mesh.speed[j];
      const double rw_ij = rw[(i - j + n) % n];
      cdouble m1;
      cdouble m2;
      if (i == j) {
        m1 = -spi / (4.0 * kPi);
        m2 = (0.25 * kI - kEulerGamma / (2.0 * kPi) - std::log(0.5 * k * spi) / (2.0 * kPi)) * spi;
      } else {
        const double r = (mesh.nodes[i] - mesh.nodes[j]).norm();
        check_distinct(r, i, j);
        const double j0 = bessel_j(0, k * r);
        m1 = -j0 * spj / (4.0 * kPi);
        m2 = 0.25 * kI * hankel1(0, k * r) * spj - m1 * log_sin_term(mesh.params[i] - mesh.params[j]);
      }
      // sqrt(w_i / w_j) turns the nodal entry into the weighted one.
      v(i, j) = (rw_ij * m1 + h * m2) * std::sqrt(spi / spj);
    }
  });
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) v(i, j) = v(j, i);
  }
  return v;
}

// Double layer (normal at y) or its adjoint (normal at x).
Eigen::MatrixXcd smooth_double_layer(const BoundaryMesh& mesh, double k, bool adjoint) {
  const int n = mesh.size();
  const double h = 2.0 * kPi / n;
  const auto rw = log_weights(n);
  Eigen::MatrixXcd out(n, n);
  parallel_for(n, [&](int i) {
    const double spi = mesh.speed[i];
    for (int j = 0; j < n; ++j) {
      const double spj = mesh.speed[j];
      cdouble value;
      if (i == j) {
        value = h * mesh.curvature_limit[i] * spi;
      } else {
        const Vec2 diff = mesh.nodes[i] - mesh.nodes[j];
        const double r = diff.norm();
        check_distinct(r, i, j);
        const double proj = adjoint ? -mesh.normals[i].dot(diff) / r : mesh.normals[j].dot(diff) / r;
        const cdouble l = 0.25 * kI * k * hankel1(1, k * r) * proj * spj;
        const double l1 = -k / (4.0 * kPi) * bessel_j(1, k * r) * proj * spj;
        const cdouble l2 = l - l1 * log_sin_term(mesh.params[i] - mesh.params[j]);
        value = rw[(i - j + n) % n] * l1 + h * l2;
      }
      out(i, j) = value * std::sqrt(spi / spj);
    }
  });
  return out;
}

// Maue form: T = d/ds V d/ds + k^2 nu_x . V nu_y.
Eigen::MatrixXcd smooth_hypersingular(const BoundaryMesh& mesh, double k) {
  const int n = mesh.size();
  const Eigen::MatrixXcd v = smooth_single_layer(mesh, k);
  Eigen::MatrixXd e = diff_matrix(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) e(i, j) /= std::sqrt(mesh.speed[i] * mesh.speed[j]);
  }
  const Eigen::MatrixXcd ec = e.cast<cdouble>();
  Eigen::MatrixXcd t = ec * v * ec;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) t(i, j) += k * k * mesh.normals[i].dot(mesh.normals[j]) * v(i, j);
  }
  return 0.5 * (t + t.transpose()).eval();
}

cdouble kernel_single(double k, double r) { return 0.25 * kI * hankel1(0, k * r); }

// grad_x G(x, b) for a point b.
Eigen::Vector2cd grad_single(double k, const Vec2& x, const Vec2& b) {
  const Vec2 diff = x - b;
  const double r = diff.norm();
  if (!(r > 0.0)) throw InvalidInput("collocation node coincides with a panel endpoint");
  const cdouble f = -0.25 * kI * k * hankel1(1, k * r) / r;
  return {f * diff.x(), f * diff.y()};
}

double self_panel_integral_real(double k, double w) {
  return -(std::log(0.25 * k * w) - 1.0 + kEulerGamma) / (2.0 * kPi);
}

Eigen::MatrixXcd panel_single_layer(const BoundaryMesh& mesh, double k) {
  const int n = mesh.size();
  Eigen::MatrixXcd v(n, n);
  parallel_for(n, [&](int i) {
    const double wi = mesh.weights[i];
    for (int j = i; j < n; ++j) {
      if (i == j) {
        v(i, i) = wi * (0.25 * kI + self_panel_integral_real(k, wi));
        continue;
      }
      const double r = (mesh.nodes[i] - mesh.nodes[j]).norm();
      check_distinct(r, i, j);
      v(i, j) = std::sqrt(wi * mesh.weights[j]) * kernel_single(k, r);
    }
  });
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) v(i, j) = v(j, i);
  }
  return v;
}

Eigen::MatrixXcd panel_double_layer(const BoundaryMesh& mesh, double k, bool adjoint) {
  const int n = mesh.size();
  Eigen::MatrixXcd out(n, n);
  parallel_for(n, [&](int i) {
    for (int j = 0; j < n; ++j) {
      const double sw = std::sqrt(mesh.weights[i] * mesh.weights[j]);
      if (i == j) {
        out(i, i) = mesh.curvature_limit[i] * mesh.weights[i];
        continue;
      }
      const Vec2 diff = mesh.nodes[i] - mesh.nodes[j];
      const double r = diff.norm();
      check_distinct(r, i, j);
      const double proj = adjoint ? -mesh.normals[i].dot(diff) / r : mesh.normals[j].dot(diff) / r;
      out(i, j) = sw * 0.25 * kI * k * hankel1(1, k * r) * proj;
    }
  });
  return out;
}

// Collocation of the Maue form with piecewise-constant densities: the
// derivative of a panel indicator is a pair of point masses at its ends.
Eigen::MatrixXcd panel_hypersingular(const BoundaryMesh& mesh, double k) {
  const int n = mesh.size();
  const Eigen::MatrixXcd v = panel_single_layer(mesh, k);
  Eigen::MatrixXcd t(n, n);
  parallel_for(n, [&](int i) {
    const Vec2& x = mesh.nodes[i];
    const Vec2& tau = mesh.tangents[i];
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector2cd g = grad_single(k, x, mesh.panel_start[j]) - grad_single(k, x, mesh.panel_end[j]);
      const cdouble tangential = tau.x() * g.x() + tau.y() * g.y();
      t(i, j) = tangential * std::sqrt(mesh.weights[i] / mesh.weights[j]) +
                k * k * mesh.normals[i].dot(mesh.normals[j]) * v(i, j);
    }
  });
  return t;
}

cdouble plane_wave(double k, const Vec2& xi, const Vec2& y) { return std::exp(kI * (k * xi.dot(y))); }

}  // namespace

WaveContext WaveContext::from_wavenumber(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidInput("wavenumber must be positive and finite");
  return WaveContext(-k * k, k);
}

WaveContext WaveContext::from_lambda(double lambda) {
  if (!(lambda < 0.0) || !std::isfinite(lambda)) throw InvalidInput("spectral parameter must be negative");
  return WaveContext(lambda, std::sqrt(-lambda));
}

DirectionGrid::DirectionGrid(int n_dir) {
  if (n_dir < 2) throw InvalidInput("direction grid needs at least 2 directions");
  for (int j = 0; j < n_dir; ++j) {
    const double a = 2.0 * kPi * j / n_dir;
    angles_.push_back(a);
    directions_.emplace_back(std::cos(a), std::sin(a));
    weights_.push_back(2.0 * kPi / n_dir);
  }
}

int DirectionGrid::antipode(int j) const {
  const int n = size();
  if (n % 2 != 0) throw InvalidInput("antipodal map needs an even direction grid");
  return (j + n / 2) % n;
}

OperatorMatrix assemble_boundary_operator(const BoundaryMesh& mesh, const WaveContext& ctx, OperatorKind kind) {
  const double k = ctx.k();
  const bool smooth = mesh.kind == MeshKind::smooth_periodic;
  OperatorMatrix op;
  op.mesh_id = mesh.id;
  op.kind = kind;
  switch (kind) {
    case OperatorKind::V:
      op.entries = smooth ? smooth_single_layer(mesh, k) : panel_single_layer(mesh, k);
      break;
    case OperatorKind::K:
      op.entries = smooth ? smooth_double_layer(mesh, k, false) : panel_double_layer(mesh, k, false);
      op.col_space = TraceSpace::neumann_data;
      break;
    case OperatorKind::Kp:
      op.entries = smooth ? smooth_double_layer(mesh, k, true) : panel_double_layer(mesh, k, true);
      op.row_space = TraceSpace::neumann_data;
      break;
    case OperatorKind::T:
      op.entries = smooth ? smooth_hypersingular(mesh, k) : panel_hypersingular(mesh, k);
      op.row_space = TraceSpace::neumann_data;
      op.col_space = TraceSpace::neumann_data;
      break;
    case OperatorKind::composite:
      throw InvalidInput("composite operators are built by the model layer");
  }
  return op;
}

double trace_scaling_constant() { return 1.0 / (std::numbers::sqrt2 * 2.0 * kPi); }

TraceMatrix assemble_trace_matrix(const BoundaryMesh& mesh, const WaveContext& ctx, const DirectionGrid& dirs,
                                  TraceKind trace_kind, double scaling) {
  const int nd = dirs.size();
  const int n = mesh.size();
  const double k = ctx.k();
  TraceMatrix tm;
  tm.trace_kind = trace_kind;
  tm.scaling = scaling;
  tm.entries.resize(nd, n);
  for (int j = 0; j < nd; ++j) {
    const Vec2& xi = dirs.directions()[j];
    const double sj = scaling * std::sqrt(dirs.weights()[j]);
    for (int m = 0; m < n; ++m) {
      cdouble u = plane_wave(k, xi, mesh.nodes[m]);
      if (trace_kind == TraceKind::neumann) u *= kI * k * xi.dot(mesh.normals[m]);
      tm.entries(j, m) = sj * std::sqrt(mesh.weights[m]) * std::conj(u);
    }
  }
  return tm;
}

Eigen::VectorXcd eval_farfield_of_density(const BoundaryMesh& mesh, const WaveContext& ctx, const DirectionGrid& dirs,
                                          const Eigen::VectorXcd& density, Layer layer) {
  if (density.size() != mesh.size()) throw InvalidInput("density length must equal the node count");
  const double k = ctx.k();
  Eigen::VectorXcd out(dirs.size());
  for (int j = 0; j < dirs.size(); ++j) {
    const Vec2& xhat = dirs.directions()[j];
    cdouble acc = 0.0;
    for (int m = 0; m < mesh.size(); ++m) {
      cdouble e = std::conj(plane_wave(k, xhat, mesh.nodes[m]));
      if (layer == Layer::double_layer) e *= -kI * k * xhat.dot(mesh.normals[m]);
      acc += mesh.weights[m] * e * density[m];
    }
    out[j] = acc;
  }
  return out;
}

Eigen::VectorXcd to_weighted(const BoundaryMesh& mesh, const Eigen::VectorXcd& nodal) {
  if (nodal.size() != mesh.size()) throw InvalidInput("vector length must equal the node count");
  Eigen::VectorXcd out(nodal.size());
  for (int m = 0; m < mesh.size(); ++m) out[m] = std::sqrt(mesh.weights[m]) * nodal[m];
  return out;
}

Eigen::VectorXcd from_weighted(const BoundaryMesh& mesh, const Eigen::VectorXcd& weighted) {
  if (weighted.size() != mesh.size()) throw InvalidInput("vector length must equal the node count");
  Eigen::VectorXcd out(weighted.size());
  for (int m = 0; m < mesh.size(); ++m) out[m] = weighted[m] / std::sqrt(mesh.weights[m]);
  return out;
}

Eigen::VectorXcd plane_wave_dirichlet(const BoundaryMesh& mesh, const WaveContext& ctx, const Vec2& direction) {
  Eigen::VectorXcd out(mesh.size());
  for (int m = 0; m < mesh.size(); ++m) out[m] = plane_wave(ctx.k(), direction, mesh.nodes[m]);
  return out;
}

Eigen::VectorXcd plane_wave_neumann(const BoundaryMesh& mesh, const WaveContext& ctx, const Vec2& direction) {
  Eigen::VectorXcd out(mesh.size());
  for (int m = 0; m < mesh.size(); ++m) {
    out[m] = kI * ctx.k() * direction.dot(mesh.normals[m]) * plane_wave(ctx.k(), direction, mesh.nodes[m]);
  }
  return out;
}

}  // namespace sfm
