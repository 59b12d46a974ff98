#pragma once

// Nystrom matrices of the layer operators with the outgoing Helmholtz kernel
// G(x, y) = (i/4) H_0^(1)(k|x - y|), and plane-wave trace matrices.
//
// Boundary densities are stored in the sqrt-weighted representation
// phi_w[m] = sqrt(w_m) * phi(y_m). In that representation V and T are
// symmetric, K' is the transpose of K, and the weighted L2 pairing on the
// curve is the plain Euclidean one. to_weighted/from_weighted convert.

#include "scatterfm/geometry.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace sfm {

using cdouble = std::complex<double>;

/// Spectral parameter lambda < 0 and wavenumber k = sqrt(-lambda).
class WaveContext {
 public:
  static WaveContext from_wavenumber(double k);
  static WaveContext from_lambda(double lambda);

  double lambda() const { return lambda_; }
  double k() const { return k_; }

 private:
  WaveContext(double lambda, double k) : lambda_(lambda), k_(k) {}
  double lambda_;
  double k_;
};

/// Equispaced directions on the unit circle with trapezoidal weights.
class DirectionGrid {
 public:
  explicit DirectionGrid(int n_dir);

  int size() const { return static_cast<int>(angles_.size()); }
  const std::vector<double>& angles() const { return angles_; }
  const std::vector<Vec2>& directions() const { return directions_; }
  const std::vector<double>& weights() const { return weights_; }
  /// Index of -xi_j (requires an even grid).
  int antipode(int j) const;

 private:
  std::vector<double> angles_;
  std::vector<Vec2> directions_;
  std::vector<double> weights_;
};

enum class OperatorKind { V, K, Kp, T, composite };
enum class TraceSpace { dirichlet_data, neumann_data };

struct OperatorMatrix {
  Eigen::MatrixXcd entries;
  TraceSpace row_space = TraceSpace::dirichlet_data;
  TraceSpace col_space = TraceSpace::dirichlet_data;
  std::uint64_t mesh_id = 0;
  OperatorKind kind = OperatorKind::composite;
};

/// V = gamma_0 SL, K = gamma_0 DL, Kp = gamma_1 SL, T = gamma_1 DL, all with
/// averaged traces (no jump terms). Throws InvalidInput on coincident nodes.
OperatorMatrix assemble_boundary_operator(const BoundaryMesh& mesh, const WaveContext& ctx, OperatorKind kind);

enum class TraceKind { dirichlet, neumann };

/// Row j realizes phi -> c * <tau(u^{xi_j}), phi>, conjugate-linear in the
/// plane wave: entries = scaling * sqrt(w_dir_j) * sqrt(w_m) * conj(trace).
struct TraceMatrix {
  Eigen::MatrixXcd entries;
  TraceKind trace_kind = TraceKind::dirichlet;
  double scaling = 0.0;
};

/// 2D counterpart of the constant in the trace functional: 2^{-1/2} / (2 pi).
double trace_scaling_constant();

TraceMatrix assemble_trace_matrix(const BoundaryMesh& mesh, const WaveContext& ctx, const DirectionGrid& dirs,
                                  TraceKind trace_kind, double scaling = trace_scaling_constant());

enum class Layer { single, double_layer };

/// Far-field pattern u_inf(xhat) = int exp(-i k xhat.y) phi(y) ds (single) or
/// the normal derivative in y (double), so that the potential behaves like
/// e^{i pi/4} e^{ikr} / sqrt(8 pi k r) * u_inf. `density` holds nodal values.
Eigen::VectorXcd eval_farfield_of_density(const BoundaryMesh& mesh, const WaveContext& ctx, const DirectionGrid& dirs,
                                          const Eigen::VectorXcd& density, Layer layer);

Eigen::VectorXcd to_weighted(const BoundaryMesh& mesh, const Eigen::VectorXcd& nodal);
Eigen::VectorXcd from_weighted(const BoundaryMesh& mesh, const Eigen::VectorXcd& weighted);

/// Plane wave traces at the nodes (nodal values, no weighting).
Eigen::VectorXcd plane_wave_dirichlet(const BoundaryMesh& mesh, const WaveContext& ctx, const Vec2& direction);
Eigen::VectorXcd plane_wave_neumann(const BoundaryMesh& mesh, const WaveContext& ctx, const Vec2& direction);

}  // namespace sfm
