#pragma once

// Boundary-condition operators M for each family and their inverses.
// Matrices act on sqrt-weighted densities (see boundary_ops.hpp).

#include "scatterfm/boundary_ops.hpp"

#include <Eigen/LU>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sfm {

struct DirichletBC {};
struct NeumannBC {};

/// delta-type semi-transparent condition, M = -(diag(1/alpha) + V).
struct AlphaBC {
  std::vector<double> alpha;
};

/// delta'-type semi-transparent condition, M = diag(theta) - T.
struct ThetaBC {
  std::vector<double> theta;
};

/// Local two-trace condition with a 2x2 multiplier block,
/// M = -([[b11, b12], [conj(b12), b22]] + [[V, K], [K', T]]).
struct LocalBC {
  std::vector<double> b11;
  std::vector<cdouble> b12;
  std::vector<double> b22;
};

using BoundaryFamily = std::variant<DirichletBC, NeumannBC, AlphaBC, ThetaBC, LocalBC>;

struct BoundaryConditionSpec {
  BoundaryFamily family;
  /// Restrict to the screen mask carried by the mesh.
  bool on_screen = false;
};

/// Robin split of a constant b: b11 = 1/(2b), b12 = 0, b22 = -b/2.
LocalBC robin_split(double b, int n);

std::string family_name(const BoundaryFamily& family);

enum class TraceTag { D, N, DN };

struct ModelOperator {
  OperatorMatrix M;
  TraceTag trace_tag = TraceTag::D;
  int full_size = 0;  // node count of the full curve
  std::optional<std::vector<int>> screen_indices;
};

/// Throws InvalidInput on inconsistent samples (wrong length, alpha with zeros
/// or mixed sign, b11 not strictly negative, screen requested without mask).
void validate(const BoundaryConditionSpec& bc, const BoundaryMesh& mesh);

ModelOperator assemble_M(const BoundaryMesh& mesh, const WaveContext& ctx, const BoundaryConditionSpec& bc);

/// Dense LU of M with a singular-value check.
class LambdaSolver {
 public:
  /// Throws NearSingularModel if sigma_min <= threshold * sigma_max.
  explicit LambdaSolver(const ModelOperator& model, double threshold = 1e-12);

  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const;
  /// Zero-extends a screen-sized result to the full curve (identity otherwise).
  Eigen::MatrixXcd extend(const Eigen::MatrixXcd& screen_values) const;
  double condition_number() const { return condition_number_; }

 private:
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  std::vector<int> full_index_;  // row of M -> row of the full-curve operator
  int full_dim_ = 0;
  double condition_number_ = 0.0;
};

Eigen::VectorXcd apply_lambda(const ModelOperator& model, const Eigen::VectorXcd& rhs, bool zero_extend = false);

struct CoercivityReport {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double im_quadratic_form_min = 0.0;
};

/// Extreme singular values and min |Im <phi, M phi>| over seeded random unit
/// probes.
CoercivityReport coercivity_report(const ModelOperator& model, int n_probes = 64, std::uint64_t seed = 1);

}  // namespace sfm
