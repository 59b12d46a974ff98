#pragma once

// Far-field operator F = -L M^{-1} L^H and scattering matrix S = I - 2 pi i F,
// both on the sqrt-weighted direction grid, plus the disk oracle, seeded
// noise, and the far-field file format.

#include "scatterfm/models.hpp"

#include <cstdint>
#include <string>

namespace sfm {

struct NoiseSpec {
  double level = 0.0;
  std::uint64_t seed = 0;
};

struct FarFieldOperator {
  Eigen::MatrixXcd F;
  WaveContext ctx = WaveContext::from_wavenumber(1.0);
  DirectionGrid grid = DirectionGrid(2);
  std::uint64_t scene_hash = 0;
  std::string family = "unknown";
  NoiseSpec noise;
  double model_condition = 0.0;

  int n_dir() const { return grid.size(); }
};

struct FarFieldOptions {
  /// Multiplies the trace constant; 1 is the physical value. Used to check that
  /// the validation suite detects a wrong normalization.
  double c_scale = 1.0;
  double singular_threshold = 1e-12;
};

/// Trace matrix pairing with the model (L_D, L_N, or [L_D, L_N]).
Eigen::MatrixXcd model_trace_matrix(const BoundaryMesh& mesh, const WaveContext& ctx, const DirectionGrid& dirs,
                                    TraceTag tag, double scaling = trace_scaling_constant());

FarFieldOperator far_field_operator(const BoundaryMesh& mesh, const WaveContext& ctx, const BoundaryConditionSpec& bc,
                                    const DirectionGrid& dirs, const FarFieldOptions& options = {});

Eigen::MatrixXcd scattering_matrix(const FarFieldOperator& F);
Eigen::MatrixXcd scattering_matrix(const Eigen::MatrixXcd& F);

/// ||S^H S - I||_F / sqrt(n).
double unitarity_residual(const Eigen::MatrixXcd& S);
/// ||F F^H - F^H F||_F / ||F||_F^2 (0 for F = 0).
double normality_defect(const Eigen::MatrixXcd& F);

/// Sound-soft disk of radius R centred at the origin, from the series
/// a_n = -J_n(kR) / H_n(kR) truncated once |J_n(kR)| < 1e-17.
FarFieldOperator disk_dirichlet_oracle(double R, const WaveContext& ctx, const DirectionGrid& dirs,
                                       double c_scale = 1.0);

/// Scattered far field of a plane wave with the given incident angle, same
/// normalization as eval_farfield_of_density.
Eigen::VectorXcd disk_dirichlet_pattern(double R, const WaveContext& ctx, const DirectionGrid& dirs,
                                        double incident_angle);

/// F + level * ||F||_F / n * E with E standard complex Gaussian, generated
/// from (seed, entry index) so each entry is independent of evaluation order.
FarFieldOperator add_noise(const FarFieldOperator& F, const NoiseSpec& spec);

/// Standard complex Gaussian sample keyed by (seed, index).
cdouble seeded_complex_gaussian(std::uint64_t seed, std::uint64_t index);

inline constexpr const char* kToolVersion = "0.1.0";

void write_farfield(const std::string& path, const FarFieldOperator& F);
FarFieldOperator read_farfield(const std::string& path);

}  // namespace sfm
