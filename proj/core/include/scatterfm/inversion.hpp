#pragma once

// Factorization-method reconstruction from a far-field operator given on the
// sqrt-weighted direction grid.

#include "scatterfm/scattering.hpp"

#include <vector>

namespace sfm {

/// Eigenvalues sorted by decreasing modulus with orthonormal eigenvectors
/// (columns). Computed by a complex Schur decomposition, so the vectors are
/// exactly orthonormal; for a normal matrix they diagonalize it.
struct SpectralDecomposition {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  double residual = 0.0;  // normality defect of the input

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Throws InvalidFarField if the normality defect exceeds max_defect.
SpectralDecomposition spectral_decompose(const Eigen::MatrixXcd& F, double max_defect = 1e-2);
SpectralDecomposition spectral_decompose(const FarFieldOperator& F, double max_defect = 1e-2);

enum class TestFunctionKind { point, segment };

/// Segment test functions come as the far field of a single layer (density 1
/// on the segment) or of a double layer, which pairs with Neumann-type data.
enum class SegmentLayer { single, double_layer };

struct TestFunction {
  Eigen::VectorXcd values;  // sqrt-weighted
  TestFunctionKind kind = TestFunctionKind::point;
};

/// Far-field pattern of a point source at x: sqrt(w_j) exp(-i k xi_j . x).
TestFunction point_test_function(const Vec2& x, const WaveContext& ctx, const DirectionGrid& dirs);

/// Integral of the point test function along the segment (single), or of its
/// derivative along the segment normal (tau_y, -tau_x) (double). Composite
/// 8-point Gauss-Legendre with ceil(n_quad / 8) panels.
TestFunction segment_test_function(const ProbeSegment& seg, const WaveContext& ctx, const DirectionGrid& dirs,
                                   SegmentLayer layer = SegmentLayer::single);

/// Layer matching the data: double for Neumann-type traces, single otherwise.
SegmentLayer segment_layer_for(TraceTag tag);
SegmentLayer segment_layer_for_family(const std::string& family);

inline constexpr double kIndicatorCap = 1e30;

struct PicardValue {
  double series = 0.0;      // P = sum |<tf, psi_k>|^2 / |z_k|
  double normalized = 0.0;  // P / sum |<tf, psi_k>|^2
  double indicator = 0.0;   // W = 1 / normalized, capped at kIndicatorCap
  int n_modes = 0;
};

/// Keeps modes with |z_k| >= cutoff * |z_1| and z_k != 0. Throws EmptySpectrum
/// if none is kept.
PicardValue picard_series(const SpectralDecomposition& dec, const TestFunction& tf, double cutoff);
double picard_indicator(const SpectralDecomposition& dec, const TestFunction& tf, double cutoff);

/// Number of modes kept by the cutoff.
int retained_modes(const SpectralDecomposition& dec, double cutoff);

/// Section of the inf-criterion on span{psi_1..psi_m}:
/// min <psi, |F| psi> subject to <psi, tf> = 1, with |F| = (F^H F)^{1/2}.
class InfCriterion {
 public:
  InfCriterion(const Eigen::MatrixXcd& F, int m, double max_defect = 1e-2);
  InfCriterion(const SpectralDecomposition& dec, const Eigen::MatrixXcd& F, int m);

  /// Throws EmptySpectrum if tf has no component in the subspace (relative to
  /// its norm, 1e-12).
  double operator()(const TestFunction& tf) const;
  int dimension() const { return static_cast<int>(basis_.cols()); }

 private:
  void init(const SpectralDecomposition& dec, const Eigen::MatrixXcd& F, int m);
  Eigen::MatrixXcd basis_;      // U_m
  Eigen::MatrixXcd eigvecs_;    // eigenvectors of U_m^H |F| U_m
  Eigen::VectorXd eigvals_;
  double null_threshold_ = 0.0;
};

double inf_criterion(const FarFieldOperator& F, const TestFunction& tf, int m);

struct IndicatorField {
  SamplingGrid grid;
  std::vector<double> values;  // row-major, same order as grid.points()
  double cutoff_used = 0.0;
  int n_modes_used = 0;
};

/// Picard indicator at every grid point, parallel over points.
IndicatorField scan_grid(const SpectralDecomposition& dec, const SamplingGrid& grid, const WaveContext& ctx,
                         const DirectionGrid& dirs, double cutoff);

/// inf-criterion at every grid point.
IndicatorField scan_grid_inf(const InfCriterion& crit, const SamplingGrid& grid, const WaveContext& ctx,
                             const DirectionGrid& dirs);

/// Picard indicator per probe segment.
std::vector<double> screen_probe(const SpectralDecomposition& dec, const std::vector<ProbeSegment>& segments,
                                 const WaveContext& ctx, const DirectionGrid& dirs, double cutoff,
                                 SegmentLayer layer = SegmentLayer::single);

/// Default cutoff: 1e-8 noise-free, 10 * noise level otherwise.
double default_cutoff(double noise_level);

/// Linear-interpolation quantile (q in [0, 1]).
double quantile(std::vector<double> values, double q);

/// Otsu threshold of log10(values) over a 256-bin histogram; returned in the
/// original (linear) scale.
double otsu_log_threshold(const std::vector<double>& values);

std::vector<bool> threshold_mask(const std::vector<double>& values, double threshold);

double jaccard(const std::vector<bool>& a, const std::vector<bool>& b);

}  // namespace sfm
