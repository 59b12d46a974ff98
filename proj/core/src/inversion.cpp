#include "scatterfm/inversion.hpp"

#include "scatterfm/errors.hpp"
#include "scatterfm/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sfm {
namespace {

constexpr cdouble kI{0.0, 1.0};

// 8-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::array<double, 8> x;
  std::array<double, 8> w;
};

const GaussRule& gauss8() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, 8>;
    GaussRule r{};
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (int i = 0; i < 4; ++i) {
      r.x[3 - i] = -a[i];
      r.w[3 - i] = w[i];
      r.x[4 + i] = a[i];
      r.w[4 + i] = w[i];
    }
    return r;
  }();
  return rule;
}

double max_abs_eigenvalue(const SpectralDecomposition& dec) {
  return dec.size() > 0 ? std::abs(dec.eigenvalues[0]) : 0.0;
}

bool keep_mode(const SpectralDecomposition& dec, int k, double cutoff) {
  const double a = std::abs(dec.eigenvalues[k]);
  return a > 0.0 && a >= cutoff * max_abs_eigenvalue(dec);
}

void check_cutoff(double cutoff) {
  if (!(cutoff >= 0.0 && cutoff < 1.0)) throw InvalidInput("cutoff must lie in [0, 1)");
}

}  // namespace

SpectralDecomposition spectral_decompose(const Eigen::MatrixXcd& F, double max_defect) {
  if (F.rows() != F.cols() || F.rows() == 0) throw InvalidInput("far-field matrix must be square and non-empty");
  SpectralDecomposition dec;
  dec.residual = normality_defect(F);
  if (!(dec.residual <= max_defect)) {
    std::ostringstream os;
    os << "data is not a valid far-field operator: normality defect " << dec.residual << " exceeds " << max_defect;
    throw InvalidFarField(dec.residual, os.str());
  }
  const Eigen::ComplexSchur<Eigen::MatrixXcd> schur(F);
  const Eigen::MatrixXcd& t = schur.matrixT();
  const Eigen::MatrixXcd& u = schur.matrixU();
  const int n = static_cast<int>(F.rows());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(t(a, a)) > std::abs(t(b, b)); });
  dec.eigenvalues.resize(n);
  dec.eigenvectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    dec.eigenvalues[k] = t(order[k], order[k]);
    dec.eigenvectors.col(k) = u.col(order[k]);
  }
  return dec;
}

SpectralDecomposition spectral_decompose(const FarFieldOperator& F, double max_defect) {
  return spectral_decompose(F.F, max_defect);
}

TestFunction point_test_function(const Vec2& x, const WaveContext& ctx, const DirectionGrid& dirs) {
  TestFunction tf;
  tf.kind = TestFunctionKind::point;
  tf.values.resize(dirs.size());
  for (int j = 0; j < dirs.size(); ++j) {
    tf.values[j] = std::sqrt(dirs.weights()[j]) * std::exp(-kI * (ctx.k() * dirs.directions()[j].dot(x)));
  }
  return tf;
}

TestFunction segment_test_function(const ProbeSegment& seg, const WaveContext& ctx, const DirectionGrid& dirs,
                                   SegmentLayer layer) {
  if (seg.n_quad < 1) throw InvalidInput("probe segment needs n_quad >= 1");
  TestFunction tf;
  tf.kind = TestFunctionKind::segment;
  tf.values = Eigen::VectorXcd::Zero(dirs.size());
  const double len = seg.length();
  if (len == 0.0) return tf;
  const int panels = (seg.n_quad + 7) / 8;
  const GaussRule& g = gauss8();
  const Vec2 d = seg.end - seg.start;
  const double half = 0.5 / panels;  // half panel width in the unit parameter
  const Vec2 normal = Vec2(d.y(), -d.x()) / len;
  for (int j = 0; j < dirs.size(); ++j) {
    const double kxi = ctx.k() * dirs.directions()[j].dot(d);
    const double k0 = ctx.k() * dirs.directions()[j].dot(seg.start);
    cdouble acc = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = (p + 0.5) / panels;
      for (int q = 0; q < 8; ++q) {
        const double s = mid + half * g.x[q];
        acc += g.w[q] * half * std::exp(-kI * (k0 + kxi * s));
      }
    }
    if (layer == SegmentLayer::double_layer) acc *= -kI * ctx.k() * dirs.directions()[j].dot(normal);
    tf.values[j] = std::sqrt(dirs.weights()[j]) * len * acc;
  }
  return tf;
}

SegmentLayer segment_layer_for(TraceTag tag) {
  return tag == TraceTag::N ? SegmentLayer::double_layer : SegmentLayer::single;
}

SegmentLayer segment_layer_for_family(const std::string& family) {
  const bool neumann_type = family.rfind("neumann", 0) == 0 || family.rfind("theta", 0) == 0;
  return neumann_type ? SegmentLayer::double_layer : SegmentLayer::single;
}

int retained_modes(const SpectralDecomposition& dec, double cutoff) {
  check_cutoff(cutoff);
  int count = 0;
  for (int k = 0; k < dec.size(); ++k) count += keep_mode(dec, k, cutoff) ? 1 : 0;
  return count;
}

PicardValue picard_series(const SpectralDecomposition& dec, const TestFunction& tf, double cutoff) {
  check_cutoff(cutoff);
  if (tf.values.size() != dec.eigenvectors.rows()) throw InvalidInput("test function size does not match the data");
  PicardValue out;
  double mass = 0.0;
  for (int k = 0; k < dec.size(); ++k) {
    if (!keep_mode(dec, k, cutoff)) continue;
    const double c = std::norm(dec.eigenvectors.col(k).dot(tf.values));
    out.series += c / std::abs(dec.eigenvalues[k]);
    mass += c;
    ++out.n_modes;
  }
  if (out.n_modes == 0) throw EmptySpectrum("empty spectrum after cutoff");
  out.normalized = mass > 0.0 ? out.series / mass : 0.0;
  out.indicator = out.normalized > 0.0 ? std::min(1.0 / out.normalized, kIndicatorCap) : kIndicatorCap;
  return out;
}

double picard_indicator(const SpectralDecomposition& dec, const TestFunction& tf, double cutoff) {
  return picard_series(dec, tf, cutoff).indicator;
}

InfCriterion::InfCriterion(const Eigen::MatrixXcd& F, int m, double max_defect) {
  init(spectral_decompose(F, max_defect), F, m);
}

InfCriterion::InfCriterion(const SpectralDecomposition& dec, const Eigen::MatrixXcd& F, int m) { init(dec, F, m); }

void InfCriterion::init(const SpectralDecomposition& dec, const Eigen::MatrixXcd& F, int m) {
  if (m < 1 || m > dec.size()) throw InvalidInput("inf-criterion subspace dimension must lie in [1, n_dir]");
  // |F| = (F^H F)^{1/2}
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(F.adjoint() * F);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXcd abs_f = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
  basis_ = dec.eigenvectors.leftCols(m);
  Eigen::MatrixXcd section = basis_.adjoint() * abs_f * basis_;
  section = 0.5 * (section + section.adjoint()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ps(section);
  eigvals_ = ps.eigenvalues();
  eigvecs_ = ps.eigenvectors();
  null_threshold_ = 1e-12 * std::max(eigvals_.cwiseAbs().maxCoeff(), 0.0);
}

double InfCriterion::operator()(const TestFunction& tf) const {
  if (tf.values.size() != basis_.rows()) throw InvalidInput("test function size does not match the data");
  const Eigen::VectorXcd b = eigvecs_.adjoint() * (basis_.adjoint() * tf.values);
  const double bnorm2 = b.squaredNorm();
  if (!(bnorm2 > 1e-24 * tf.values.squaredNorm())) throw EmptySpectrum("test function has no component in the inf-criterion subspace");
  double denom = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    const double c = std::norm(b[i]);
    if (eigvals_[i] <= null_threshold_) {
      // A constraint direction along which the form vanishes drives the inf to 0.
      if (c > 1e-24 * bnorm2) return 0.0;
      continue;
    }
    denom += c / eigvals_[i];
  }
  if (!(denom > 0.0)) throw EmptySpectrum("test function has no component in the inf-criterion subspace");
  return 1.0 / denom;
}

double inf_criterion(const FarFieldOperator& F, const TestFunction& tf, int m) { return InfCriterion(F.F, m)(tf); }

IndicatorField scan_grid(const SpectralDecomposition& dec, const SamplingGrid& grid, const WaveContext& ctx,
                         const DirectionGrid& dirs, double cutoff) {
  const int kept = retained_modes(dec, cutoff);
  if (kept == 0) throw EmptySpectrum("empty spectrum after cutoff");
  IndicatorField field{grid, std::vector<double>(grid.size()), cutoff, kept};
  const auto& pts = grid.points();
  parallel_for(grid.size(), [&](int i) {
    field.values[i] = picard_indicator(dec, point_test_function(pts[i], ctx, dirs), cutoff);
  });
  return field;
}

IndicatorField scan_grid_inf(const InfCriterion& crit, const SamplingGrid& grid, const WaveContext& ctx,
                             const DirectionGrid& dirs) {
  IndicatorField field{grid, std::vector<double>(grid.size()), 0.0, crit.dimension()};
  const auto& pts = grid.points();
  parallel_for(grid.size(), [&](int i) { field.values[i] = crit(point_test_function(pts[i], ctx, dirs)); });
  return field;
}

std::vector<double> screen_probe(const SpectralDecomposition& dec, const std::vector<ProbeSegment>& segments,
                                 const WaveContext& ctx, const DirectionGrid& dirs, double cutoff,
                                 SegmentLayer layer) {
  std::vector<double> out(segments.size());
  if (segments.empty()) return out;
  if (retained_modes(dec, cutoff) == 0) throw EmptySpectrum("empty spectrum after cutoff");
  parallel_for(static_cast<int>(segments.size()), [&](int i) {
    out[i] = picard_indicator(dec, segment_test_function(segments[i], ctx, dirs, layer), cutoff);
  });
  return out;
}

double default_cutoff(double noise_level) { return noise_level > 0.0 ? 10.0 * noise_level : 1e-8; }

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidInput("quantile of an empty list");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidInput("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double otsu_log_threshold(const std::vector<double>& values) {
  if (values.empty()) throw InvalidInput("threshold of an empty list");
  std::vector<double> logs;
  logs.reserve(values.size());
  for (double v : values) logs.push_back(std::log10(std::max(v, 1e-300)));
  const auto [mn_it, mx_it] = std::minmax_element(logs.begin(), logs.end());
  const double lo = *mn_it;
  const double hi = *mx_it;
  if (!(hi > lo)) return std::pow(10.0, lo);
  constexpr int kBins = 256;
  std::array<double, kBins> hist{};
  for (double v : logs) {
    const int b = std::min(kBins - 1, static_cast<int>((v - lo) / (hi - lo) * kBins));
    hist[b] += 1.0;
  }
  const double total = static_cast<double>(logs.size());
  double sum_all = 0.0;
  for (int b = 0; b < kBins; ++b) sum_all += b * hist[b];
  double w0 = 0.0;
  double sum0 = 0.0;
  double best = -1.0;
  int best_bin = 0;
  for (int b = 0; b < kBins - 1; ++b) {
    w0 += hist[b];
    sum0 += b * hist[b];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_bin = b;
    }
  }
  return std::pow(10.0, lo + (hi - lo) * (best_bin + 1) / kBins);
}

std::vector<bool> threshold_mask(const std::vector<double>& values, double threshold) {
  std::vector<bool> mask(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) mask[i] = values[i] >= threshold;
  return mask;
}

double jaccard(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw InvalidInput("masks differ in size");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] && b[i]) ? 1 : 0;
    uni += (a[i] || b[i]) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace sfm
