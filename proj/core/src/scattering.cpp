#include "scatterfm/scattering.hpp"

#include "scatterfm/errors.hpp"
#include "scatterfm/special.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sfm {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr cdouble kI{0.0, 1.0};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1].
double uniform_open(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53; }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InvalidInput("bad scene_hash in far-field header");
  return v;
}

double parse_double(std::string_view tok) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw InvalidInput("malformed number '" + std::string(tok) + "' in far-field file");
  return v;
}

long parse_long(std::string_view tok) {
  long v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw InvalidInput("malformed index '" + std::string(tok) + "' in far-field file");
  return v;
}

}  // namespace

Eigen::MatrixXcd model_trace_matrix(const BoundaryMesh& mesh, const WaveContext& ctx, const DirectionGrid& dirs,
                                    TraceTag tag, double scaling) {
  switch (tag) {
    case TraceTag::D:
      return assemble_trace_matrix(mesh, ctx, dirs, TraceKind::dirichlet, scaling).entries;
    case TraceTag::N:
      return assemble_trace_matrix(mesh, ctx, dirs, TraceKind::neumann, scaling).entries;
    case TraceTag::DN: {
      const int n = mesh.size();
      Eigen::MatrixXcd l(dirs.size(), 2 * n);
      l.leftCols(n) = assemble_trace_matrix(mesh, ctx, dirs, TraceKind::dirichlet, scaling).entries;
      l.rightCols(n) = assemble_trace_matrix(mesh, ctx, dirs, TraceKind::neumann, scaling).entries;
      return l;
    }
  }
  throw InvalidInput("unknown trace tag");
}

FarFieldOperator far_field_operator(const BoundaryMesh& mesh, const WaveContext& ctx, const BoundaryConditionSpec& bc,
                                    const DirectionGrid& dirs, const FarFieldOptions& options) {
  const ModelOperator model = assemble_M(mesh, ctx, bc);
  const LambdaSolver solver(model, options.singular_threshold);
  const Eigen::MatrixXcd l_full =
      model_trace_matrix(mesh, ctx, dirs, model.trace_tag, options.c_scale * trace_scaling_constant());

  // Restrict the trace matrix to the model's unknowns (R*_Sigma on the right).
  const Eigen::MatrixXcd probe = Eigen::MatrixXcd::Identity(model.M.entries.rows(), model.M.entries.rows());
  const Eigen::MatrixXcd ext = solver.extend(probe);
  const Eigen::MatrixXcd l = l_full * ext;

  FarFieldOperator out;
  out.F = -(l * solver.solve(l.adjoint()));
  out.ctx = ctx;
  out.grid = dirs;
  out.family = family_name(bc.family) + (bc.on_screen ? "_screen" : "");
  out.model_condition = solver.condition_number();
  return out;
}

Eigen::MatrixXcd scattering_matrix(const Eigen::MatrixXcd& F) {
  const Eigen::Index n = F.rows();
  return Eigen::MatrixXcd::Identity(n, n) - 2.0 * kPi * kI * F;
}

Eigen::MatrixXcd scattering_matrix(const FarFieldOperator& F) { return scattering_matrix(F.F); }

double unitarity_residual(const Eigen::MatrixXcd& S) {
  const Eigen::Index n = S.rows();
  return (S.adjoint() * S - Eigen::MatrixXcd::Identity(n, n)).norm() / std::sqrt(static_cast<double>(n));
}

double normality_defect(const Eigen::MatrixXcd& F) {
  const double fn = F.norm();
  if (fn == 0.0) return 0.0;
  return (F * F.adjoint() - F.adjoint() * F).norm() / (fn * fn);
}

namespace {

int mie_truncation(double kr) {
  int n = static_cast<int>(std::ceil(kr)) + 1;
  while (std::abs(bessel_j(n, kr)) >= 1e-17) ++n;
  return n;
}

}  // namespace

FarFieldOperator disk_dirichlet_oracle(double R, const WaveContext& ctx, const DirectionGrid& dirs, double c_scale) {
  if (!(R > 0.0)) throw InvalidInput("disk radius must be positive");
  const double kr = ctx.k() * R;
  const int nmax = mie_truncation(kr);
  std::vector<cdouble> a(nmax + 1);
  for (int n = 0; n <= nmax; ++n) a[n] = mie_dirichlet_coefficient(n, kr);

  const int nd = dirs.size();
  const double w = 2.0 * kPi / nd;
  // Kernel (i / 2 pi^2) sum_n a_n e^{in(theta - phi)}, a_{-n} = a_n; its
  // eigenvalue on e^{in theta} is (i / pi) a_n.
  const cdouble pref = w * kI / (2.0 * kPi * kPi) * (c_scale * c_scale);
  std::vector<cdouble> row(nd);
  for (int d = 0; d < nd; ++d) {
    const double dt = dirs.angles()[d];
    cdouble s = a[0];
    for (int n = 1; n <= nmax; ++n) s += 2.0 * a[n] * std::cos(n * dt);
    row[d] = pref * s;
  }
  FarFieldOperator out;
  out.F.resize(nd, nd);
  for (int i = 0; i < nd; ++i) {
    for (int j = 0; j < nd; ++j) out.F(i, j) = row[(i - j + nd) % nd];
  }
  out.ctx = ctx;
  out.grid = dirs;
  out.family = "dirichlet_disk_oracle";
  return out;
}

Eigen::VectorXcd disk_dirichlet_pattern(double R, const WaveContext& ctx, const DirectionGrid& dirs,
                                        double incident_angle) {
  const double kr = ctx.k() * R;
  const int nmax = mie_truncation(kr);
  Eigen::VectorXcd out(dirs.size());
  for (int j = 0; j < dirs.size(); ++j) {
    const double dt = dirs.angles()[j] - incident_angle;
    cdouble s = mie_dirichlet_coefficient(0, kr);
    for (int n = 1; n <= nmax; ++n) s += 2.0 * mie_dirichlet_coefficient(n, kr) * std::cos(n * dt);
    out[j] = -4.0 * kI * s;
  }
  return out;
}

cdouble seeded_complex_gaussian(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(index));
  const double u1 = uniform_open(splitmix64(key));
  const double u2 = uniform_open(splitmix64(key + 1));
  const double r = std::sqrt(-std::log(u1));  // radius for variance 1/2 per component
  return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
}

FarFieldOperator add_noise(const FarFieldOperator& F, const NoiseSpec& spec) {
  if (!(spec.level >= 0.0) || !(spec.level < 1.0)) throw InvalidInput("noise level must lie in [0, 1)");
  FarFieldOperator out = F;
  out.noise = spec;
  if (spec.level == 0.0) return out;
  const Eigen::Index n = F.F.rows();
  const double scale = spec.level * F.F.norm() / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto idx = static_cast<std::uint64_t>(i * n + j);
      out.F(i, j) += scale * seeded_complex_gaussian(spec.seed, idx);
    }
  }
  return out;
}

void write_farfield(const std::string& path, const FarFieldOperator& F) {
  nlohmann::ordered_json header;
  header["d"] = 2;
  header["k"] = F.ctx.k();
  header["n_dir"] = F.n_dir();
  header["weighting"] = "symmetric-sqrt";
  header["family"] = F.family;
  header["scene_hash"] = hex64(F.scene_hash);
  header["noise"] = {{"level", F.noise.level}, {"seed", F.noise.seed}};
  header["tool_version"] = kToolVersion;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << header.dump() << '\n';
  char buf[128];
  for (int i = 0; i < F.n_dir(); ++i) {
    for (int j = 0; j < F.n_dir(); ++j) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", i, j, F.F(i, j).real(), F.F(i, j).imag());
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

FarFieldOperator read_farfield(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open far-field file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("far-field file is empty");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("far-field header is not valid JSON: ") + e.what());
  }
  FarFieldOperator F;
  int n = 0;
  try {
    if (header.at("d").get<int>() != 2) throw InvalidInput("far-field header must have d = 2");
    if (header.at("weighting").get<std::string>() != "symmetric-sqrt")
      throw InvalidInput("unsupported far-field weighting");
    n = header.at("n_dir").get<int>();
    F.ctx = WaveContext::from_wavenumber(header.at("k").get<double>());
    F.family = header.at("family").get<std::string>();
    F.scene_hash = parse_hex64(header.at("scene_hash").get<std::string>());
    F.noise.level = header.at("noise").at("level").get<double>();
    F.noise.seed = header.at("noise").at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("far-field header is incomplete: ") + e.what());
  }
  if (n < 2) throw InvalidInput("far-field header has n_dir < 2");
  F.grid = DirectionGrid(n);
  F.F.resize(n, n);
  for (long e = 0; e < static_cast<long>(n) * n; ++e) {
    if (!std::getline(in, line)) throw InvalidInput("far-field file is truncated");
    std::string_view sv(line);
    std::string_view tok[4];
    for (auto& t : tok) {
      while (!sv.empty() && sv.front() == ' ') sv.remove_prefix(1);
      const auto end = sv.find(' ');
      t = sv.substr(0, end);
      sv.remove_prefix(end == std::string_view::npos ? sv.size() : end);
    }
    const long i = parse_long(tok[0]);
    const long j = parse_long(tok[1]);
    if (i != e / n || j != e % n) throw InvalidInput("far-field entries are not in row-major order");
    F.F(i, j) = cdouble(parse_double(tok[2]), parse_double(tok[3]));
  }
  return F;
}

}  // namespace sfm
