#include "sfm_cli/commands.hpp"

#include <scatterfm/errors.hpp>

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sfm::cli {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

const char* mode_name(InvertMode m) {
  switch (m) {
    case InvertMode::picard:
      return "picard";
    case InvertMode::inf:
      return "inf";
    case InvertMode::screen:
      return "screen";
  }
  return "?";
}

nlohmann::ordered_json output_header(const FarFieldOperator& F, const InvertOptions& opts, double cutoff, int modes) {
  nlohmann::ordered_json h;
  h["scene_hash"] = hex64(F.scene_hash);
  h["k"] = F.ctx.k();
  h["n_dir"] = F.n_dir();
  h["family"] = F.family;
  h["mode"] = mode_name(opts.mode);
  h["cutoff"] = cutoff;
  h["n_modes"] = modes;
  h["tool_version"] = kToolVersion;
  return h;
}

void write_field(const IndicatorField& field, nlohmann::ordered_json header, double threshold, const std::string& prefix,
                 RunReport& report) {
  const auto& g = field.grid;
  header["nx"] = g.nx();
  header["ny"] = g.ny();
  header["bbox"] = {g.bbox().xmin, g.bbox().xmax, g.bbox().ymin, g.bbox().ymax};

  const std::string csv = prefix + ".csv";
  auto out = open_out(csv);
  out << "# " << header.dump() << "\nx,y,W\n";
  for (int p = 0; p < g.size(); ++p) {
    const Vec2& x = g.points()[p];
    out << num(x.x()) << ',' << num(x.y()) << ',' << num(field.values[p]) << '\n';
  }
  close_out(out, csv);

  header["threshold"] = threshold;
  header["threshold_rule"] = "quantile 0.75";
  const auto mask = threshold_mask(field.values, threshold);
  const std::string mask_csv = prefix + "_mask.csv";
  auto mout = open_out(mask_csv);
  mout << "# " << header.dump() << "\nx,y,inside\n";
  for (int p = 0; p < g.size(); ++p) {
    const Vec2& x = g.points()[p];
    mout << num(x.x()) << ',' << num(x.y()) << ',' << (mask[p] ? 1 : 0) << '\n';
  }
  close_out(mout, mask_csv);

  const std::string pgm = prefix + ".pgm";
  emit_heatmap(field, pgm);
  report.files.insert(report.files.end(), {csv, mask_csv, pgm});
  report.add("threshold", threshold);
}

}  // namespace

void RunReport::add(const std::string& key, double value) { values.emplace_back(key, num(value)); }
void RunReport::add(const std::string& key, const std::string& value) { values.emplace_back(key, value); }

void RunReport::print(std::ostream& os) const {
  os << "scene_hash: " << hex64(scene_hash) << '\n';
  for (const auto& [k, v] : values) os << k << ": " << v << '\n';
  for (const auto& [k, t] : timings) os << "time." << k << ": " << t << " s\n";
  for (const auto& f : files) os << "wrote: " << f << '\n';
}

RunReport run_forward(const ForwardOptions& opts) {
  RunReport report;
  const SceneConfig cfg = load_scene_config(opts.config);
  report.scene_hash = cfg.hash();

  auto t0 = Clock::now();
  const BoundaryMesh mesh = build_mesh(cfg);
  const auto ctx = WaveContext::from_wavenumber(cfg.k);
  const DirectionGrid dirs(cfg.n_dir);
  FarFieldOptions ff_opts;
  ff_opts.c_scale = opts.c_scale;
  FarFieldOperator F = far_field_operator(mesh, ctx, cfg.bc, dirs, ff_opts);
  F.scene_hash = report.scene_hash;
  report.timings.emplace_back("far_field", seconds_since(t0));

  report.add("family", F.family);
  report.add("k", cfg.k);
  report.add("n_nodes", cfg.n_nodes);
  report.add("n_dir", cfg.n_dir);
  report.add("model_condition_number", F.model_condition);
  report.add("unitarity_residual", unitarity_residual(scattering_matrix(F)));
  report.add("normality_defect", normality_defect(F.F));

  if (opts.oracle_disk) {
    const auto* circle = std::get_if<Circle>(&cfg.curve.shape);
    if (!circle || circle->center.norm() != 0.0 || !std::holds_alternative<DirichletBC>(cfg.bc.family) ||
        cfg.bc.on_screen) {
      throw ConfigError("--oracle-disk needs a Dirichlet circle centred at the origin");
    }
    const FarFieldOperator oracle = disk_dirichlet_oracle(circle->radius, ctx, dirs);
    report.add("oracle_relative_distance", (F.F - oracle.F).norm() / oracle.F.norm());
  }

  if (cfg.noise.level > 0.0) {
    F = add_noise(F, cfg.noise);
    report.add("noise_level", cfg.noise.level);
    report.add("noisy_normality_defect", normality_defect(F.F));
  } else {
    F.noise = cfg.noise;
  }

  t0 = Clock::now();
  write_farfield(opts.out, F);
  report.timings.emplace_back("write", seconds_since(t0));
  report.files.push_back(opts.out);
  return report;
}

RunReport run_invert(const InvertOptions& opts) {
  RunReport report;
  const FarFieldOperator F = read_farfield(opts.farfield);
  report.scene_hash = F.scene_hash;

  auto t0 = Clock::now();
  const SpectralDecomposition dec = spectral_decompose(F);
  report.timings.emplace_back("decomposition", seconds_since(t0));
  report.add("normality_defect", dec.residual);

  const double cutoff = opts.cutoff.value_or(default_cutoff(F.noise.level));
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw InvalidInput("cutoff must lie in (0, 1)");
  const int modes = retained_modes(dec, cutoff);
  report.add("mode", mode_name(opts.mode));
  report.add("cutoff", cutoff);
  report.add("cutoff_source", opts.cutoff ? "flag" : (F.noise.level > 0.0 ? "10 x noise level" : "noise-free default"));
  report.add("n_modes", modes);
  auto header = output_header(F, opts, cutoff, modes);

  t0 = Clock::now();
  if (opts.mode == InvertMode::screen) {
    if (opts.segments.empty()) throw InvalidInput("screen mode needs --segments");
    const auto segs = read_segments(opts.segments);
    const SegmentLayer layer = segment_layer_for_family(F.family);
    const auto scores = screen_probe(dec, segs, F.ctx, F.grid, cutoff, layer);
    const double thr = segment_threshold(scores);
    header["layer"] = layer == SegmentLayer::single ? "single" : "double";
    header["threshold"] = thr;
    header["threshold_rule"] = "otsu log10";
    const std::string path = opts.out + "_segments.csv";
    auto out = open_out(path);
    out << "# " << header.dump() << "\nx0,y0,x1,y1,W,high\n";
    int high = 0;
    for (std::size_t s = 0; s < segs.size(); ++s) {
      const bool h = scores[s] >= thr;
      high += h;
      out << num(segs[s].start.x()) << ',' << num(segs[s].start.y()) << ',' << num(segs[s].end.x()) << ','
          << num(segs[s].end.y()) << ',' << num(scores[s]) << ',' << (h ? 1 : 0) << '\n';
    }
    close_out(out, path);
    report.timings.emplace_back("probe", seconds_since(t0));
    report.add("segments", static_cast<double>(segs.size()));
    report.add("high_segments", high);
    report.add("threshold", thr);
    report.files.push_back(path);
    return report;
  }

  if (!opts.bbox) throw InvalidInput("--bbox is required for picard and inf modes");
  if (opts.nx < 1 || opts.ny < 1) throw InvalidInput("--nx and --ny must be positive");
  const SamplingGrid grid(*opts.bbox, opts.nx, opts.ny);
  auto scan = [&] {
    if (opts.mode == InvertMode::picard) return scan_grid(dec, grid, F.ctx, F.grid, cutoff);
    const InfCriterion crit(dec, F.F, opts.inf_dimension.value_or(modes));
    header["inf_dimension"] = crit.dimension();
    report.add("inf_dimension", crit.dimension());
    return scan_grid_inf(crit, grid, F.ctx, F.grid);
  };
  const IndicatorField field = scan();
  report.timings.emplace_back("scan", seconds_since(t0));
  write_field(field, header, quantile(field.values, 0.75), opts.out, report);
  return report;
}

void emit_heatmap(const IndicatorField& field, const std::string& path) {
  const int nx = field.grid.nx();
  const int ny = field.grid.ny();
  if (field.values.empty() || static_cast<int>(field.values.size()) != nx * ny)
    throw InvalidInput("heatmap needs a non-empty field matching its grid");
  const auto [mn, mx] = std::minmax_element(field.values.begin(), field.values.end());
  const double lo = *mn;
  const double span = *mx - lo;
  std::string pixels(static_cast<std::size_t>(nx) * ny, '\0');
  if (span > 0.0) {
    for (std::size_t p = 0; p < pixels.size(); ++p) {
      pixels[p] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (field.values[p] - lo) / span)));
    }
  }
  auto out = open_out(path);
  out << "P5\n" << nx << ' ' << ny << "\n255\n";
  out.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
  close_out(out, path);
}

std::vector<ProbeSegment> read_segments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open segment file '" + path + "'");
  std::vector<ProbeSegment> segs;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (const auto c = line.find('#'); c != std::string::npos) line.erase(c);
    std::istringstream ls(line);
    std::vector<double> v;
    for (double x; ls >> x;) v.push_back(x);
    if (!ls.eof()) throw InvalidInput("segment file line " + std::to_string(lineno) + " is not numeric");
    if (v.empty()) continue;
    if (v.size() != 4 && v.size() != 5)
      throw InvalidInput("segment file line " + std::to_string(lineno) + " needs x0 y0 x1 y1 [n_quad]");
    ProbeSegment s{{v[0], v[1]}, {v[2], v[3]}, 32};
    if (v.size() == 5) {
      if (v[4] < 1.0 || v[4] != std::floor(v[4])) throw InvalidInput("n_quad must be a positive integer");
      s.n_quad = static_cast<int>(v[4]);
    }
    if (!(s.length() > 0.0)) throw InvalidInput("segment file line " + std::to_string(lineno) + " has zero length");
    segs.push_back(s);
  }
  if (segs.empty()) throw InvalidInput("segment file '" + path + "' lists no segments");
  return segs;
}

double segment_threshold(const std::vector<double>& scores) { return otsu_log_threshold(scores); }

}  // namespace sfm::cli
