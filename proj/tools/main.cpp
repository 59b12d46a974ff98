#include "sfm_cli/commands.hpp"
#include "sfm_cli/validation.hpp"

#include <scatterfm/errors.hpp>
#include <scatterfm/parallel.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace sfm;
using namespace sfm::cli;

BoundingBox parse_bbox(const std::vector<double>& v) {
  if (v.size() != 4 || !(v[0] < v[1]) || !(v[2] < v[3])) {
    throw ConfigError("--bbox needs xmin,xmax,ymin,ymax with xmin < xmax and ymin < ymax");
  }
  return {v[0], v[1], v[2], v[3]};
}

int run_validate(const std::string& suite_name, double c_scale) {
  const auto suite = parse_suite(suite_name);
  if (!suite) throw ConfigError("unknown suite '" + suite_name + "'");
  ValidationOptions opts;
  opts.c_scale = c_scale;
  int failed = 0;
  for (int id : suite_criteria(*suite)) {
    const CriterionResult r = run_criterion(id, opts);
    std::cout << format_result(r) << std::endl;
    failed += r.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? kExitOk : kExitValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acoustic scattering workbench: far-field synthesis and factorization-method inversion"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads (0 = all cores); never changes results")
      ->check(CLI::NonNegativeNumber);

  ForwardOptions fwd;
  auto* forward = app.add_subcommand("forward", "Synthesize the far-field operator of a scene");
  forward->add_option("--config", fwd.config, "Scene configuration (INI)")->required();
  forward->add_option("--out", fwd.out, "Far-field file to write")->required();
  forward->add_flag("--oracle-disk", fwd.oracle_disk, "Compare against the sound-soft disk series");

  InvertOptions inv;
  std::vector<double> bbox;
  std::string mode = "picard";
  double cutoff = 0.0;
  int inf_dim = 0;
  auto* invert = app.add_subcommand("invert", "Reconstruct from a far-field file");
  invert->add_option("--farfield", inv.farfield, "Far-field file")->required();
  invert->add_option("--bbox", bbox, "Sampling box xmin,xmax,ymin,ymax")->delimiter(',')->expected(4);
  invert->add_option("--nx", inv.nx, "Grid points along x")->check(CLI::PositiveNumber);
  invert->add_option("--ny", inv.ny, "Grid points along y")->check(CLI::PositiveNumber);
  invert->add_option("--mode", mode, "picard | inf | screen")
      ->check(CLI::IsMember({"picard", "inf", "screen"}));
  invert->add_option("--segments", inv.segments, "Probe segment list (screen mode)");
  auto* cutoff_opt = invert->add_option("--cutoff", cutoff, "Relative spectral cutoff");
  auto* m_opt = invert->add_option("--m", inf_dim, "Subspace dimension for the inf mode")->check(CLI::PositiveNumber);
  invert->add_option("--out", inv.out, "Output prefix")->required();

  std::string suite;
  double c_scale = 1.0;
  auto* validate = app.add_subcommand("validate", "Run acceptance criteria");
  validate->add_option("--suite", suite, "disk | kite | screen | all")->required();
  validate->add_option("--c2-scale", c_scale, "Debug: multiply the trace constant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    set_worker_count(threads);
    if (*forward) {
      run_forward(fwd).print(std::cout);
    } else if (*invert) {
      if (!bbox.empty()) inv.bbox = parse_bbox(bbox);
      inv.mode = mode == "inf" ? InvertMode::inf : mode == "screen" ? InvertMode::screen : InvertMode::picard;
      if (*cutoff_opt) inv.cutoff = cutoff;
      if (*m_opt) inv.inf_dimension = inf_dim;
      run_invert(inv).print(std::cout);
    } else if (*validate) {
      return run_validate(suite, c_scale);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NearSingularModel& e) {
    std::cerr << "wavenumber in excluded set: " << e.what() << '\n';
    return kExitExcludedWavenumber;
  } catch (const InvalidFarField& e) {
    std::cerr << "not a far-field operator: " << e.what() << '\n';
    return kExitInvalidData;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid data: " << e.what() << '\n';
    return *forward ? kExitConfig : kExitInvalidData;
  } catch (const EmptySpectrum& e) {
    std::cerr << "invalid data: " << e.what() << '\n';
    return kExitInvalidData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidData;
  }
  return kExitOk;
}
