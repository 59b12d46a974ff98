#pragma once

// Scene configuration: an INI file with [scene], [curve], [bc], and optional
// [screen] and [noise] sections.
//
//   [scene]
//   k = 2.0
//   n_nodes = 256
//   n_dir = 64
//
//   [curve]
//   type = circle        ; circle | ellipse | kite | polygon | segment | arc
//   center = 0 0
//   radius = 1
//
//   [bc]
//   family = alpha       ; dirichlet | neumann | alpha | theta | local_b
//   alpha = 2            ; constant, or alpha_file = samples.txt
//
// Lengths are dimensionless and k is in inverse length units. Per-node sample
// files hold n_nodes whitespace-separated numbers and are resolved relative
// to the config file.

#include <scatterfm/scattering.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace sfm::cli {

/// Malformed or inconsistent configuration (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SceneConfig {
  CurveSpec curve;
  BoundaryConditionSpec bc;
  double k = 1.0;
  int n_nodes = 0;
  int n_dir = 0;
  std::optional<std::pair<double, double>> screen;  // parameter interval
  NoiseSpec noise;

  /// FNV-1a over canonical_text().
  std::uint64_t hash() const;
  /// Resolved configuration with every number printed to 17 digits.
  std::string canonical_text() const;
};

SceneConfig load_scene_config(const std::string& path);
/// base_dir resolves sample-file names.
SceneConfig parse_scene_config(const std::string& text, const std::string& base_dir = ".");

/// Mesh for the scene, with the screen mask applied. Open arcs without a
/// [screen] section are screens over their full length.
BoundaryMesh build_mesh(const SceneConfig& config);

}  // namespace sfm::cli
