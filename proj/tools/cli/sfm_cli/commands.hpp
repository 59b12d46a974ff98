#pragma once

#include "sfm_cli/config.hpp"

#include <scatterfm/inversion.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sfm::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitExcludedWavenumber = 2,
  kExitInvalidData = 3,
  kExitValidationFailed = 4,
};

struct RunReport {
  std::uint64_t scene_hash = 0;
  std::vector<std::pair<std::string, double>> timings;  // seconds
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<std::string> files;

  void add(const std::string& key, double value);
  void add(const std::string& key, const std::string& value);
  void print(std::ostream& os) const;
};

struct ForwardOptions {
  std::string config;
  std::string out;
  bool oracle_disk = false;
  double c_scale = 1.0;
};

/// Synthesizes the far-field operator of the scene and writes it to `out`.
RunReport run_forward(const ForwardOptions& opts);

enum class InvertMode { picard, inf, screen };

struct InvertOptions {
  std::string farfield;
  std::optional<BoundingBox> bbox;
  int nx = 41;
  int ny = 41;
  InvertMode mode = InvertMode::picard;
  std::string segments;              // screen mode
  std::optional<double> cutoff;      // relative spectral cutoff
  std::optional<int> inf_dimension;  // inf mode subspace size
  std::string out;                   // output prefix
};

/// picard/inf: <out>.csv, <out>_mask.csv, <out>.pgm.
/// screen: <out>_segments.csv.
RunReport run_invert(const InvertOptions& opts);

/// Binary PGM (P5, maxval 255), pixel = round(255 (W - min) / (max - min)),
/// all zero for a constant field. Row 0 of the image is y = ymin.
void emit_heatmap(const IndicatorField& field, const std::string& path);

/// Probe list: one segment per line, "x0 y0 x1 y1 [n_quad]"; '#' comments.
std::vector<ProbeSegment> read_segments(const std::string& path);

/// Threshold separating high from low segment scores (Otsu on log10).
double segment_threshold(const std::vector<double>& scores);

}  // namespace sfm::cli
