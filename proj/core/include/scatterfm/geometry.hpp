#pragma once

// Boundary curves, their quadrature discretization, and sampling lattices.

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace sfm {

using Vec2 = Eigen::Vector2d;

struct Circle {
  Vec2 center{0.0, 0.0};
  double radius = 1.0;
};

struct Ellipse {
  Vec2 center{0.0, 0.0};
  Vec2 semiaxes{1.0, 1.0};
};

/// x(t) = center + scale * (cos t + 0.65 cos 2t - 0.65, 1.5 sin t)
struct Kite {
  Vec2 center{0.0, 0.0};
  double scale = 1.0;
};

/// Simple closed polygon. Vertices in either orientation; the mesh is always
/// built counter-clockwise.
struct Polygon {
  std::vector<Vec2> vertices;
};

/// Straight open arc.
struct Segment {
  Vec2 start{-1.0, 0.0};
  Vec2 end{1.0, 0.0};
};

/// Open arc of a circle, swept from angle_begin to angle_end (radians).
struct CircularArc {
  Vec2 center{0.0, 0.0};
  double radius = 1.0;
  double angle_begin = 0.0;
  double angle_end = 1.0;
};

using CurveShape = std::variant<Circle, Ellipse, Kite, Polygon, Segment, CircularArc>;

struct CurveSpec {
  CurveShape shape;

  bool is_closed() const;
  /// Smooth closed curves get the spectral periodic discretization.
  bool is_smooth_closed() const;
};

/// Throws InvalidInput if the shape violates its invariants.
void validate(const CurveSpec& spec);

enum class MeshKind {
  /// Uniform parameter grid on a smooth closed curve (trapezoidal weights).
  smooth_periodic,
  /// Graded midpoint panels (open arcs, polygons).
  panels,
};

/// Quadrature discretization of a boundary curve.
///
/// For `smooth_periodic` meshes the nodes sit at t_j = 2*pi*j/n and
/// `speed`/`curvature_limit` feed the logarithmic product quadrature. For
/// `panels` meshes node j is the midpoint of a graded panel with endpoints
/// panel_start[j], panel_end[j].
struct BoundaryMesh {
  MeshKind kind = MeshKind::smooth_periodic;
  bool closed = true;
  std::vector<Vec2> nodes;
  std::vector<Vec2> normals;   // outward (closed) / clockwise-rotated tangent (arcs)
  std::vector<Vec2> tangents;  // unit, along increasing parameter
  std::vector<double> weights;
  std::vector<double> params;
  std::vector<double> speed;            // |x'(t)| (smooth_periodic only)
  std::vector<double> curvature_limit;  // diagonal limit of d/dn_y log-kernel per unit length
  std::vector<Vec2> panel_start;        // panels only
  std::vector<Vec2> panel_end;          // panels only
  std::optional<std::vector<bool>> screen_mask;
  std::uint64_t id = 0;

  int size() const { return static_cast<int>(nodes.size()); }
  double total_length() const;
  /// Indices of nodes flagged by the screen mask, ascending.
  std::vector<int> screen_indices() const;
};

/// Discretizes a curve with n nodes. Closed curves need n >= 8, arcs n >= 4.
/// Smooth closed curves: uniform in parameter. Arcs and polygon edges: nodes
/// graded toward endpoints/corners with exponent 3.
BoundaryMesh discretize_curve(const CurveSpec& spec, int n);

/// Returns a copy of `mesh` whose screen mask marks nodes with parameter in
/// [t_begin, t_end].
BoundaryMesh with_screen(const BoundaryMesh& mesh, double t_begin, double t_end);

/// Returns a copy of `mesh` whose screen mask marks the contiguous node range
/// [first, last].
BoundaryMesh with_screen_range(const BoundaryMesh& mesh, int first, int last);

/// Point evaluation of a closed curve parametrization (used for inside tests).
Vec2 evaluate_curve(const CurveSpec& spec, double t);

/// Dense polyline approximation of the curve (closed curves are not repeated
/// at the end).
std::vector<Vec2> sample_polyline(const CurveSpec& spec, int n);

/// Winding-number test against a closed polyline.
bool inside_polyline(const std::vector<Vec2>& polyline, const Vec2& p);
double distance_to_polyline(const std::vector<Vec2>& polyline, const Vec2& p, bool closed);

struct BoundingBox {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;
};

/// Row-major tensor lattice: point(i, j) = (xmin + j*dx, ymin + i*dy).
class SamplingGrid {
 public:
  SamplingGrid(const BoundingBox& bbox, int nx, int ny);

  const BoundingBox& bbox() const { return bbox_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int size() const { return nx_ * ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  Vec2 point(int i, int j) const;
  const std::vector<Vec2>& points() const { return points_; }

 private:
  BoundingBox bbox_;
  int nx_;
  int ny_;
  double dx_;
  double dy_;
  std::vector<Vec2> points_;
};

inline SamplingGrid build_sampling_grid(const BoundingBox& bbox, int nx, int ny) {
  return SamplingGrid(bbox, nx, ny);
}

/// Straight probe segment for screen reconstruction.
struct ProbeSegment {
  Vec2 start{0.0, 0.0};
  Vec2 end{0.0, 0.0};
  int n_quad = 32;

  double length() const { return (end - start).norm(); }
};

}  // namespace sfm
