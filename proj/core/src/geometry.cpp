#include "scatterfm/geometry.hpp"

#include "scatterfm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <numeric>
#include <string>

namespace sfm {
namespace {

constexpr double kPi = std::numbers::pi;

// Parametrization value and first two derivatives.
struct CurvePoint {
  Vec2 x;
  Vec2 dx;
  Vec2 ddx;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

CurvePoint eval_smooth(const CurveShape& shape, double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  return std::visit(
      Overloaded{
          [&](const Circle& k) {
            const double r = k.radius;
            return CurvePoint{k.center + Vec2(r * c, r * s), Vec2(-r * s, r * c), Vec2(-r * c, -r * s)};
          },
          [&](const Ellipse& e) {
            const double a = e.semiaxes.x();
            const double b = e.semiaxes.y();
            return CurvePoint{e.center + Vec2(a * c, b * s), Vec2(-a * s, b * c), Vec2(-a * c, -b * s)};
          },
          [&](const Kite& k) {
            const double c2 = std::cos(2.0 * t);
            const double s2 = std::sin(2.0 * t);
            const double f = k.scale;
            return CurvePoint{k.center + f * Vec2(c + 0.65 * c2 - 0.65, 1.5 * s),
                              f * Vec2(-s - 1.3 * s2, 1.5 * c), f * Vec2(-c - 2.6 * c2, -1.5 * s)};
          },
          [](const auto&) -> CurvePoint { throw InvalidInput("not a smooth closed curve"); },
      },
      shape);
}

// Open arcs parametrized over t in [0, 1].
CurvePoint eval_arc(const CurveShape& shape, double t) {
  return std::visit(
      Overloaded{
          [&](const Segment& seg) {
            const Vec2 d = seg.end - seg.start;
            return CurvePoint{seg.start + t * d, d, Vec2::Zero()};
          },
          [&](const CircularArc& arc) {
            const double sweep = arc.angle_end - arc.angle_begin;
            const double th = arc.angle_begin + t * sweep;
            const double r = arc.radius;
            const double c = std::cos(th);
            const double s = std::sin(th);
            return CurvePoint{arc.center + Vec2(r * c, r * s), r * sweep * Vec2(-s, c),
                              r * sweep * sweep * Vec2(-c, -s)};
          },
          [](const auto&) -> CurvePoint { throw InvalidInput("not an open arc"); },
      },
      shape);
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Diagonal limit of (1/2pi) n_y.(x - y)/|x - y|^2 along the curve.
double curvature_limit(const CurvePoint& p) {
  const double sp = p.dx.norm();
  return (p.dx.y() * p.ddx.x() - p.dx.x() * p.ddx.y()) / (4.0 * kPi * sp * sp * sp);
}

double signed_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({(b - a).squaredNorm(), (c - a).squaredNorm(), 1e-300});
  if (std::abs(v) <= 1e-14 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

void validate_polygon(const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t p = v.size();
  if (p < 3) throw InvalidInput("polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < p; ++i) {
    if ((v[(i + 1) % p] - v[i]).norm() == 0.0) throw InvalidInput("polygon has repeated vertices");
  }
  if (std::abs(signed_area(v)) <= 0.0) throw InvalidInput("polygon encloses zero area");
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == p - 1);
      const Vec2& a1 = v[i];
      const Vec2& a2 = v[(i + 1) % p];
      const Vec2& b1 = v[j];
      const Vec2& b2 = v[(j + 1) % p];
      if (adjacent) {
        // Adjacent edges share exactly one vertex; folding back onto each other
        // is a self-intersection.
        const Vec2& shared = (j == i + 1) ? a2 : a1;
        const Vec2& other_a = (j == i + 1) ? a1 : a2;
        const Vec2& other_b = (j == i + 1) ? b2 : b1;
        if (orientation(other_a, shared, other_b) == 0 &&
            (other_a - shared).dot(other_b - shared) > 0.0) {
          throw InvalidInput("polygon is self-intersecting");
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) throw InvalidInput("polygon is self-intersecting");
    }
  }
}

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t mesh_hash(const BoundaryMesh& m) {
  std::uint64_t h = 14695981039346656037ULL;
  const int kind = static_cast<int>(m.kind);
  h = fnv1a(&kind, sizeof kind, h);
  for (const Vec2& x : m.nodes) h = fnv1a(x.data(), 2 * sizeof(double), h);
  for (double w : m.weights) h = fnv1a(&w, sizeof w, h);
  return h;
}

double grade(double s) {
  const double a = s * s * s;
  const double b = (1.0 - s) * (1.0 - s) * (1.0 - s);
  return a / (a + b);
}

double grade_derivative(double s) {
  const double a = s * s * s;
  const double b = (1.0 - s) * (1.0 - s) * (1.0 - s);
  const double d = a + b;
  return 3.0 * s * s * (1.0 - s) * (1.0 - s) / (d * d);
}

// Appends n graded midpoint panels of the arc `eval` over t in [0, 1]; the
// stored parameter is offset + scale * t.
template <class Eval>
void append_graded_panels(BoundaryMesh& mesh, const Eval& eval, int n, double offset, double scale) {
  for (int j = 0; j < n; ++j) {
    const double s = (j + 0.5) / n;
    const double t = grade(s);
    const CurvePoint p = eval(t);
    const double sp = p.dx.norm();
    const Vec2 tau = p.dx / sp;
    mesh.nodes.push_back(p.x);
    mesh.tangents.push_back(tau);
    mesh.normals.emplace_back(tau.y(), -tau.x());
    // Panel curves have constant parametric speed, so this is the panel length.
    mesh.weights.push_back(sp * (grade(static_cast<double>(j + 1) / n) - grade(static_cast<double>(j) / n)));
    mesh.params.push_back(offset + scale * t);
    mesh.curvature_limit.push_back(curvature_limit(p));
    mesh.panel_start.push_back(eval(grade(static_cast<double>(j) / n)).x);
    mesh.panel_end.push_back(eval(grade(static_cast<double>(j + 1) / n)).x);
  }
}

BoundaryMesh discretize_smooth(const CurveSpec& spec, int n) {
  BoundaryMesh mesh;
  mesh.kind = MeshKind::smooth_periodic;
  mesh.closed = true;
  const double h = 2.0 * kPi / n;
  for (int j = 0; j < n; ++j) {
    const double t = h * j;
    const CurvePoint p = eval_smooth(spec.shape, t);
    const double sp = p.dx.norm();
    const Vec2 tau = p.dx / sp;
    mesh.nodes.push_back(p.x);
    mesh.tangents.push_back(tau);
    mesh.normals.emplace_back(tau.y(), -tau.x());
    mesh.weights.push_back(h * sp);
    mesh.params.push_back(t);
    mesh.speed.push_back(sp);
    mesh.curvature_limit.push_back(curvature_limit(p));
  }
  return mesh;
}

BoundaryMesh discretize_polygon(const Polygon& poly, int n) {
  std::vector<Vec2> v = poly.vertices;
  if (signed_area(v) < 0.0) std::reverse(v.begin(), v.end());
  const int p = static_cast<int>(v.size());
  if (n < 2 * p) throw InvalidInput("polygon needs at least 2 nodes per edge");

  std::vector<double> len(p);
  for (int e = 0; e < p; ++e) len[e] = (v[(e + 1) % p] - v[e]).norm();
  const double perimeter = std::accumulate(len.begin(), len.end(), 0.0);

  // Proportional allocation with a floor of 2 per edge; leftovers go to the
  // edges with the largest remainders (ties broken by edge index).
  std::vector<int> count(p);
  std::vector<double> remainder(p);
  int used = 0;
  for (int e = 0; e < p; ++e) {
    const double exact = n * len[e] / perimeter;
    count[e] = std::max(2, static_cast<int>(std::floor(exact)));
    remainder[e] = exact - std::floor(exact);
    used += count[e];
  }
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (int i = 0; used < n; i = (i + 1) % p, ++used) ++count[order[i]];
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return count[a] > count[b]; });
  for (int i = 0; used > n; i = (i + 1) % p) {
    if (count[order[i]] > 2) {
      --count[order[i]];
      --used;
    }
  }

  BoundaryMesh mesh;
  mesh.kind = MeshKind::panels;
  mesh.closed = true;
  for (int e = 0; e < p; ++e) {
    const Vec2 a = v[e];
    const Vec2 b = v[(e + 1) % p];
    auto eval = [&](double t) { return CurvePoint{a + t * (b - a), b - a, Vec2::Zero()}; };
    append_graded_panels(mesh, eval, count[e], static_cast<double>(e) / p, 1.0 / p);
  }
  return mesh;
}

}  // namespace

bool CurveSpec::is_closed() const {
  return !std::holds_alternative<Segment>(shape) && !std::holds_alternative<CircularArc>(shape);
}

bool CurveSpec::is_smooth_closed() const {
  return std::holds_alternative<Circle>(shape) || std::holds_alternative<Ellipse>(shape) ||
         std::holds_alternative<Kite>(shape);
}

void validate(const CurveSpec& spec) {
  std::visit(Overloaded{
                 [](const Circle& c) {
                   if (!(c.radius > 0.0)) throw InvalidInput("circle radius must be positive");
                 },
                 [](const Ellipse& e) {
                   if (!(e.semiaxes.x() > 0.0 && e.semiaxes.y() > 0.0))
                     throw InvalidInput("ellipse semiaxes must be positive");
                 },
                 [](const Kite& k) {
                   if (!(k.scale > 0.0)) throw InvalidInput("kite scale must be positive");
                 },
                 [](const Polygon& p) { validate_polygon(p); },
                 [](const Segment& s) {
                   if ((s.end - s.start).norm() == 0.0) throw InvalidInput("arc endpoints must be distinct");
                 },
                 [](const CircularArc& a) {
                   const double sweep = std::abs(a.angle_end - a.angle_begin);
                   if (!(a.radius > 0.0)) throw InvalidInput("arc radius must be positive");
                   if (!(sweep > 0.0 && sweep < 2.0 * kPi))
                     throw InvalidInput("arc sweep must lie in (0, 2*pi) so that endpoints are distinct");
                 },
             },
             spec.shape);
}

double BoundaryMesh::total_length() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

std::vector<int> BoundaryMesh::screen_indices() const {
  std::vector<int> idx;
  if (!screen_mask) return idx;
  for (int i = 0; i < size(); ++i) {
    if ((*screen_mask)[i]) idx.push_back(i);
  }
  return idx;
}

BoundaryMesh discretize_curve(const CurveSpec& spec, int n) {
  validate(spec);
  BoundaryMesh mesh;
  if (spec.is_closed()) {
    if (n < 8) throw InvalidInput("closed curves need at least 8 nodes, got " + std::to_string(n));
    if (spec.is_smooth_closed()) {
      mesh = discretize_smooth(spec, n);
    } else {
      mesh = discretize_polygon(std::get<Polygon>(spec.shape), n);
    }
  } else {
    if (n < 4) throw InvalidInput("arcs need at least 4 nodes, got " + std::to_string(n));
    mesh.kind = MeshKind::panels;
    mesh.closed = false;
    append_graded_panels(mesh, [&](double t) { return eval_arc(spec.shape, t); }, n, 0.0, 1.0);
  }
  mesh.id = mesh_hash(mesh);
  return mesh;
}

BoundaryMesh with_screen(const BoundaryMesh& mesh, double t_begin, double t_end) {
  if (!(t_begin <= t_end)) throw InvalidInput("screen interval must satisfy t_begin <= t_end");
  BoundaryMesh out = mesh;
  std::vector<bool> mask(mesh.size());
  bool any = false;
  for (int i = 0; i < mesh.size(); ++i) {
    mask[i] = mesh.params[i] >= t_begin && mesh.params[i] <= t_end;
    any = any || mask[i];
  }
  if (!any) throw InvalidInput("screen interval contains no nodes");
  out.screen_mask = std::move(mask);
  return out;
}

BoundaryMesh with_screen_range(const BoundaryMesh& mesh, int first, int last) {
  if (first < 0 || last >= mesh.size() || first > last) throw InvalidInput("screen node range out of bounds");
  BoundaryMesh out = mesh;
  std::vector<bool> mask(mesh.size(), false);
  for (int i = first; i <= last; ++i) mask[i] = true;
  out.screen_mask = std::move(mask);
  return out;
}

Vec2 evaluate_curve(const CurveSpec& spec, double t) {
  if (spec.is_smooth_closed()) return eval_smooth(spec.shape, t).x;
  if (!spec.is_closed()) return eval_arc(spec.shape, t).x;
  std::vector<Vec2> v = std::get<Polygon>(spec.shape).vertices;
  if (signed_area(v) < 0.0) std::reverse(v.begin(), v.end());
  const int p = static_cast<int>(v.size());
  const double u = (t - std::floor(t)) * p;
  const int e = std::min(static_cast<int>(u), p - 1);
  const double local = u - e;
  return v[e] + local * (v[(e + 1) % p] - v[e]);
}

std::vector<Vec2> sample_polyline(const CurveSpec& spec, int n) {
  std::vector<Vec2> pts;
  if (spec.is_smooth_closed()) {
    for (int j = 0; j < n; ++j) pts.push_back(evaluate_curve(spec, 2.0 * kPi * j / n));
  } else if (spec.is_closed()) {
    for (int j = 0; j < n; ++j) pts.push_back(evaluate_curve(spec, static_cast<double>(j) / n));
  } else {
    for (int j = 0; j <= n; ++j) pts.push_back(evaluate_curve(spec, static_cast<double>(j) / n));
  }
  return pts;
}

bool inside_polyline(const std::vector<Vec2>& poly, const Vec2& p) {
  int winding = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && cross(b - a, p - a) > 0.0) ++winding;
    } else if (b.y() <= p.y() && cross(b - a, p - a) < 0.0) {
      --winding;
    }
  }
  return winding != 0;
}

double distance_to_polyline(const std::vector<Vec2>& poly, const Vec2& p, bool closed) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  const std::size_t edges = closed ? n : n - 1;
  for (std::size_t i = 0; i < edges; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const Vec2 d = b - a;
    const double len2 = d.squaredNorm();
    double t = len2 > 0.0 ? (p - a).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, (a + t * d - p).norm());
  }
  return best;
}

SamplingGrid::SamplingGrid(const BoundingBox& bbox, int nx, int ny) : bbox_(bbox), nx_(nx), ny_(ny) {
  if (nx < 1 || ny < 1) throw InvalidInput("sampling grid needs nx, ny >= 1");
  if (!(bbox.xmin < bbox.xmax) || !(bbox.ymin < bbox.ymax))
    throw InvalidInput("sampling grid bounding box is degenerate");
  dx_ = nx > 1 ? (bbox.xmax - bbox.xmin) / (nx - 1) : 0.0;
  dy_ = ny > 1 ? (bbox.ymax - bbox.ymin) / (ny - 1) : 0.0;
  points_.reserve(static_cast<std::size_t>(nx) * ny);
  for (int i = 0; i < ny; ++i) {
    for (int j = 0; j < nx; ++j) points_.push_back(point(i, j));
  }
}

Vec2 SamplingGrid::point(int i, int j) const { return {bbox_.xmin + j * dx_, bbox_.ymin + i * dy_}; }

}  // namespace sfm
