#include "sfm_cli/config.hpp"

#include <scatterfm/errors.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sfm::cli {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Drops a trailing ';' or '#' comment.
std::string strip_comment(const std::string& s) {
  const auto p = s.find_first_of(";#");
  return trim(p == std::string::npos ? s : s.substr(0, p));
}

double to_double(const std::string& tok, const std::string& key) {
  double v = 0.0;
  const char* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("'" + key + "': '" + tok + "' is not a number");
  return v;
}

std::vector<double> numbers(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::string tok;
  for (char c : text + " ") {
    if (c == ' ' || c == ',' || c == '\t' || c == '\n' || c == '\r' || c == ';') {
      if (!tok.empty()) out.push_back(to_double(tok, key));
      tok.clear();
    } else {
      tok += c;
    }
  }
  return out;
}

class Section {
 public:
  Section(const pt::ptree& tree, std::string name) : name_(std::move(name)) {
    for (const auto& [key, value] : tree) {
      if (!value.empty()) throw ConfigError("nested keys are not supported in [" + name_ + "]");
      values_[key] = strip_comment(value.data());
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing key '" + key + "' in [" + name_ + "]");
    used_.insert(key);
    return it->second;
  }

  double number(const std::string& key) {
    const auto v = numbers(text(key), qualified(key));
    if (v.size() != 1) throw ConfigError("'" + qualified(key) + "' must be a single number");
    return v[0];
  }

  double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  int count(const std::string& key) {
    const double v = number(key);
    if (v != std::floor(v) || v <= 0.0 || v > 1e7) throw ConfigError("'" + qualified(key) + "' must be a positive integer");
    return static_cast<int>(v);
  }

  Vec2 point(const std::string& key) {
    const auto v = numbers(text(key), qualified(key));
    if (v.size() != 2) throw ConfigError("'" + qualified(key) + "' must hold two numbers");
    return {v[0], v[1]};
  }

  std::string qualified(const std::string& key) const { return name_ + "." + key; }

  void check_all_used() const {
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) throw ConfigError("unknown key '" + qualified(key) + "'");
    }
  }

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

CurveSpec parse_curve(Section& s) {
  const std::string type = s.text("type");
  CurveSpec spec;
  if (type == "circle") {
    spec.shape = Circle{s.has("center") ? s.point("center") : Vec2(0, 0), s.number("radius")};
  } else if (type == "ellipse") {
    spec.shape = Ellipse{s.has("center") ? s.point("center") : Vec2(0, 0), s.point("semiaxes")};
  } else if (type == "kite") {
    spec.shape = Kite{s.has("center") ? s.point("center") : Vec2(0, 0), s.number_or("scale", 1.0)};
  } else if (type == "polygon") {
    const auto v = numbers(s.text("vertices"), s.qualified("vertices"));
    if (v.size() % 2 != 0) throw ConfigError("'curve.vertices' needs an even count of coordinates");
    Polygon p;
    for (std::size_t i = 0; i < v.size(); i += 2) p.vertices.emplace_back(v[i], v[i + 1]);
    spec.shape = std::move(p);
  } else if (type == "segment") {
    spec.shape = Segment{s.point("start"), s.point("end")};
  } else if (type == "arc") {
    spec.shape = CircularArc{s.has("center") ? s.point("center") : Vec2(0, 0), s.number("radius"),
                             s.number("angle_begin"), s.number("angle_end")};
  } else {
    throw ConfigError("unknown curve type '" + type + "'");
  }
  try {
    validate(spec);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("invalid curve: ") + e.what());
  }
  return spec;
}

std::vector<double> read_samples(const std::filesystem::path& path, int n, const std::string& key) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sample file '" + path.string() + "' for '" + key + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string body;
  for (std::string line; std::getline(ss, line);) body += strip_comment(line) + "\n";
  auto v = numbers(body, key);
  if (static_cast<int>(v.size()) != n) {
    throw ConfigError("sample file for '" + key + "' holds " + std::to_string(v.size()) + " values, expected " +
                      std::to_string(n));
  }
  return v;
}

// Constant `key` or per-node samples from `key_file`.
std::vector<double> multiplier(Section& s, const std::string& key, int n, const std::filesystem::path& base,
                               std::optional<double> fallback = std::nullopt) {
  const std::string file_key = key + "_file";
  if (s.has(key) && s.has(file_key)) throw ConfigError("give either '" + key + "' or '" + file_key + "', not both");
  if (s.has(file_key)) return read_samples(base / s.text(file_key), n, s.qualified(file_key));
  if (s.has(key)) return std::vector<double>(n, s.number(key));
  if (fallback) return std::vector<double>(n, *fallback);
  throw ConfigError("missing '" + s.qualified(key) + "' (or '" + file_key + "')");
}

BoundaryFamily parse_family(Section& s, int n, const std::filesystem::path& base) {
  const std::string family = s.text("family");
  if (family == "dirichlet") return DirichletBC{};
  if (family == "neumann") return NeumannBC{};
  if (family == "alpha") {
    AlphaBC bc{multiplier(s, "alpha", n, base)};
    bool pos = false;
    bool neg = false;
    for (double a : bc.alpha) {
      if (a == 0.0 || !std::isfinite(a)) throw ConfigError("alpha must be finite and nonzero at every node");
      (a > 0.0 ? pos : neg) = true;
    }
    if (pos && neg) throw ConfigError("alpha must have constant sign on the boundary (mixed signs given)");
    return bc;
  }
  if (family == "theta") return ThetaBC{multiplier(s, "theta", n, base)};
  if (family == "local_b") {
    if (s.has("robin")) {
      const double b = s.number("robin");
      if (b == 0.0) throw ConfigError("'bc.robin' must be nonzero");
      return robin_split(b, n);
    }
    LocalBC bc;
    bc.b11 = multiplier(s, "b11", n, base);
    bc.b22 = multiplier(s, "b22", n, base);
    const auto re = multiplier(s, "b12", n, base, 0.0);
    const auto im = multiplier(s, "b12_im", n, base, 0.0);
    for (int i = 0; i < n; ++i) bc.b12.emplace_back(re[i], im[i]);
    for (double v : bc.b11) {
      if (!(v < 0.0)) throw ConfigError("b11 must be strictly negative at every node");
    }
    return bc;
  }
  throw ConfigError("unknown boundary-condition family '" + family + "'");
}

void fnv(std::uint64_t& h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + num(v[i]);
  return out;
}

}  // namespace

SceneConfig parse_scene_config(const std::string& text, const std::string& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [name, sec] : tree) {
    if (name != "scene" && name != "curve" && name != "bc" && name != "screen" && name != "noise") {
      throw ConfigError(sec.empty() ? "key '" + name + "' outside a section" : "unknown section [" + name + "]");
    }
  }
  auto section = [&](const std::string& name, bool required) -> std::optional<Section> {
    const auto it = tree.find(name);
    if (it == tree.not_found()) {
      if (required) throw ConfigError("missing section [" + name + "]");
      return std::nullopt;
    }
    return Section(it->second, name);
  };

  SceneConfig cfg;
  auto scene = section("scene", true);
  cfg.k = scene->number("k");
  if (!(cfg.k > 0.0) || !std::isfinite(cfg.k)) throw ConfigError("'scene.k' must be positive");
  cfg.n_nodes = scene->count("n_nodes");
  cfg.n_dir = scene->count("n_dir");
  if (cfg.n_dir % 2 != 0) throw ConfigError("'scene.n_dir' must be even");
  scene->check_all_used();

  auto curve = section("curve", true);
  cfg.curve = parse_curve(*curve);
  curve->check_all_used();
  const int min_nodes = cfg.curve.is_closed() ? 8 : 4;
  if (cfg.n_nodes < min_nodes) throw ConfigError("'scene.n_nodes' must be at least " + std::to_string(min_nodes));

  auto bc = section("bc", true);
  cfg.bc.family = parse_family(*bc, cfg.n_nodes, base_dir);
  bc->check_all_used();

  if (auto screen = section("screen", false)) {
    const double a = screen->number("t_begin");
    const double b = screen->number("t_end");
    if (!(a < b)) throw ConfigError("'screen.t_begin' must be below 'screen.t_end'");
    cfg.screen = std::make_pair(a, b);
    screen->check_all_used();
  }
  cfg.bc.on_screen = cfg.screen.has_value() || !cfg.curve.is_closed();

  if (auto noise = section("noise", false)) {
    cfg.noise.level = noise->number_or("level", 0.0);
    const double seed = noise->number_or("seed", 0.0);
    if (seed < 0.0 || seed != std::floor(seed) || seed > 9e15) throw ConfigError("'noise.seed' must be a non-negative integer");
    cfg.noise.seed = static_cast<std::uint64_t>(seed);
    if (!(cfg.noise.level >= 0.0 && cfg.noise.level < 1.0)) throw ConfigError("'noise.level' must lie in [0, 1)");
    noise->check_all_used();
  }
  return cfg;
}

SceneConfig load_scene_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_scene_config(ss.str(), dir.empty() ? "." : dir.string());
}

std::string SceneConfig::canonical_text() const {
  std::ostringstream os;
  os << "k=" << num(k) << "\nn_nodes=" << n_nodes << "\nn_dir=" << n_dir << "\n";
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          os << "curve=circle " << list({s.center.x(), s.center.y(), s.radius});
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          os << "curve=ellipse " << list({s.center.x(), s.center.y(), s.semiaxes.x(), s.semiaxes.y()});
        } else if constexpr (std::is_same_v<T, Kite>) {
          os << "curve=kite " << list({s.center.x(), s.center.y(), s.scale});
        } else if constexpr (std::is_same_v<T, Polygon>) {
          os << "curve=polygon";
          for (const auto& v : s.vertices) os << " " << list({v.x(), v.y()});
        } else if constexpr (std::is_same_v<T, Segment>) {
          os << "curve=segment " << list({s.start.x(), s.start.y(), s.end.x(), s.end.y()});
        } else {
          os << "curve=arc " << list({s.center.x(), s.center.y(), s.radius, s.angle_begin, s.angle_end});
        }
      },
      curve.shape);
  os << "\nfamily=" << family_name(bc.family) << "\n";
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, AlphaBC>) {
          os << "alpha=" << list(f.alpha) << "\n";
        } else if constexpr (std::is_same_v<T, ThetaBC>) {
          os << "theta=" << list(f.theta) << "\n";
        } else if constexpr (std::is_same_v<T, LocalBC>) {
          std::vector<double> re;
          std::vector<double> im;
          for (const auto& z : f.b12) {
            re.push_back(z.real());
            im.push_back(z.imag());
          }
          os << "b11=" << list(f.b11) << "\nb12=" << list(re) << "\nb12_im=" << list(im) << "\nb22=" << list(f.b22)
             << "\n";
        }
      },
      bc.family);
  os << "on_screen=" << (bc.on_screen ? 1 : 0) << "\n";
  if (screen) os << "screen=" << list({screen->first, screen->second}) << "\n";
  os << "noise=" << num(noise.level) << " " << noise.seed << "\n";
  return os.str();
}

std::uint64_t SceneConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv(h, canonical_text());
  return h;
}

BoundaryMesh build_mesh(const SceneConfig& config) {
  BoundaryMesh mesh;
  try {
    mesh = discretize_curve(config.curve, config.n_nodes);
    if (config.screen) {
      mesh = with_screen(mesh, config.screen->first, config.screen->second);
      if (mesh.screen_indices().empty()) throw ConfigError("the [screen] interval contains no mesh nodes");
    } else if (!config.curve.is_closed()) {
      mesh = with_screen_range(mesh, 0, mesh.size() - 1);
    }
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  return mesh;
}

}  // namespace sfm::cli
