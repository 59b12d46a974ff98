#include "sfm_cli/commands.hpp"
#include "sfm_cli/config.hpp"
#include "sfm_cli/validation.hpp"

#include <scatterfm/errors.hpp>
#include <scatterfm/parallel.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace sfm::cli {
namespace {

namespace fs = std::filesystem;

const char* kDisk =
    "[scene]\nk = 2\nn_nodes = 64\nn_dir = 16\n"
    "[curve]\ntype = circle\ncenter = 0 0\nradius = 1\n"
    "[bc]\nfamily = dirichlet\n";

class TempDir {
 public:
  TempDir() {
    std::string t = (fs::temp_directory_path() / "sfm-cli-XXXXXX").string();
    if (!mkdtemp(t.data())) throw std::runtime_error("mkdtemp failed");
    path_ = t;
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

TEST(Config, ParsesAllSections) {
  const auto cfg = parse_scene_config(
      "[scene]\nk = 3.5\nn_nodes = 40\nn_dir = 24 ; comment\n"
      "[curve]\ntype = polygon\nvertices = 0 0, 2 0, 2 1, 0 1\n"
      "[bc]\nfamily = local_b\nb11 = -0.5\nb12 = 0.25\nb12_im = -1\nb22 = 2\n"
      "[screen]\nt_begin = 0\nt_end = 2\n"
      "[noise]\nlevel = 0.02\nseed = 11\n");
  EXPECT_EQ(cfg.k, 3.5);
  EXPECT_EQ(cfg.n_nodes, 40);
  EXPECT_EQ(cfg.n_dir, 24);
  ASSERT_TRUE(std::holds_alternative<Polygon>(cfg.curve.shape));
  EXPECT_EQ(std::get<Polygon>(cfg.curve.shape).vertices.size(), 4u);
  const auto& b = std::get<LocalBC>(cfg.bc.family);
  EXPECT_EQ(b.b12[7], cdouble(0.25, -1.0));
  EXPECT_EQ(b.b22[0], 2.0);
  EXPECT_TRUE(cfg.bc.on_screen);
  EXPECT_EQ(cfg.noise.level, 0.02);
  EXPECT_EQ(cfg.noise.seed, 11u);
}

TEST(Config, CurveTypes) {
  auto curve = [](const std::string& body) {
    return parse_scene_config("[scene]\nk=1\nn_nodes=32\nn_dir=8\n[curve]\n" + body + "[bc]\nfamily=neumann\n");
  };
  EXPECT_TRUE(std::holds_alternative<Kite>(curve("type=kite\n").curve.shape));
  EXPECT_TRUE(std::holds_alternative<Ellipse>(curve("type=ellipse\nsemiaxes=1,2\n").curve.shape));
  const auto arc = curve("type=arc\nradius=1\nangle_begin=0\nangle_end=2\n");
  EXPECT_TRUE(std::holds_alternative<CircularArc>(arc.curve.shape));
  EXPECT_TRUE(arc.bc.on_screen);  // open arcs are screens
  EXPECT_FALSE(curve("type=kite\n").bc.on_screen);
  EXPECT_EQ(build_mesh(arc).screen_indices().size(), 32u);
}

TEST(Config, Errors) {
  auto fails = [](const std::string& text, const std::string& needle) {
    try {
      parse_scene_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  const std::string scene = "[scene]\nk=1\nn_nodes=32\nn_dir=8\n[curve]\ntype=circle\nradius=1\n";
  EXPECT_TRUE(fails(scene + "[bc]\nfamily=alpha\nalpha=0\n", "nonzero"));
  EXPECT_TRUE(fails(scene + "[bc]\nfamily=dirichlet\nextra=1\n", "unknown key 'bc.extra'"));
  EXPECT_TRUE(fails(scene + "[bc]\nfamily=robin\n", "unknown boundary-condition family"));
  EXPECT_TRUE(fails(scene + "[bc]\nfamily=local_b\nb11=1\nb22=1\n", "strictly negative"));
  EXPECT_TRUE(fails(scene, "missing section [bc]"));
  EXPECT_TRUE(fails(scene + "[bc]\nfamily=dirichlet\n[extra]\na=1\n", "unknown section"));
  EXPECT_TRUE(fails("[scene]\nk=-1\nn_nodes=32\nn_dir=8\n", "positive"));
  EXPECT_TRUE(fails("[scene]\nk=1\nn_nodes=3.5\nn_dir=8\n", "positive integer"));
  EXPECT_TRUE(fails("[scene]\nk=1\nn_nodes=32\nn_dir=7\n", "even"));
  EXPECT_TRUE(fails("[scene]\nk=1\nn_nodes=32\nn_dir=8\n[curve]\ntype=circle\nradius=-1\n[bc]\nfamily=dirichlet\n",
                    "invalid curve"));
  EXPECT_TRUE(fails(scene + "[bc]\nfamily=dirichlet\n[noise]\nlevel=1.5\n", "[0, 1)"));
  EXPECT_TRUE(fails("[scene]\nk=abc\n", "not a number"));
  EXPECT_TRUE(fails(scene + "[bc]\nfamily=theta\ntheta=1\ntheta_file=x.txt\n", "not both"));
}

TEST(Config, SampleFiles) {
  TempDir dir;
  std::string samples;
  for (int i = 0; i < 32; ++i) samples += std::to_string(i < 16 ? 1 : -1) + (i % 8 == 7 ? "\n" : " ");
  write(dir / "alpha.txt", samples);
  write(dir / "short.txt", "1 2 3\n");
  const std::string head = "[scene]\nk=1\nn_nodes=32\nn_dir=8\n[curve]\ntype=circle\nradius=1\n[bc]\n";
  write(dir / "mixed.ini", head + "family=alpha\nalpha_file=alpha.txt\n");
  write(dir / "short.ini", head + "family=theta\ntheta_file=short.txt\n");
  try {
    load_scene_config((dir / "mixed.ini").string());
    FAIL() << "mixed-sign alpha accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("constant sign"), std::string::npos);
  }
  EXPECT_THROW(load_scene_config((dir / "short.ini").string()), ConfigError);
  EXPECT_THROW(load_scene_config((dir / "absent.ini").string()), ConfigError);
}

TEST(Config, HashIsCanonical) {
  const auto a = parse_scene_config(kDisk);
  const auto b = parse_scene_config(
      "[bc]\nfamily = dirichlet\n[curve]\nradius=1.0\ntype=circle\n[scene]\nn_dir=16\nk=2.0\nn_nodes=64\n");
  EXPECT_EQ(a.hash(), b.hash());
  const auto c = parse_scene_config(std::string(kDisk) + "[noise]\nlevel=0.01\nseed=1\n");
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_NE(a.canonical_text().find("k=2\n"), std::string::npos);
}

IndicatorField field_of(std::vector<double> values, int nx, int ny) {
  return {SamplingGrid({0, 1, 0, 1}, nx, ny), std::move(values), 0.0, 0};
}

std::string pixels(const fs::path& p) {
  const std::string s = slurp(p);
  std::size_t pos = 0;
  for (int fields = 0; fields < 4; ++fields) {
    while (std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    while (!std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  return s.substr(pos + 1);
}

TEST(Heatmap, Examples) {
  TempDir dir;
  emit_heatmap(field_of({3, 3, 3, 3, 3, 3}, 3, 2), (dir / "c.pgm").string());
  EXPECT_EQ(slurp(dir / "c.pgm").substr(0, 11), "P5\n3 2\n255\n");
  EXPECT_EQ(pixels(dir / "c.pgm"), std::string(6, '\0'));

  emit_heatmap(field_of({7.5}, 1, 1), (dir / "one.pgm").string());
  EXPECT_EQ(pixels(dir / "one.pgm"), std::string(1, '\0'));

  emit_heatmap(field_of({0, 1, 1, 0}, 2, 2), (dir / "two.pgm").string());
  EXPECT_EQ(pixels(dir / "two.pgm"), std::string("\x00\xff\xff\x00", 4));

  // Row 0 of the image is the first grid row (y = ymin); 127.5 rounds up.
  emit_heatmap(field_of({0, 0.5, 2, 1}, 2, 2), (dir / "r.pgm").string());
  EXPECT_EQ(pixels(dir / "r.pgm"), std::string("\x00\x40\xff\x80", 4));

  EXPECT_THROW(emit_heatmap(field_of({}, 1, 1), (dir / "e.pgm").string()), InvalidInput);
  EXPECT_ANY_THROW(emit_heatmap(field_of({1}, 1, 1), (dir / "missing" / "x.pgm").string()));
}

TEST(Segments, ReadProbeList) {
  TempDir dir;
  write(dir / "p.txt", "# probes\n-1 0 -0.75 0\n\n0 1 0.25 1 16  # short\n");
  const auto segs = read_segments((dir / "p.txt").string());
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[1].n_quad, 16);
  EXPECT_EQ(segs[0].n_quad, 32);
  write(dir / "bad.txt", "0 0 1\n");
  EXPECT_THROW(read_segments((dir / "bad.txt").string()), InvalidInput);
  write(dir / "zero.txt", "1 1 1 1\n");
  EXPECT_THROW(read_segments((dir / "zero.txt").string()), InvalidInput);
}

TEST(Pipeline, ForwardInvertShapesAndDeterminism) {
  TempDir dir;
  write(dir / "disk.ini",
        "[scene]\nk = 5\nn_nodes = 128\nn_dir = 32\n[curve]\ntype = circle\nradius = 1\n[bc]\nfamily = dirichlet\n");
  ForwardOptions f{(dir / "disk.ini").string(), (dir / "disk.ff").string(), true};
  const RunReport fr = run_forward(f);
  auto value = [](const RunReport& r, const std::string& key) {
    for (const auto& [k, v] : r.values) {
      if (k == key) return v;
    }
    return std::string();
  };
  EXPECT_LT(std::stod(value(fr, "oracle_relative_distance")), 1e-6);
  EXPECT_LT(std::stod(value(fr, "unitarity_residual")), 1e-10);
  const std::string first = slurp(dir / "disk.ff");
  run_forward(f);
  EXPECT_EQ(slurp(dir / "disk.ff"), first);

  InvertOptions inv;
  inv.farfield = f.out;
  inv.bbox = BoundingBox{-2, 2, -2, 2};
  inv.out = (dir / "a").string();
  const int saved = worker_count();
  set_worker_count(1);
  run_invert(inv);
  set_worker_count(3);
  inv.out = (dir / "b").string();
  const RunReport ir = run_invert(inv);
  set_worker_count(saved);
  EXPECT_EQ(value(ir, "cutoff"), "1e-08");
  const std::string csv = slurp(dir / "a.csv");
  EXPECT_EQ(count_lines(csv), 2 + 1681);
  EXPECT_EQ(csv.substr(0, 2), "# ");
  EXPECT_EQ(csv, slurp(dir / "b.csv"));
  EXPECT_EQ(slurp(dir / "a_mask.csv"), slurp(dir / "b_mask.csv"));
  EXPECT_EQ(slurp(dir / "a.pgm"), slurp(dir / "b.pgm"));
  EXPECT_EQ(slurp(dir / "a.pgm").size(), std::string("P5\n41 41\n255\n").size() + 1681);

  inv.mode = InvertMode::inf;
  inv.inf_dimension = 20;
  inv.out = (dir / "inf").string();
  EXPECT_EQ(value(run_invert(inv), "inf_dimension"), "20");
  EXPECT_TRUE(fs::exists(dir / "inf.pgm"));

  inv.mode = InvertMode::screen;
  EXPECT_THROW(run_invert(inv), InvalidInput);  // no --segments
}

TEST(Pipeline, NoisyDataSetsCutoffFromHeader) {
  TempDir dir;
  write(dir / "noisy.ini", std::string(kDisk) + "[noise]\nlevel = 0.01\nseed = 5\n");
  run_forward({(dir / "noisy.ini").string(), (dir / "noisy.ff").string()});
  InvertOptions inv;
  inv.farfield = (dir / "noisy.ff").string();
  inv.bbox = BoundingBox{-2, 2, -2, 2};
  inv.nx = 5;
  inv.ny = 4;
  inv.out = (dir / "n").string();
  const auto r = run_invert(inv);
  bool found = false;
  for (const auto& [k, v] : r.values) {
    if (k == "cutoff") {
      EXPECT_EQ(v, "0.10000000000000001");
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(count_lines(slurp(dir / "n.csv")), 2 + 20);
}

TEST(Pipeline, ForwardErrors) {
  TempDir dir;
  write(dir / "eig.ini",
        "[scene]\nk = 2.404825557695773\nn_nodes = 128\nn_dir = 16\n[curve]\ntype = circle\nradius = 1\n"
        "[bc]\nfamily = dirichlet\n");
  EXPECT_THROW(run_forward({(dir / "eig.ini").string(), (dir / "x.ff").string()}), NearSingularModel);
  write(dir / "kite.ini", "[scene]\nk=1\nn_nodes=32\nn_dir=8\n[curve]\ntype=kite\n[bc]\nfamily=dirichlet\n");
  EXPECT_THROW(run_forward({(dir / "kite.ini").string(), (dir / "x.ff").string(), true}), ConfigError);
}

TEST(Pipeline, ScreenModeWritesSegmentScores) {
  TempDir dir;
  write(dir / "crack.ini",
        "[scene]\nk = 6\nn_nodes = 64\nn_dir = 32\n[curve]\ntype = segment\nstart = -1 0\nend = 1 0\n"
        "[bc]\nfamily = dirichlet\n");
  write(dir / "probes.txt", "-0.5 0 -0.25 0\n0 0 0.25 0\n-0.25 1.5 0 1.5\n2 0 2.25 0\n");
  run_forward({(dir / "crack.ini").string(), (dir / "crack.ff").string()});
  InvertOptions inv;
  inv.farfield = (dir / "crack.ff").string();
  inv.mode = InvertMode::screen;
  inv.segments = (dir / "probes.txt").string();
  inv.out = (dir / "s").string();
  run_invert(inv);
  std::ifstream in(dir / "s_segments.csv");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line, "x0,y0,x1,y1,W,high");
  std::vector<int> high;
  while (std::getline(in, line)) high.push_back(line.back() - '0');
  EXPECT_EQ(high, (std::vector<int>{1, 1, 0, 0}));
}

TEST(Validation, SuitesAndFormatting) {
  EXPECT_EQ(parse_suite("all"), Suite::all);
  EXPECT_FALSE(parse_suite("mesh").has_value());
  EXPECT_EQ(suite_criteria(Suite::all).size(), 12u);
  EXPECT_EQ(suite_criteria(Suite::screen), std::vector<int>{10});
  EXPECT_THROW(run_criterion(13), std::out_of_range);
  EXPECT_EQ(format_result({6, "x", true, "ok"}), "[PASS]  6 x: ok");
}

TEST(Validation, DoubledTraceConstantFailsUnitarity) {
  ValidationOptions opts;
  opts.c_scale = 2.0;
  EXPECT_FALSE(run_criterion(2, opts).pass);
  EXPECT_TRUE(run_criterion(2).pass);
}

}  // namespace
}  // namespace sfm::cli
