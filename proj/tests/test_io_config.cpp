#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "specklesim/config.hpp"
#include "specklesim/io.hpp"

using namespace specklesim;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
  const fs::path dir = fs::temp_directory_path() / (std::string("specklesim_test_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar", 6) == 0x85944171f73967e8ull);
}

TEST_CASE("f32 image round trip with sidecar") {
  const fs::path dir = temp_dir("io_f32");
  const Grid g{5, 7, 0.125};
  Image img(g);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> dist(0.0, 3.0);
  for (double& x : img.v) x = dist(rng);

  write_image_f32(dir / "img", img, "test_role");
  const Image back = read_image_f32(dir / "img");
  CHECK(back.grid == g);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(back.v[i] == static_cast<double>(static_cast<float>(img.v[i])));

  const std::string side = read_text_file(dir / "img.txt");
  CHECK(side.find("n1=5") != std::string::npos);
  CHECK(side.find("n2=7") != std::string::npos);
  CHECK(side.find("pitch=0.125") != std::string::npos);
  CHECK(side.find("dtype=float32le") != std::string::npos);
  CHECK(side.find("role=test_role") != std::string::npos);

  // Payload is exactly 4 bytes per pixel.
  CHECK(fs::file_size(dir / "img.f32") == g.size() * 4);
  fs::remove_all(dir);
}

TEST_CASE("pgm preview: header, size, and peak value") {
  const fs::path dir = temp_dir("io_pgm");
  const Grid g{3, 4, 0.1};
  Image img(g);
  img.at(1, 2) = 2.0;
  img.at(0, 0) = 1.0;
  img.at(2, 3) = -5.0;  // negative values clamp to black
  write_pgm16(dir / "img.pgm", img);

  const std::string bytes = read_text_file(dir / "img.pgm");
  const std::string header = "P5\n4 3\n65535\n";
  REQUIRE(bytes.size() == header.size() + g.size() * 2);
  CHECK(bytes.compare(0, header.size(), header) == 0);
  const auto px = [&](int i, int j) {
    const std::size_t off = header.size() + 2 * (static_cast<std::size_t>(i) * g.n2 + j);
    return (static_cast<unsigned>(static_cast<unsigned char>(bytes[off])) << 8) |
           static_cast<unsigned>(static_cast<unsigned char>(bytes[off + 1]));
  };
  CHECK(px(1, 2) == 65535u);  // max pixel
  CHECK(px(0, 0) == 32768u);  // half scale, rounded
  CHECK(px(2, 3) == 0u);
  CHECK(px(0, 1) == 0u);
  fs::remove_all(dir);
}

TEST_CASE("stack storage: zero-padded per-frame files plus manifest") {
  const fs::path dir = temp_dir("io_stack");
  const Grid g{4, 4, 0.2};
  ImageStack stack(g, 3);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& x : stack.v) x = dist(rng);

  write_stack(dir, stack, "y");
  CHECK(fs::exists(dir / "y_0000.f32"));
  CHECK(fs::exists(dir / "y_0001.f32"));
  CHECK(fs::exists(dir / "y_0002.f32"));
  CHECK(fs::exists(dir / "y_stack.txt"));

  const ImageStack back = read_stack(dir, "y");
  CHECK(back.m == 3);
  CHECK(back.grid == g);
  for (std::size_t i = 0; i < stack.v.size(); ++i)
    CHECK(back.v[i] == static_cast<double>(static_cast<float>(stack.v[i])));
  fs::remove_all(dir);
}

TEST_CASE("config defaults") {
  const ExperimentConfig cfg = parse_config("");
  CHECK(cfg.grid.n1 == 128);
  CHECK(cfg.grid.n2 == 128);
  CHECK(cfg.grid.pitch == 0.05);
  CHECK(cfg.target_kind == TargetKind::star);
  CHECK(cfg.target_arms == 40);
  CHECK(cfg.psf_na == 1.49);
  CHECK(cfg.speckle.m == 100);
  CHECK(cfg.speckle.na_ill == 1.49);
  CHECK(cfg.speckle.i0 == 1.0);
  CHECK(cfg.speckle.kind == SpeckleSpec::Kind::standard);
  REQUIRE(cfg.noise_snr_db.has_value());
  CHECK(*cfg.noise_snr_db == 40.0);
  CHECK(!cfg.noise_photons.has_value());
  CHECK(cfg.solver.p == 2);
  CHECK(cfg.solver.q == 1.0);
  CHECK(cfg.solver.mu_tv == 0.0);
  CHECK(cfg.solver.xi_auto);
  CHECK(cfg.solver.tau == 0.35);
  CHECK(cfg.solver.sigma == 1.0);
  CHECK(cfg.solver.theta == 1.0);
  CHECK(cfg.solver.max_iters == 2000);
  CHECK(cfg.solver.rel_tol == 1e-6);
  CHECK(cfg.solver.i0 == 1.0);
  CHECK(cfg.estimator == EstimatorChoice::both);
  CHECK(!cfg.marginal_enabled);
  CHECK(cfg.marginal_cap == 1024);
}

TEST_CASE("config parsing: comments, spacing, q fractions, xi auto, na_ill default") {
  const char* text =
      "# a comment line\n"
      "grid.n1 = 16   # trailing comment\n"
      "grid.n2=16\n"
      "grid.pitch = 0.1\n"
      "\n"
      "psf.na = 1.2\n"
      "solver.q = 1/2\n"
      "solver.xi = 3.5\n"
      "speckle.m = 8\n"
      "estimator = mean\n";
  const ExperimentConfig cfg = parse_config(text);
  CHECK(cfg.grid.n1 == 16);
  CHECK(cfg.grid.n2 == 16);
  CHECK(cfg.psf_na == 1.2);
  CHECK(cfg.speckle.na_ill == 1.2);  // follows psf.na when not set explicitly
  CHECK(cfg.solver.q == 0.5);
  CHECK(!cfg.solver.xi_auto);
  CHECK(cfg.solver.xi == 3.5);

  const ExperimentConfig cfg2 = parse_config("speckle.na_ill = 0.9\npsf.na = 1.3\n");
  CHECK(cfg2.speckle.na_ill == 0.9);

  CHECK(parse_config("solver.q = 2/3\n").solver.q == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(parse_config("solver.q = 1\n").solver.q == 1.0);
}

TEST_CASE("config diagnostics carry field and line") {
  try {
    parse_config("grid.n1 = 32\nbogus.key = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
    CHECK(e.field() == "bogus.key");
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    parse_config("grid.pitch = abc\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 1);
    CHECK(e.field() == "grid.pitch");
  }
  CHECK_THROWS_AS(parse_config("target.arms = 7\n"), ConfigError);        // odd arms
  CHECK_THROWS_AS(parse_config("target.kind = file\n"), ConfigError);     // missing file
  CHECK_THROWS_AS(parse_config("solver.theta = 2.5\n"), ConfigError);     // theta range
  CHECK_THROWS_AS(parse_config("solver.tau = 1\nsolver.sigma = 1\n"), ConfigError);  // step bound
  CHECK_THROWS_AS(parse_config("speckle.m = 1\n"), ConfigError);          // std estimator needs m >= 2
  CHECK_THROWS_AS(parse_config("solver.p = 3\n"), ConfigError);           // unsupported (p, q)
  CHECK_THROWS_AS(parse_config("noise.photons = 0.5\n"), ConfigError);    // photons >= 1
}

TEST_CASE("config serialize/parse round trip is exact") {
  const char* text =
      "grid.n1 = 24\n"
      "grid.n2 = 20\n"
      "grid.pitch = 0.07\n"
      "speckle.m = 12\n"
      "speckle.i0 = 2.5\n"
      "noise.snr_db = 17.25\n"
      "noise.photons = 150\n"
      "solver.q = 2/3\n"
      "solver.mu_tv = 0.3\n"
      "solver.tau = 0.2\n"
      "estimator = std\n"
      "marginal.enabled = true\n"
      "marginal.cap = 512\n"
      "output_dir = /tmp/somewhere\n";
  const ExperimentConfig cfg = parse_config(text);
  const std::string echo = cfg.serialize();
  const ExperimentConfig cfg2 = parse_config(echo);
  CHECK(cfg2.serialize() == echo);
  CHECK(cfg2.grid.n2 == 20);
  CHECK(cfg2.speckle.i0 == 2.5);
  CHECK(cfg2.solver.i0 == 2.5);  // solver weight follows speckle.i0
  CHECK(cfg2.solver.q == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(cfg2.noise_photons.has_value());
  CHECK(cfg2.marginal_enabled);
  CHECK(cfg2.output_dir == "/tmp/somewhere");
}

TEST_CASE("load_config reports unreadable files as config errors") {
  CHECK_THROWS_AS(load_config("/nonexistent/path/to.cfg"), ConfigError);
}
