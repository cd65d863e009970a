#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

#include "beadlab/config_io.hpp"
#include "beadlab/errors.hpp"
#include "beadlab/gibbs_sampler.hpp"
#include "beadlab/render.hpp"
#include "cli.hpp"
#include "test_util.hpp"

using namespace beadlab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("beadlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

int cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "beadlab");
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

// Parses "a,b,c" fields of a simple CSV line (no quoting needed here).
std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) {
    if (!f.empty() && f.back() == '\r') f.pop_back();
    out.push_back(f);
  }
  return out;
}

double polygon_area(const Polygon& p) {
  double a = 0;
  for (size_t i = 0; i < p.corners.size(); ++i) {
    const auto& u = p.corners[i];
    const auto& v = p.corners[(i + 1) % p.corners.size()];
    a += u[0] * v[1] - v[0] * u[1];
  }
  return a / 2;
}

}  // namespace

TEST_CASE("configuration text format round trips") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const TorusBeadConfig h = testing::hex_sample(9, seed);
    CHECK(read_config(write_config(h)).dimers() == h.dimers());
    CHECK(write_config(read_config(write_config(h))) == write_config(h));
    const TorusBeadConfig s = testing::square_sample(8, seed);
    CHECK(read_config(write_config(s)).dimers() == s.dimers());
  }
  const std::string text = write_config(staircase_config(3, make_slope(1.0 / 3, 1.0 / 3)));
  CHECK(text.rfind("beadlab-config 1\n", 0) == 0);
  CHECK(text.find("lattice hex") != std::string::npos);
}

TEST_CASE("configuration parse errors name the line") {
  CHECK_THROWS_AS(read_config("beadlab-config 2\nlattice hex\nL 3\n"), ParseError);
  CHECK_THROWS_AS(read_config("beadlab-config 1\nlattice hex\nL x\n"), ParseError);
  CHECK_THROWS_AS(read_config("beadlab-config 1\nlattice hex\nL 3\ncolumn 0 0\n"), ParseError);
  try {
    read_config("beadlab-config 1\n# comment\nlattice hex\nL 3\nbogus 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
  // A well-formed file with non-interlaced columns fails in the constructor.
  CHECK_THROWS_AS(read_config("beadlab-config 1\nlattice hex\nL 3\ncolumn 0 0 1\ncolumn 1 2\n"
                              "column 2 0\n"),
                  InterlacingViolation);
}

TEST_CASE("parameter files: sections, typed getters and unused keys") {
  const ParamFile p = ParamFile::parse(
      "seed = 7\n[sampler]\nL = 12\n; comment\nrho1 = 0.25\n# another\n"
      "[experiment]\ntimes = 2, 8 ,16\nbad = 3x\n");
  CHECK(p.get_int("seed", 0) == 7);
  CHECK(p.get_int("sampler.L", 0) == 12);
  CHECK(p.get_double("sampler.rho1", 0) == doctest::Approx(0.25));
  CHECK(p.get_double("sampler.rho2", 0.5) == doctest::Approx(0.5));
  CHECK(p.get_list("experiment.times", {}) == std::vector<double>{2, 8, 16});
  CHECK_THROWS_AS(p.get_int("experiment.bad", 0), ParseError);
  CHECK_THROWS_AS(p.get_double("experiment.bad", 0), ParseError);
  CHECK(p.unused().empty());
  const ParamFile q = ParamFile::parse("[dhd]\nparticles = 4\ntypo = 1\n");
  q.get_int("dhd.particles", 0);
  CHECK(q.unused() == std::vector<std::string>{"dhd.typo"});
  CHECK_THROWS_AS(ParamFile::parse("[unterminated\n"), ParseError);
}

TEST_CASE("CSV writer: version comment, quoting and CRLF rows") {
  std::ostringstream os;
  CsvWriter w(os, {"a", "b"}, "demo");
  w.row({"1", "x,y"});
  w.row({"say \"hi\"", "2"});
  CHECK(os.str() == "# beadlab 1.0 demo\r\na,b\r\n1,\"x,y\"\r\n\"say \"\"hi\"\"\",2\r\n");
  CHECK_THROWS_AS(w.row({"only one"}), ConfigError);
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
  for (double x : {0.1, 1.0 / 3, 2.5e-17, -7.0, 123456789.125})
    CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("rendering: one lozenge per dimer tiling the torus") {
  const TorusBeadConfig c = staircase_config(12, make_slope(1.0 / 3, 1.0 / 3));
  const auto polys = tiling_polygons(c);
  CHECK(polys.size() == 144);
  double area = 0;
  int kinds[3] = {0, 0, 0};
  for (const Polygon& p : polys) {
    REQUIRE(p.corners.size() == 4);
    for (size_t i = 0; i < 4; ++i) {
      const auto& u = p.corners[i];
      const auto& v = p.corners[(i + 1) % 4];
      CHECK(std::hypot(u[0] - v[0], u[1] - v[1]) == doctest::Approx(1.0));
    }
    CHECK(polygon_area(p) > 0.0);
    area += polygon_area(p);
    ++kinds[p.kind];
  }
  CHECK(area == doctest::Approx(144 * std::sqrt(3.0) / 2));
  CHECK(kinds[0] == 48);
  CHECK(kinds[1] + kinds[2] == 96);
  const std::string svg = render_svg(c);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  std::regex poly("<polygon ");
  CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), poly), std::sregex_iterator()) == 144);
}

TEST_CASE("rendering dominoes covers the square torus") {
  const TorusBeadConfig c = testing::square_sample(8, 3);
  const auto polys = tiling_polygons(c);
  CHECK(polys.size() == 64);
  double area = 0;
  for (const Polygon& p : polys) area += std::abs(polygon_area(p));
  CHECK(area == doctest::Approx(128.0));
}

TEST_CASE("cli: usage errors exit with 2, domain errors with 1") {
  std::string out, err;
  CHECK(cli({}, &out, &err) == kExitUsage);
  CHECK(cli({"frobnicate"}, &out, &err) == kExitUsage);
  CHECK(cli({"sample", "--jobs", "0"}, &out, &err) == kExitUsage);
  CHECK(cli({"--help"}, &out, &err) == kExitOk);
  const fs::path d = fresh_dir("errors");
  CHECK(cli({"experiment", "--out", d.string(), "--seed", "1", "--set", "experiment.rho1=0.8",
             "--set", "experiment.rho2=0.5"},
            &out, &err) == kExitValidation);
  CHECK(err.find("ExtremalSlope") != std::string::npos);
  CHECK(cli({"sample", "--out", d.string(), "--seed", "1", "--set", "sampler.L=abc"}, &out, &err) ==
        kExitValidation);
  CHECK(cli({"sample", "--out", d.string(), "--set", "novalue"}, &out, &err) == kExitUsage);
}

TEST_CASE("cli: determinantal table reports the 0.896 constant") {
  const fs::path d = fresh_dir("det");
  std::string out;
  REQUIRE(cli({"determinantal-table", "--out", d.string(), "--seed", "1"}, &out) == kExitOk);
  const std::string csv = slurp(d / "determinantal.csv");
  std::istringstream in(csv);
  std::string comment, header, row;
  std::getline(in, comment);
  std::getline(in, header);
  std::getline(in, row);
  const auto h = fields(header), r = fields(row);
  REQUIRE(h.size() == r.size());
  const auto col = [&](const std::string& name) {
    for (size_t i = 0; i < h.size(); ++i)
      if (h[i] == name) return std::stod(r[i]);
    FAIL("missing column " << name);
    return 0.0;
  };
  CHECK(std::abs(col("sqrt_k1k2_C") - 0.896) < 0.005);
  CHECK(std::abs(col("density_sum") - 1.0) < 1e-5);
  CHECK(std::abs(col("J") - 0.275664) < 1e-6);
  CHECK(col("ciro") == 1.0);
}

TEST_CASE("cli: render of a staircase and sample round trip through files") {
  const fs::path d = fresh_dir("render");
  std::string out;
  REQUIRE(cli({"render", "--out", d.string(), "--seed", "1", "--set", "sampler.L=12"}, &out) == kExitOk);
  const std::string svg = slurp(d / "tiling.svg");
  std::regex poly("<polygon ");
  CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), poly), std::sregex_iterator()) == 144);
  REQUIRE(cli({"sample", "--out", d.string(), "--seed", "5", "--set", "sampler.L=9"}, &out) == kExitOk);
  const TorusBeadConfig c = load_config((d / "sample.cfg").string());
  SamplerSpec s;
  s.L = 9;
  s.seed = 5;
  CHECK(c.dimers() == sample_gibbs(s).dimers());
  REQUIRE(cli({"render", "--out", d.string(), "--set", "render.input=" + (d / "sample.cfg").string()},
              &out) == kExitOk);
  CHECK(out.find("rendered 81 tiles") != std::string::npos);
}

TEST_CASE("cli: identical config and seed give byte-identical CSV") {
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  const fs::path cfg = a / "params.ini";
  {
    std::ofstream f(cfg);
    f << "[sampler]\nL = 10\n[dynamics]\nT = 1.5\nreplicas = 6\nradius = 1\n";
  }
  std::string out;
  REQUIRE(cli({"dynamics", "--config", cfg.string(), "--out", a.string(), "--seed", "42", "--jobs", "3"},
              &out) == kExitOk);
  REQUIRE(cli({"dynamics", "--config", cfg.string(), "--out", b.string(), "--seed", "42", "--jobs", "1"},
              &out) == kExitOk);
  CHECK(slurp(a / "dynamics.csv") == slurp(b / "dynamics.csv"));
  CHECK(slurp(a / "dynamics.csv").rfind("# beadlab 1.0 dynamics\r\n", 0) == 0);
  const fs::path c = fresh_dir("det_c");
  REQUIRE(cli({"dynamics", "--config", cfg.string(), "--out", c.string(), "--seed", "43"}, &out) == kExitOk);
  CHECK(slurp(a / "dynamics.csv") != slurp(c / "dynamics.csv"));
}

TEST_CASE("cli: dhd check and a missing seed is logged") {
  const fs::path d = fresh_dir("dhd");
  std::string out, err;
  REQUIRE(cli({"dhd", "--out", d.string(), "--set", "dhd.trials=5", "--set", "dhd.particles=10"}, &out,
              &err) == kExitOk);
  CHECK(out.rfind("seed ", 0) == 0);
  CHECK(out.find("not given") != std::string::npos);
  const std::string csv = slurp(d / "dhd.csv");
  CHECK(csv.find("seed,n,t,z_sim,z_lpp,equal") != std::string::npos);
  CHECK(csv.find(",0\r\n") == std::string::npos);
  REQUIRE(cli({"dhd", "--out", d.string(), "--seed", "3", "--set", "dhd.trials=2", "--set",
               "dhd.typo=1"},
              &out, &err) == kExitOk);
  CHECK(err.find("dhd.typo") != std::string::npos);
}

TEST_CASE("cli: experiment writes results and summary") {
  const fs::path d = fresh_dir("exp");
  std::string out;
  const int code = cli({"experiment", "--out", d.string(), "--seed", "2", "--set", "experiment.kind=gap_tail",
                        "--set", "experiment.L=12", "--set", "experiment.replicas=20", "--set",
                        "experiment.windows=0,3", "--set", "experiment.times=1"},
                       &out);
  CHECK((code == kExitOk || code == kExitAcceptance));
  CHECK(fs::exists(d / "results.csv"));
  CHECK(fs::exists(d / "summary.txt"));
  CHECK(slurp(d / "summary.txt").find("overall") != std::string::npos);
}

TEST_CASE("cli: an unwritable output directory is a validation error") {
  std::string out, err;
  CHECK(cli({"sample", "--seed", "1", "--out", "/proc/beadlab_forbidden"}, &out, &err) == kExitValidation);
}
