#include <doctest.h>

#include <algorithm>
#include <charconv>
#include <clocale>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

using namespace riddled;
using namespace riddled::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("riddled_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_exe(const std::string& args) {
  const std::string cmd = std::string(RIDDLED_SPIN_EXE) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const char* kSmall = R"({
  "seed": 5,
  "duffing": {"sections": 300},
  "basin_grid": {"nx": 8, "ny": 8, "centered": true},
  "tol_scan": {"x_points": 8, "n_max": 3},
  "fraction": {"samples": 20, "n_y": 6, "lyapunov": {"n_windows": 50}},
  "spin": {"ensemble": {"n": 30}, "angles": ["pi/8", "3pi/8"], "grid": {"nx": 6, "ny": 6}},
  "bell": {"ensemble": {"n": 12}}
})";

}  // namespace

TEST_CASE("angles in configs") {
  CHECK(parse_angle(json("3pi/8")).angle == Angle::pi_fraction(3, 8));
  CHECK(parse_angle(json("-pi/2")).angle == Angle::pi_fraction(3, 2));
  CHECK(parse_angle(json("pi")).angle == Angle::half_turn());
  CHECK(parse_angle(json("0")).angle == Angle{});
  CHECK(parse_angle(json(0)).angle == Angle{});
  CHECK(std::abs(parse_angle(json(1.0)).angle.radians() - 1.0) < 1e-15);
  CHECK(parse_angle(json("3pi/8")).text == "3pi/8");
  CHECK_THROWS_AS(parse_angle(json("3 apples")), ConfigError);
  CHECK_THROWS_AS(parse_angle(json("pi/0")), ConfigError);
  CHECK_THROWS_AS(parse_angle(json::array()), ConfigError);
}

TEST_CASE("config parsing") {
  const auto d = parse_config(json::object());
  CHECK(d.seed == default_config().seed);
  CHECK(d.system.xbar == 1.81);
  CHECK(d.capture.delta_y == 1e-3);

  const auto c = parse_config(json::parse(kSmall));
  CHECK(c.seed == 5);
  CHECK(c.basin_grid.grid.nx == 8);
  CHECK(c.spin.angles.size() == 2);
  CHECK(c.spin.angles[1].angle == Angle::pi_fraction(3, 8));
  CHECK(c.control().tol == c.step.tol0);

  const auto t = parse_config(json::parse(R"({"tol_index": 4, "step": {"tol0": 1e-3}})"));
  CHECK(t.control().tol == doctest::Approx(2.5e-4));

  // The resolved config round-trips.
  const auto back = parse_config(to_json(c));
  CHECK(to_json(back) == to_json(c));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config(json::parse(R"({"sead": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"system": {"gama": 0.1}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"fraction": {"lyapunov": {"windows": 3}}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"system": {"gamma": -1}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"system": {"gamma": "big"}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"tol_index": 0})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"basin_grid": {"nx": 0}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"spin": {"ensemble": {"rho_theta": "spread"}}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"bell": {"angles": ["pi/2", "pi"]}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse("[1, 2]")), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/riddled.json"), ConfigError);
}

TEST_CASE("number formatting is locale independent") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-20) == "-2.4999999999999999e-20");
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  std::setlocale(LC_ALL, "de_DE.UTF-8");  // may be unavailable; harmless then
  CHECK(format_double(1.5) == "1.5");
  std::setlocale(LC_ALL, "C");
  for (double v : {kPi, 1e300, -7.25e-310, 123456789.123456789}) {
    const auto text = format_double(v);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == v);
  }
}

TEST_CASE("csv and pgm writers") {
  Csv csv({"a", "b"});
  csv.cell(1.5).cell(std::string("x"));
  csv.end_row();
  csv.cell(-1).cell(0.25);
  csv.end_row();
  CHECK(csv.str() == "a,b\n1.5,x\n-1,0.25\n");

  GridResult g;
  g.spec.nx = 3;
  g.spec.ny = 1;
  g.labels = {BasinLabel::CPlus, BasinLabel::CMinus, BasinLabel::Unresolved};
  const auto pgm = pgm_bytes(g);
  CHECK(pgm == std::string("P5 3 1 255\n") + std::string("\x00\xff\x80", 3));
  g.spec.nx = 20;
  g.spec.ny = 20;
  g.labels.assign(400, BasinLabel::CPlus);
  CHECK(pgm_bytes(g).substr(0, 13) == "P5 20 20 255\n");
  CHECK(pgm_bytes(g).size() == 13 + 400);

  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ConfigError("x")) == 2);
  CHECK(exit_code_for(Error(ErrorCode::InvalidArgument, "x")) == 2);
  CHECK(exit_code_for(Error(ErrorCode::StepUnderflow, "x")) == 3);
  CHECK(exit_code_for(Error(ErrorCode::NonFinite, "x")) == 3);
  CHECK(exit_code_for(Error(ErrorCode::Unbounded, "x")) == 3);
  CHECK(exit_code_for(Error(ErrorCode::DegenerateSample, "x")) == 4);
  CHECK(exit_code_for(Error(ErrorCode::InsufficientData, "x")) == 4);
  CHECK(exit_code_for(std::runtime_error("x")) == 1);

  const auto dir = scratch("exit");
  std::ofstream(dir / "bad.json") << R"({"unknown": 1})";
  CHECK(run_exe("duffing " + (dir / "bad.json").string() + " --out " + (dir / "o").string()) == 2);
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK(run_exe("duffing " + (dir / "broken.json").string()) == 2);
  CHECK(run_exe("nosuchcommand x.json") == 2);
  std::ofstream(dir / "few.json") << R"({"fraction": {"samples": 5, "n_y": 3, "lyapunov": {"enabled": false}}})";
  CHECK(run_exe("fraction " + (dir / "few.json").string() + " --out " + (dir / "f").string()) == 4);
}

TEST_CASE("subcommands write their files and rerun byte for byte") {
  const auto dir = scratch("repro");
  const auto cfg = dir / "small.json";
  std::ofstream(cfg) << kSmall;
  for (const auto& name : subcommands()) {
    CAPTURE(name);
    const auto a = dir / (name + "_a"), b = dir / (name + "_b");
    REQUIRE(run_exe(name + " " + cfg.string() + " --out " + a.string()) == 0);
    REQUIRE(run_exe(name + " " + cfg.string() + " --out " + b.string() + " --threads 2") == 0);
    const auto manifest = json::parse(slurp(a / "manifest.json"));
    CHECK(manifest.contains("config"));
    CHECK(manifest["config"]["seed"] == 5);
    REQUIRE(manifest["outputs"].is_array());
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    for (const auto& f : manifest["outputs"]) {
      const std::string file = f["file"];
      const auto bytes = slurp(a / file);
      CHECK(bytes.size() == f["bytes"].get<std::size_t>());
      CHECK(sha256_hex(bytes) == f["sha256"].get<std::string>());
      CHECK(bytes == slurp(b / file));
    }
  }
  const auto sections = slurp(dir / "duffing_a" / "duffing_sections.csv");
  CHECK(std::count(sections.begin(), sections.end(), '\n') == 301);
  CHECK(sections.rfind("x,vx\n", 0) == 0);
  CHECK(slurp(dir / "basin-grid_a" / "basin_grid.pgm").rfind("P5 8 8 255\n", 0) == 0);
}
