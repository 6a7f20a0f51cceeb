#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tubeforge/cli.hpp"
#include "tubeforge/config.hpp"
#include "tubeforge/errors.hpp"

using namespace tubeforge;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path write_config(const std::string& name, const SprayConfig& config) {
  const fs::path path = fs::temp_directory_path() / ("tubeforge_test_" + name + ".json");
  std::ofstream(path) << dump_spray_config(config);
  return path;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const fs::path& cantor_path() {
  static const fs::path path = write_config("cantor", to_config(cantor_spray()));
  return path;
}

const fs::path& square_path() {
  static const fs::path path = write_config("square", to_config(unit_square_spray()));
  return path;
}

}  // namespace

TEST_CASE("grid parsing") {
  auto spec = cli::parse_grid("0.01:0.1:10:log");
  CHECK(spec.count == 10);
  CHECK(spec.spacing == cli::Spacing::Log);
  auto grid = cli::make_grid(spec);
  REQUIRE(grid.size() == 10);
  CHECK(grid.front() == 0.01);
  CHECK(grid.back() == 0.1);
  CHECK(grid[1] / grid[0] == doctest::Approx(grid[2] / grid[1]));

  grid = cli::make_grid(cli::parse_grid("0.1:0.2:3:linear"));
  CHECK(grid[1] == doctest::Approx(0.15));
  CHECK(cli::make_grid(cli::parse_grid("0.3:0.4:1")) == std::vector<double>{0.3});

  CHECK_THROWS_AS(cli::parse_grid("0:1:4"), Error);
  CHECK_THROWS_AS(cli::parse_grid("0.1:1:0"), Error);
  CHECK_THROWS_AS(cli::parse_grid("0.1:1:2.5"), Error);
  CHECK_THROWS_AS(cli::parse_grid("0.1:1"), Error);
  CHECK_THROWS_AS(cli::parse_grid("0.1:1:3:cubic"), Error);
  CHECK_THROWS_AS(cli::parse_grid("a:1:3"), Error);
}

TEST_CASE("exit codes") {
  CHECK(cli::exit_code(ErrorKind::Validation) == 2);
  CHECK(cli::exit_code(ErrorKind::Domain) == 2);
  CHECK(cli::exit_code(ErrorKind::Convergence) == 3);
  CHECK(cli::exit_code(ErrorKind::BoundaryProximity) == 3);
  CHECK(cli::exit_code(ErrorKind::Resource) == 4);
}

TEST_CASE("dim") {
  auto r = invoke({"--config", cantor_path().string(), "dim"});
  CHECK(r.code == 0);
  auto rows = lines(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "# tubeforge-csv v1");
  CHECK(rows[1] == "dimension,residual,iterations");
  CHECK(rows[2].rfind("0.630929753571457", 0) == 0);

  r = invoke({"--config", cantor_path().string(), "--format", "json", "dim"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"dimension\": 0.630929753571457") != std::string::npos);
}

TEST_CASE("validate") {
  CHECK(invoke({"--config", cantor_path().string(), "validate"}).code == 0);
  SprayConfig broken = to_config(cantor_spray());
  broken.volume = 0.4;
  const auto path = write_config("broken", broken);
  const auto r = invoke({"--config", path.string(), "validate"});
  CHECK(r.code == 2);
  CHECK(r.out.find("continuity") != std::string::npos);
  CHECK(invoke({"--config", path.string(), "dim"}).code == 2);
  CHECK(invoke({"--config", path.string(), "--skip-validation", "dim"}).code == 0);
}

TEST_CASE("tube methods") {
  auto r = invoke({"--config", cantor_path().string(), "tube", "--eps", "0.1", "--method", "both",
                   "--pairs", "500"});
  CHECK(r.code == 0);
  auto rows = lines(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == "epsilon,direct,residues,abs_err,rel_err,pairs_used,im_leakage");
  CHECK(rows[2].find(",0.866666666666666") != std::string::npos);
  CHECK(rows[2].find(",500,") != std::string::npos);

  r = invoke({"--config", cantor_path().string(), "tube", "--eps", "0.1", "--method", "direct"});
  CHECK(lines(r.out).at(2).rfind("0.10000000000000001,0.866666666666666", 0) == 0);

  r = invoke({"--config", cantor_path().string(), "tube", "--eps", "0.2", "--method", "residues"});
  CHECK(r.code == 2);
  CHECK(r.err.find("eps < g") != std::string::npos);

  r = invoke({"--config", cantor_path().string(), "tube", "--eps", "0.25", "--method", "invmellin"});
  CHECK(r.code == 0);

  r = invoke({"--config", cantor_path().string(), "tube", "--eps", "0.1", "--method", "invmellin",
              "--c", "0.5"});
  CHECK(r.code == 2);

  r = invoke({"--config", cantor_path().string(), "tube", "--eps", "0.1", "--method", "magic"});
  CHECK(r.code == 2);
}

TEST_CASE("czeros") {
  const auto r = invoke({"--config", square_path().string(), "czeros", "--T", "10"});
  CHECK(r.code == 0);
  CHECK(r.out.front() == '[');
  CHECK(r.out.find("\"multiplicity\": 1") != std::string::npos);
  CHECK(invoke({"--config", square_path().string(), "czeros"}).code == 2);
}

TEST_CASE("scan records errors per row") {
  const auto r = invoke({"--config", cantor_path().string(), "scan", "--grid", "0.01:0.3:4:log",
                         "--pairs", "50"});
  CHECK(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[5].rfind("# epsilon=0.29999999999999999 error:", 0) == 0);
}

TEST_CASE("output file and usage errors") {
  const fs::path out = fs::temp_directory_path() / "tubeforge_test_out.csv";
  fs::remove(out);
  auto r = invoke({"--config", cantor_path().string(), "--output", out.string(), "dim"});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(fs::exists(out));

  CHECK(invoke({}).code == 2);
  CHECK(invoke({"bogus"}).code == 2);
  CHECK(invoke({"dim"}).code == 2);
  CHECK(invoke({"--config", "/nonexistent.json", "dim"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("resource guard maps to exit 4") {
  // nine distinct ratios: letter multisets grow like depth^8
  SprayConfig dense{1, {}, {2.0}, 0.5, 1.0};
  for (int j = 0; j < 9; ++j) dense.ratios.push_back(0.1 + 0.001 * j);
  const auto path = write_config("dense", dense);
  const auto r = invoke({"--config", path.string(), "tube", "--eps", "1e-300", "--method", "direct"});
  CHECK(r.code == 4);
}

TEST_CASE("binary is deterministic") {
  const std::string cmd = std::string(TUBEFORGE_CLI_PATH) + " --config " + square_path().string() +
                          " scan --grid 0.001:0.4:6:log --pairs 100";
  auto capture = [&](const std::string& env) {
    std::string text;
    FILE* pipe = popen((env + " " + cmd).c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    while (std::size_t n = std::fread(buffer, 1, sizeof buffer, pipe)) text.append(buffer, n);
    CHECK(pclose(pipe) == 0);
    return text;
  };
  const auto a = capture("TUBEFORGE_THREADS=1");
  CHECK(a == capture("TUBEFORGE_THREADS=4"));
  CHECK(a == capture("TUBEFORGE_THREADS=1"));
}
