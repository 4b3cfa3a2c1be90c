#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "olpdg/io.hpp"
#include "olpdg/pipeline.hpp"
#include "olpdg/verify.hpp"
#include "support.hpp"

using namespace olpdg;
using namespace olpdg::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kData = OLPDG_TEST_DATA_DIR;
const std::string kCli = OLPDG_CLI_PATH;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("olpdg_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

int count_lines(const std::string& text) {
  return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

void check_same(const LqGame& a, const LqGame& b) {
  CHECK(a.dims.n == b.dims.n);
  CHECK(a.dims.m == b.dims.m);
  CHECK(a.dims.s == b.dims.s);
  CHECK(a.x0 == b.x0);
  for (int k = 0; k <= a.dims.K; ++k) {
    CHECK(a.M[k] == b.M[k]);
    CHECK(a.Ncon[k] == b.Ncon[k]);
    CHECK(a.r[k] == b.r[k]);
    for (int i = 0; i < a.dims.N; ++i) {
      CHECK(a.Q[k][i] == b.Q[k][i]);
      CHECK(a.p[k][i] == b.p[k][i]);
      CHECK(a.D[k][i] == b.D[k][i]);
      CHECK(a.d[k][i] == b.d[k][i]);
      CHECK(a.L[k][i] == b.L[k][i]);
      if (k < a.dims.K) {
        CHECK(a.R[k][i] == b.R[k][i]);
        CHECK(a.B[k][i] == b.B[k][i]);
      }
    }
    if (k < a.dims.K) CHECK(a.A[k] == b.A[k]);
  }
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("bundled default scenario matches the built-in one") {
    const auto doc = io::load_game(kData / "smartgrid_default.json");
    REQUIRE(std::holds_alternative<smartgrid::Scenario>(doc));
    const auto& sc = std::get<smartgrid::Scenario>(doc);
    const smartgrid::Scenario ref = smartgrid::default_scenario();
    CHECK(io::to_json(sc) == io::to_json(ref));
    check_same(smartgrid::to_nzdg(sc), smartgrid::to_nzdg(ref));
  }

  TEST_CASE("missing field is named") {
    const std::string text =
        R"({"schema": 1, "kind": "lq_game", "dims": {"n": 1, "N": 1, "m": [1], "s": [1], "l": 1}})";
    try {
      io::parse_game(text);
      FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("missing field \"K\"") != std::string::npos);
    }
  }

  TEST_CASE("malformed input is a parse error") {
    CHECK_THROWS_WITH_AS(io::parse_game("{not json"), doctest::Contains("parse error"),
                         std::invalid_argument);
    CHECK_THROWS_AS(io::parse_game(R"({"schema": 2, "kind": "lq_game"})"), std::invalid_argument);
  }

  TEST_CASE("doubles survive formatting") {
    for (const double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
      CHECK(std::stod(io::format_double(x)) == x);
    }
  }

  TEST_CASE("property: JSON round trip is exact") {
    Rng rng(71);
    for (int t = 0; t < 20; ++t) {
      const Dims d = random_dims(rng, 3, 3, 3, 2, 2, 2);
      const LqGame g = random_potential_game(rng, d);
      const auto doc = io::parse_game(io::to_json(g));
      REQUIRE(std::holds_alternative<LqGame>(doc));
      check_same(g, std::get<LqGame>(doc));
    }
  }

  TEST_CASE("trajectory CSV round trip and re-verification") {
    const LqGame g = smartgrid::to_nzdg(smartgrid::default_scenario());
    const Equilibrium eq = solve_equilibrium(g);
    const std::string csv = io::trajectory_csv(eq.trajectory, g.dims);
    CHECK(count_lines(csv) == g.dims.K + 2);
    const EquilibriumTrajectory back = io::parse_trajectory_csv(csv, g.dims);
    for (int k = 0; k <= g.dims.K; ++k) {
      CHECK(back.x[k] == eq.trajectory.x[k]);
      CHECK(back.v[k] == eq.trajectory.v[k]);
      CHECK(back.lambda[k] == eq.trajectory.lambda[k]);
      CHECK(back.mu[k] == eq.trajectory.mu[k]);
      if (k < g.dims.K) CHECK(back.u[k] == eq.trajectory.u[k]);
    }
    const double a = kkt_residuals(eq.ocp, g, eq.trajectory).scaled();
    const double b = kkt_residuals(eq.ocp, g, back).scaled();
    CHECK(std::abs(a - b) <= 1e-12);
  }

  TEST_CASE("LCP CSV has one row per coordinate") {
    const LqGame g = smartgrid::to_nzdg(smartgrid::default_scenario());
    const Equilibrium eq = solve_equilibrium(g);
    const std::string csv = io::lcp_csv(eq.lcp, eq.lcp_solution);
    CHECK(count_lines(csv) == eq.lcp.size() + 1);
    CHECK(csv.rfind("index,stage,kind,player,component,z,w\n", 0) == 0);
  }

  TEST_CASE("CLI solve writes the trajectory") {
    const fs::path out = scratch("solve");
    CHECK(run_cli("solve --input " + (kData / "smartgrid_default.json").string() + " --out " +
                  out.string()) == 0);
    const std::string csv = io::read_file(out / "trajectory.csv");
    CHECK(count_lines(csv) == 14);  // header + 13 stages
    CHECK(fs::exists(out / "lcp.csv"));
    CHECK(fs::exists(out / "report.json"));
  }

  TEST_CASE("CLI exit codes") {
    const fs::path out = scratch("codes");
    CHECK(run_cli("check --input " + (out / "absent.json").string()) == 1);

    Rng rng(72);
    Dims d;
    d.n = 2;
    d.N = 2;
    d.K = 2;
    d.m = {1, 1};
    d.s = {1, 1};
    d.l = 1;
    const fs::path bad = out / "bad.json";
    io::save_game(bad, break_potential(rng, random_potential_game(rng, d)));
    CHECK(run_cli("check --input " + bad.string() + " --out " + out.string()) == 2);

    const fs::path good = out / "good.json";
    io::save_game(good, random_potential_game(rng, d));
    CHECK(run_cli("check --input " + good.string() + " --out " + out.string()) == 0);
  }

  TEST_CASE("CLI sweep creates one run per scale") {
    const fs::path out = scratch("sweep");
    CHECK(run_cli("sweep --param a2 --scale 0.8,1.0,1.2 --out " + out.string()) == 0);
    int runs = 0;
    for (const auto& e : fs::directory_iterator(out))
      if (e.is_directory() && e.path().filename().string().rfind("run_", 0) == 0) ++runs;
    CHECK(runs == 3);
    CHECK(count_lines(io::read_file(out / "sweep_summary.csv")) == 4);
  }

  TEST_CASE("CLI output is deterministic") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    const std::string in = (kData / "smartgrid_default.json").string();
    REQUIRE(run_cli("verify --input " + in + " --seed 3 --out " + a.string()) == 0);
    REQUIRE(run_cli("verify --input " + in + " --seed 3 --out " + b.string()) == 0);
    CHECK(io::read_file(a / "trajectory.csv") == io::read_file(b / "trajectory.csv"));
    CHECK(io::read_file(a / "report.json") == io::read_file(b / "report.json"));
  }
}
