#include <doctest.h>

#include "olpdg/pipeline.hpp"
#include "olpdg/potential.hpp"
#include "olpdg/smartgrid.hpp"
#include "support.hpp"

using namespace olpdg;
using namespace olpdg::testing;
using namespace olpdg::smartgrid;

TEST_SUITE("smartgrid") {
  TEST_CASE("default scenario values") {
    const Scenario sc = default_scenario();
    CHECK(sc.S == 3);
    CHECK(sc.N == 2);
    CHECK(sc.K == 12);
    CHECK(sc.Kmax == std::vector<double>{11.2, 12.2});
    CHECK(sc.a[0] == std::vector<double>{3.4, 4.0});
    CHECK(sc.q[sc.K] == 2.5);
    CHECK(sc.eps[0] == 3.5);
    CHECK(sc.X0 == Vector::Constant(3, 4.0));
    CHECK_NOTHROW(sc.check());
  }

  TEST_CASE("game dimensions") {
    const LqGame g = to_nzdg(default_scenario());
    CHECK(g.dims.n == 6);
    CHECK(g.dims.m == std::vector<int>{2, 2});
    CHECK(g.dims.s == std::vector<int>{1, 1});
    CHECK(g.dims.l == 3);
    CHECK(validate(g).valid());
    CHECK(check_conditions(g).is_potential);
  }

  TEST_CASE("invalid scenario is rejected") {
    Scenario sc = default_scenario();
    sc.Kmax[0] = -1.0;
    CHECK_THROWS_AS(sc.check(), std::invalid_argument);
    sc = default_scenario();
    sc.q.pop_back();
    CHECK_THROWS_AS(to_nzdg(sc), std::invalid_argument);
  }

  TEST_CASE("one user is a single-player game") {
    Scenario sc = default_scenario();
    sc.N = 1;
    sc.m = {2};
    for (auto& row : sc.Btilde) row.resize(1);
    for (auto& row : sc.P) row.resize(1);
    for (auto& row : sc.rcost) row.resize(1);
    for (auto& row : sc.b) row.resize(1);
    for (auto& row : sc.a) row.resize(1);
    for (auto& L : sc.Ltilde) L = Matrix(L.leftCols(1));
    sc.Kmax.resize(1);
    const LqGame g = to_nzdg(sc);
    CHECK(g.dims.N == 1);
    CHECK(g.dims.l == 2);
    const Equilibrium eq = solve_equilibrium(g);
    CHECK(eq.lcp_solution.status == LcpStatus::solved);
  }

  TEST_CASE("report decomposition matches the game cost") {
    const Scenario sc = default_scenario();
    const LqGame g = to_nzdg(sc);
    const Equilibrium eq = solve_equilibrium(g);
    const Report rep = extract_report(eq.trajectory, sc);
    const Rollout ro = simulate(g, eq.trajectory.u, eq.trajectory.v);
    for (int i = 0; i < sc.N; ++i)
      CHECK(rep.total_cost[i] == doctest::Approx(ro.costs[i]).epsilon(1e-9));
    for (int k = 0; k <= sc.K; ++k) {
      CHECK(rep.storage_margin[k] >= -1e-9);
      for (int i = 0; i < sc.N; ++i) {
        CHECK(rep.battery[k][i] >= -1e-9);
        CHECK(rep.battery[k][i] <= sc.Kmax[i] + 1e-9);
      }
    }
  }

  TEST_CASE("unmet demand and consumption convert both ways") {
    const Scenario sc = default_scenario();
    const Equilibrium eq = solve_equilibrium(to_nzdg(sc));
    const Report rep = extract_report(eq.trajectory, sc);
    for (int k = 0; k < sc.K; ++k) {
      const Vector X = eq.trajectory.x[k].head(sc.S);
      for (int i = 0; i < sc.N; ++i) {
        const Vector u = sc.P[k][i] * X - rep.consumption[k][i];
        CHECK(max_abs(Vector(u - eq.trajectory.u[k].segment(2 * i, 2))) <= 1e-12);
      }
    }
  }

  TEST_CASE("report rejects a mismatched horizon") {
    const Scenario sc = default_scenario();
    EquilibriumTrajectory t;
    t.x.assign(3, Vector::Zero(6));
    CHECK_THROWS_AS(extract_report(t, sc), std::invalid_argument);
  }

  TEST_CASE("property: storage grows with the user's incentive") {
    double prev = -1.0;
    for (const double scale : {0.6, 0.8, 1.0, 1.2, 1.4}) {
      Scenario sc = default_scenario();
      for (auto& a : sc.a) a[1] *= scale;
      const Equilibrium eq = solve_equilibrium(to_nzdg(sc));
      const double total = extract_report(eq.trajectory, sc).total_storage(1);
      CHECK(total >= prev - 1e-9);
      prev = total;
    }
  }
}
