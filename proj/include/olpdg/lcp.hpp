#pragma once

// Linear complementarity problems: find z >= 0 with w = Mz + q >= 0 and
// z'w = 0.

#include <string>
#include <vector>

#include "olpdg/game.hpp"
#include "olpdg/potential.hpp"
#include "olpdg/tpbvp.hpp"

namespace olpdg {

enum class LcpStatus { solved, ray_termination, max_pivots, infeasible_stage };

const char* to_string(LcpStatus status);

struct LcpLabel {
  enum class Kind { v, mu };
  int stage = 0;
  Kind kind = Kind::v;
  int player = -1;  // owning player for v entries, -1 for multipliers
  int index = 0;    // component within the stage block
};

struct LcpProblem {
  Matrix M;
  Vector q;
  std::vector<LcpLabel> labels;  // optional

  int size() const { return static_cast<int>(q.size()); }
};

struct LcpSolution {
  Vector z;
  Vector w;
  LcpStatus status = LcpStatus::solved;
  int pivots = 0;
  std::string diagnostics;

  // Indices with z_i > tol.
  std::vector<int> active_set(double tol = 1e-9) const;
};

// 0 <= z, 0 <= w, |z'w| <= tol (1 + |z||w|).
bool is_complementary(const Vector& z, const Vector& w, double tol = 1e-9);

struct LemkeOptions {
  int max_pivots = 0;       // 0 selects 50 d + 100
  double tol = 1e-9;        // complementarity acceptance
  double pivot_tol = 1e-12; // smallest usable pivot magnitude
};

/// Lemke's complementary pivot method with a unit covering vector and
/// lexicographic ratio tests. On success the basic solution is polished by
/// re-solving the complementary linear system of the final basis.
LcpSolution lemke_solve(const LcpProblem& problem, const LemkeOptions& options = {});

inline constexpr int kEnumerationMaxSize = 20;

/// Every complementary solution, found by trying all 2^d complementary bases.
/// Throws std::invalid_argument for d > kEnumerationMaxSize.
std::vector<LcpSolution> enumerate_solve(const LcpProblem& problem, double tol = 1e-9);

/// Block-diagonal stage structure of stages 1..K:
///   Mtilde = (+)_k [[D_k, -N_k'], [N_k, 0]]
///   qtilde = (+)_k [L_k'; M_k]
///   stilde = (d_1, r_1, ..., d_K, r_K)
struct StageBlocks {
  Matrix Mtilde;
  Matrix qtilde;
  Vector stilde;
};

StageBlocks assemble_stage_blocks(const OcpData& ocp, const LqGame& game);

// Aggregated problem M = Mtilde + qtilde Phi2, q = qtilde (Phi0 x0 + Phi1 p) + stilde.
LcpProblem assemble_lcp(const StageBlocks& blocks, const AffineMaps& maps, const LqGame& game,
                        const OcpData& ocp);

// Stage-k problem parametrized by a given state x.
LcpProblem stage_problem(const OcpData& ocp, const LqGame& game, int k, const Vector& x);

struct StageSolution {
  Vector v;
  Vector mu;
  LcpSolution lcp;
};

// Stage-0 problem at the initial state; status infeasible_stage if Lemke
// fails.
StageSolution solve_stage0(const OcpData& ocp, const LqGame& game, const Vector& x0,
                           const LemkeOptions& options = {});

}  // namespace olpdg
