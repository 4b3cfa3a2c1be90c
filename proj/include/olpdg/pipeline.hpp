#pragma once

// check -> build OCP -> backward pass -> LCP -> trajectory.

#include <stdexcept>
#include <string>

#include "olpdg/game.hpp"
#include "olpdg/lcp.hpp"
#include "olpdg/potential.hpp"
#include "olpdg/tpbvp.hpp"

namespace olpdg {

// A pipeline stage failed; stage() names it ("validate", "potential_check",
// "backward_pass", "lcp", "stage0").
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct SolveOptions {
  EqualityTolerance potential_tol;
  LemkeOptions lemke;
};

struct Equilibrium {
  PotentialReport potential;
  OcpData ocp;
  BackwardPass pass;
  AffineMaps maps;
  LcpProblem lcp;
  LcpSolution lcp_solution;
  StageSolution stage0;
  EquilibriumTrajectory trajectory;
};

Equilibrium solve_equilibrium(const LqGame& game, const SolveOptions& options = {});

}  // namespace olpdg
