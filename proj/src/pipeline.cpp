#include "olpdg/pipeline.hpp"

namespace olpdg {

Equilibrium solve_equilibrium(const LqGame& game, const SolveOptions& options) {
  const ValidationReport rep = validate(game);
  if (!rep.valid()) throw PipelineError("validate", rep.violations.front());

  Equilibrium eq;
  eq.potential = check_conditions(game, options.potential_tol);
  if (!eq.potential.is_potential) {
    throw PipelineError("potential_check", to_string(eq.potential.violations.front()));
  }
  eq.ocp = build_ocp(game, options.potential_tol);

  try {
    eq.pass = backward_pass(eq.ocp, game);
  } catch (const NumericalError& e) {
    throw PipelineError("backward_pass", e.what());
  }
  eq.maps = assemble_affine_maps(eq.pass, eq.ocp, game);
  eq.lcp = assemble_lcp(assemble_stage_blocks(eq.ocp, game), eq.maps, game, eq.ocp);
  eq.lcp_solution = lemke_solve(eq.lcp, options.lemke);
  if (eq.lcp_solution.status != LcpStatus::solved) {
    throw PipelineError("lcp", std::string(to_string(eq.lcp_solution.status)) +
                                   ": no equilibrium certificate at this tolerance" +
                                   (eq.lcp_solution.diagnostics.empty()
                                        ? ""
                                        : " (" + eq.lcp_solution.diagnostics + ")"));
  }
  eq.stage0 = solve_stage0(eq.ocp, game, game.x0, options.lemke);
  if (eq.stage0.lcp.status != LcpStatus::solved) {
    throw PipelineError("stage0", eq.stage0.lcp.diagnostics);
  }
  eq.trajectory = recover_trajectory(eq.pass, eq.ocp, game, eq.lcp_solution.z, eq.stage0.v,
                                     eq.stage0.mu);
  return eq;
}

}  // namespace olpdg
