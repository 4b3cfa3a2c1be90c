#pragma once

// Certificates for a computed equilibrium: first-order residuals of the pooled
// problem, the second-order sufficiency test, and per-player best responses.

#include <cstdint>
#include <string>
#include <vector>

#include "olpdg/game.hpp"
#include "olpdg/lcp.hpp"
#include "olpdg/potential.hpp"

namespace olpdg {

struct KktReport {
  double stationarity_u = 0.0;
  double dynamics = 0.0;
  double costate = 0.0;          // interior stages
  double costate_terminal = 0.0;
  double comp_v = 0.0;
  double comp_mu = 0.0;
  double scale = 1.0;  // 1 + largest data or trajectory entry

  double max_residual() const;
  double scaled() const { return max_residual() / scale; }
};

KktReport kkt_residuals(const OcpData& ocp, const LqGame& game,
                        const EquilibriumTrajectory& traj);

/// Backward pass of the value function 1/2 x'E_k x + e_k'x + w_k of the pooled
/// problem with v and mu frozen.
struct SufficiencyPass {
  MatrixSeq E;                  // K+1
  VectorSeq e;                  // K+1
  std::vector<double> w;        // K+1
  MatrixSeq T;                  // K, R_k + B_k'E_{k+1}B_k
  std::vector<bool> T_invertible;
  std::vector<double> T_rcond;

  bool complete() const;
};

inline constexpr double kTRcondMin = 1e-12;

SufficiencyPass sufficiency_pass(const OcpData& ocp, const LqGame& game, const VectorSeq& v_star,
                                 const VectorSeq& mu_star);

enum class Definiteness { pd, semidefinite, indefinite, not_computed };

const char* to_string(Definiteness d);

/// Hessian of the condensed objective in (u_0..u_{K-1}, v_0..v_K):
///   H = [[Y, C], [C', Dblk]],  C block (l, k) = B_l'A_{l+1}'...A_{k-1}'L_k for l < k.
struct HessianData {
  Matrix Y;
  Matrix C;
  Matrix Dblk;
  Matrix H;
  Definiteness definiteness = Definiteness::not_computed;
  double min_pivot = 0.0;

  bool pd() const { return definiteness == Definiteness::pd; }
};

HessianData build_hessian(const OcpData& ocp, const LqGame& game, const SufficiencyPass& suff);

// Condensed objective: states eliminated through the dynamics from game.x0.
double condensed_objective(const OcpData& ocp, const LqGame& game, const VectorSeq& u,
                           const VectorSeq& v);

struct BestResponse {
  int player = 0;
  // J^i(best response) - J^i(trajectory): about zero at a Nash equilibrium,
  // negative when player i can improve.
  double gap = 0.0;
  double trajectory_cost = 0.0;
  double best_cost = 0.0;
  // Largest cost decrease found by random feasible perturbations (>= 0).
  double sampled_improvement = 0.0;
  int feasible_trials = 0;
  EquilibriumTrajectory best;
};

struct BestResponseOptions {
  int trials = 64;
  std::uint64_t seed = 1;
  double perturbation = 1e-2;
  LemkeOptions lemke;
};

// Player i's constrained single-player problem with the opponents' controls
// fixed, solved by the same pipeline. Inner failures surface as PipelineError.
BestResponse best_response_check(const LqGame& game, const EquilibriumTrajectory& traj, int i,
                                 const BestResponseOptions& options = {});

// Single-player game faced by player i. The state is augmented by a constant
// 1 carrying the opponents' drift; the control is the deviation of u^i from
// the minimizer of player i's u-cost given the opponents' controls.
struct BestResponseProblem {
  LqGame game;
  VectorSeq u_shift;  // K, added back to the control
};

BestResponseProblem best_response_problem(const LqGame& game, const EquilibriumTrajectory& traj,
                                          int i);

struct CertifyOptions {
  double kkt_tol = 1e-8;
  double gap_tol = 1e-6;
  BestResponseOptions best_response;
};

struct Certificate {
  KktReport kkt;
  SufficiencyPass suff;
  HessianData hessian;
  std::vector<BestResponse> best_responses;
  std::vector<std::string> failures;

  bool kkt_ok = false;
  bool hessian_pd = false;
  bool nash_ok = false;

  bool passed() const { return kkt_ok && hessian_pd && nash_ok; }
};

Certificate certify(const OcpData& ocp, const LqGame& game, const EquilibriumTrajectory& traj,
                    const CertifyOptions& options = {});

}  // namespace olpdg
