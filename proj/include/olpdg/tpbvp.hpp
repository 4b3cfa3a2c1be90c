#pragma once

// Two-point boundary value structure of the pooled LQ problem under the affine
// co-state ansatz lambda_k = H_k x_k + beta_k.

#include "olpdg/game.hpp"
#include "olpdg/potential.hpp"

namespace olpdg {

/// Backward Riccati-type pass. Entries indexed [k] for k < K refer to the
/// transition k -> k+1: Gamma[k] = I + S_k H_{k+1}, and G_next[k] holds
/// G_{k+1} = A_k' - A_k' H_{k+1} Gamma[k]^{-1} S_k.
struct BackwardPass {
  MatrixSeq H;       // K+1, H[K] = Q_K
  MatrixSeq Gamma;   // K
  MatrixSeq S;       // K, B R^{-1} B'
  MatrixSeq Abar;    // K, Gamma^{-1} A
  MatrixSeq Bbar;    // K, -Gamma^{-1} S
  MatrixSeq G_next;  // K
  std::vector<double> gamma_rcond;

  int horizon() const { return static_cast<int>(Gamma.size()); }
};

// Minimum accepted reciprocal condition number of each Gamma.
inline constexpr double kGammaRcondMin = 1e-12;

// Throws NumericalError naming the stage when a Gamma is (nearly) singular.
BackwardPass backward_pass(const OcpData& ocp, const LqGame& game);

// Costate transition G_{k+1} ... G_tau (identity when k == tau).
Matrix psi(const BackwardPass& pass, int k, int tau);

// State transition Abar_{k-1} ... Abar_rho (identity when rho == k).
Matrix phi(const BackwardPass& pass, int rho, int k);

/// x_stack = Phi0 x0 + Phi1 p_stack + Phi2 y_stack over stages 1..K, with
/// y ordered (v_1, mu_1, ..., v_K, mu_K).
struct AffineMaps {
  Matrix Phi0;  // K n x n
  Matrix Phi1;  // K n x K n
  Matrix Phi2;  // K n x K (s + l)
};

AffineMaps assemble_affine_maps(const BackwardPass& pass, const OcpData& ocp,
                                const LqGame& game);

// beta_k for k = 0..K given constraint controls and multipliers at every stage.
VectorSeq beta_sequence(const BackwardPass& pass, const OcpData& ocp, const LqGame& game,
                        const VectorSeq& v, const VectorSeq& mu);

// Forward recovery of states, controls and co-states.
EquilibriumTrajectory recover_trajectory(const BackwardPass& pass, const OcpData& ocp,
                                         const LqGame& game, const VectorSeq& v,
                                         const VectorSeq& mu);

// Same, with stages 1..K taken from the stacked LCP vector y and stage 0 given
// separately.
EquilibriumTrajectory recover_trajectory(const BackwardPass& pass, const OcpData& ocp,
                                         const LqGame& game, const Vector& y,
                                         const Vector& v0, const Vector& mu0);

// Splits a stacked (v_1, mu_1, ..., v_K, mu_K) vector into per-stage v and mu
// (stage 0 entries taken from v0, mu0).
void unstack(const Vector& y, const Dims& dims, const Vector& v0, const Vector& mu0,
             VectorSeq& v, VectorSeq& mu);

}  // namespace olpdg
