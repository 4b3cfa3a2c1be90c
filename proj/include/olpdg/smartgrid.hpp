#pragma once

// Smart grid with user-owned battery storage, cast as a constrained LQ game.
//
// Resources X_k (S types) evolve as X_{k+1} = Atilde X_k + sum_i Btilde^i I_k^i,
// where I_k^i is user i's consumption (< 0) or contribution (> 0) across m_i
// activities. Each user stores K_k^i in a battery with
//   sum_i K_k^i <= sum_j X_k^j - eps_k,   0 <= K_k^i <= Kmax^i.
// The game state is x_k = (X_k, X_{k-1}), the dynamics control is the unmet
// demand u_k^i = P^i X_k - I_k^i, and the constraint control is v_k = K_k.

#include <vector>

#include "olpdg/game.hpp"

namespace olpdg::smartgrid {

struct Scenario {
  int S = 0;  // resource types
  int N = 0;  // users
  int K = 0;  // horizon
  std::vector<int> m;                 // activities per user
  MatrixSeq Atilde;                   // [k] S x S, k < K
  std::vector<MatrixSeq> Btilde;      // [k][i] S x m_i
  std::vector<MatrixSeq> P;           // [k][i] m_i x S demand matrices
  std::vector<double> q;              // K+1 resource-imbalance weights; q[K] is the salvage weight
  std::vector<std::vector<double>> rcost;  // [k][i] unmet-demand weights, k < K
  std::vector<std::vector<double>> b;      // [k][i] storage cost, k <= K
  std::vector<std::vector<double>> a;      // [k][i] user-specific storage incentive
  MatrixSeq Ltilde;                   // [k] S x N common incentive, k <= K
  std::vector<double> eps;            // K+1 storage headroom
  std::vector<double> Kmax;           // per-user battery capacity
  Vector X0;
  Vector Xminus1;

  // Throws std::invalid_argument on a dimension or positivity violation.
  void check() const;
};

// Two users, three resources, twelve stages.
Scenario default_scenario();

LqGame to_nzdg(const Scenario& sc);

struct Report {
  VectorSeq resources;                   // X_k, k = 0..K
  std::vector<VectorSeq> consumption;    // [k][i] I_k^i, k < K
  std::vector<std::vector<double>> battery;  // [k][i] K_k^i
  std::vector<double> storage_margin;    // sum X_k - eps_k - sum_i K_k^i
  // Per-user, per-stage cost components. unmet_demand and imbalance are zero
  // at k = K; salvage is nonzero only at k = K.
  std::vector<std::vector<double>> unmet_demand;
  std::vector<std::vector<double>> imbalance;
  std::vector<std::vector<double>> storage_cost;
  std::vector<std::vector<double>> incentive;
  std::vector<double> salvage;
  std::vector<double> total_cost;  // per user: salvage + sum(ud + ur) + sum(bs - ic)

  double total_storage(int i) const;
};

Report extract_report(const EquilibriumTrajectory& traj, const Scenario& sc);

}  // namespace olpdg::smartgrid
