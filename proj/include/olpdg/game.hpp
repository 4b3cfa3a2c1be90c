#pragma once

// Data model for N-player finite-horizon difference games with coupled
// inequality constraints.
//
// Stages run k = 0..K. Dynamics controls u exist for k < K; constraint
// controls v and multipliers mu exist for every k. Per-player containers are
// indexed [k][i] with 0-based players; human-readable messages print players
// 1-based.

#include <functional>
#include <string>
#include <vector>

#include "olpdg/linalg.hpp"

namespace olpdg {

struct Dims {
  int n = 0;  // state dimension
  int N = 0;  // players
  int K = 0;  // horizon, stages 0..K
  std::vector<int> m;  // per-player dynamics-control sizes
  std::vector<int> s;  // per-player constraint-control sizes
  int l = 0;           // constraint rows per stage

  int m_total() const;
  int s_total() const;
  int u_offset(int i) const;
  int v_offset(int i) const;

  // Throws std::invalid_argument when a structural invariant fails.
  void check() const;

  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Linear-quadratic game with coupled affine constraints.
///
///   x_{k+1} = A_k x_k + sum_i B_k^i u_k^i
///   M_k x_k + N_k v_k + r_k >= 0,  v_k >= 0
///   J^i = 1/2 x_K'Q_K^i x_K + p_K^i'x_K
///       + sum_{k<K} (1/2 x'Q_k^i x + p_k^i'x + 1/2 u_k'R_k^i u_k)
///       + sum_{k<=K} (1/2 v_k'D_k^i v_k + d_k^i'v_k + x_k'L_k^i v_k)
///
/// R^i and D^i act on the stacked control vectors of all players.
struct LqGame {
  Dims dims;
  MatrixSeq A;                    // [k] n x n, k < K
  std::vector<MatrixSeq> B;       // [k][i] n x m_i, k < K
  std::vector<MatrixSeq> Q;       // [k][i] n x n, k <= K
  std::vector<VectorSeq> p;       // [k][i] n
  std::vector<MatrixSeq> R;       // [k][i] m x m, k < K
  std::vector<MatrixSeq> D;       // [k][i] s x s
  std::vector<VectorSeq> d;       // [k][i] s
  std::vector<MatrixSeq> L;       // [k][i] n x s
  MatrixSeq M;                    // [k] l x n
  MatrixSeq Ncon;                 // [k] l x s
  VectorSeq r;                    // [k] l
  Vector x0;

  // All-zero game with correctly shaped members.
  static LqGame zeros(const Dims& dims);

  // [B^1 ... B^N] at stage k.
  Matrix stacked_B(int k) const;
};

/// A game given only through evaluation callbacks. At the terminal stage the
/// cost is called with an empty u.
struct NonlinearGame {
  using Dynamics = std::function<Vector(int k, const Vector& x, const Vector& u)>;
  using Constraint = std::function<Vector(int k, const Vector& x, const Vector& v)>;
  using Cost = std::function<double(int k, int i, const Vector& x, const Vector& u,
                                    const Vector& v)>;
  // Gradient of player i's stage cost with respect to (x, u, v) concatenated.
  using CostGradient = std::function<Vector(int k, int i, const Vector& x,
                                            const Vector& u, const Vector& v)>;

  Dims dims;
  Dynamics dynamics;
  Constraint constraint;
  Cost cost;
  CostGradient cost_gradient;  // optional
};

// Wraps an LQ game as callbacks; the analytic gradient is attached.
NonlinearGame as_nonlinear(const LqGame& game);

struct EquilibriumTrajectory {
  VectorSeq x;       // K+1 states
  VectorSeq u;       // K stacked dynamics controls
  VectorSeq v;       // K+1 stacked constraint controls
  VectorSeq lambda;  // K+1 co-states
  VectorSeq mu;      // K+1 constraint multipliers
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;  // tolerated asymmetries, symmetrized on load

  bool valid() const { return violations.empty(); }
};

ValidationReport validate(const LqGame& game);

// Replaces every Q, R, D whose asymmetry is within the tolerated round-off
// band by its symmetric part.
LqGame symmetrized(LqGame game);

struct Rollout {
  VectorSeq states;            // K+1
  Vector costs;                // per player
  std::vector<bool> feasible;  // per stage
};

// Rolls the dynamics forward and evaluates every player's cost.
Rollout simulate(const LqGame& game, const VectorSeq& u, const VectorSeq& v);

VectorSeq rollout_states(const LqGame& game, const VectorSeq& u);

// Stage cost of player i; at k == K the u argument is ignored.
double stage_cost(const LqGame& game, int k, int i, const Vector& x, const Vector& u,
                  const Vector& v);

double player_cost(const LqGame& game, int i, const VectorSeq& states, const VectorSeq& u,
                   const VectorSeq& v);

bool stage_feasible(const LqGame& game, int k, const Vector& x, const Vector& v,
                    double tol = 1e-9);

}  // namespace olpdg
