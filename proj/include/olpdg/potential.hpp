#pragma once

// Potential-game test for LQ games and construction of the pooled optimal
// control problem whose minimizer is an open-loop Nash equilibrium.

#include <string>
#include <vector>

#include "olpdg/game.hpp"

namespace olpdg {

/// Cost data of the associated optimal control problem. The potential stage
/// function is 1/2 x'Qx + p'x + 1/2 u'Ru + 1/2 v'Dv + d'v + x'Lv, with the u
/// term absent at k = K.
struct OcpData {
  MatrixSeq Q;  // K+1
  VectorSeq p;  // K+1
  MatrixSeq R;  // K
  MatrixSeq D;  // K+1
  VectorSeq d;  // K+1
  MatrixSeq L;  // K+1

  int horizon() const { return static_cast<int>(R.size()); }
};

struct PotentialViolation {
  std::string condition;  // "Ri-Rj", "Qi-Qj", "pi-pj", "Li-Lj" or "Di-Dj"
  int k = 0;
  int i = 0;  // 0-based players, i < j
  int j = 0;
  double deviation = 0.0;
};

struct PotentialReport {
  bool is_potential = true;
  std::vector<PotentialViolation> violations;
};

struct EqualityTolerance {
  double rel = 1e-10;
  double abs = 1e-12;

  bool equal(const Matrix& a, const Matrix& b, double* deviation = nullptr) const;
};

// Cross-player equalities: off-diagonal R and D blocks agree, Q, p and L are
// shared. Diagonal blocks are unconstrained.
PotentialReport check_conditions(const LqGame& game, const EqualityTolerance& tol = {});

// Pools row block i of R and D (and sub-vector i of d) from player i. Throws
// std::invalid_argument for a non-potential game and std::logic_error if the
// pooled matrices come out asymmetric.
OcpData build_ocp(const LqGame& game, const EqualityTolerance& tol = {});

// Potential stage value with integration constants fixed to zero.
double potential_value(const OcpData& ocp, int k, const Vector& x, const Vector& u,
                       const Vector& v);

// Sum of potential_value along a trajectory (the OCP objective).
double ocp_objective(const OcpData& ocp, const VectorSeq& states, const VectorSeq& u,
                     const VectorSeq& v);

std::string to_string(const PotentialViolation& v);

}  // namespace olpdg
