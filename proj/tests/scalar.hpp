#pragma once

#include "olpdg/game.hpp"

namespace olpdg::testing {

// One player, n = m = s = l = 1, constant data over the horizon. The
// constraint row is inert (M = N = 0, r = 1) and v carries cost 1/2 v^2.
struct ScalarSpec {
  int K = 1;
  double A = 1.0, B = 1.0, Q = 1.0, QK = 1.0, R = 1.0;
  double p = 0.0, D = 1.0, d = 0.0, L = 0.0, M = 0.0, Ncon = 0.0, r = 1.0;
  double x0 = 1.0;
};

inline LqGame scalar_game(const ScalarSpec& sp) {
  Dims dims;
  dims.n = 1;
  dims.N = 1;
  dims.K = sp.K;
  dims.m = {1};
  dims.s = {1};
  dims.l = 1;
  LqGame g = LqGame::zeros(dims);
  for (int k = 0; k <= sp.K; ++k) {
    if (k < sp.K) {
      g.A[k](0, 0) = sp.A;
      g.B[k][0](0, 0) = sp.B;
      g.R[k][0](0, 0) = sp.R;
    }
    g.Q[k][0](0, 0) = k < sp.K ? sp.Q : sp.QK;
    g.p[k][0][0] = sp.p;
    g.D[k][0](0, 0) = sp.D;
    g.d[k][0][0] = sp.d;
    g.L[k][0](0, 0) = sp.L;
    g.M[k](0, 0) = sp.M;
    g.Ncon[k](0, 0) = sp.Ncon;
    g.r[k][0] = sp.r;
  }
  g.x0[0] = sp.x0;
  return g;
}

}  // namespace olpdg::testing
