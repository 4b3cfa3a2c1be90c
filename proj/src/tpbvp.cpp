#include "olpdg/tpbvp.hpp"

#include <sstream>

namespace olpdg {

BackwardPass backward_pass(const OcpData& ocp, const LqGame& game) {
  const int K = game.dims.K;
  const int n = game.dims.n;
  BackwardPass pass;
  pass.H.resize(K + 1);
  pass.Gamma.resize(K);
  pass.S.resize(K);
  pass.Abar.resize(K);
  pass.Bbar.resize(K);
  pass.G_next.resize(K);
  pass.gamma_rcond.resize(K);
  pass.H[K] = ocp.Q[K];
  const Matrix I = Matrix::Identity(n, n);

  for (int k = K - 1; k >= 0; --k) {
    const Matrix B = game.stacked_B(k);
    const Eigen::LLT<Matrix> R_llt(ocp.R[k]);
    if (R_llt.info() != Eigen::Success) {
      throw NumericalError("backward_pass: pooled R not positive definite at k=" +
                           std::to_string(k));
    }
    pass.S[k] = B * R_llt.solve(B.transpose());
    pass.Gamma[k] = I + pass.S[k] * pass.H[k + 1];

    const Eigen::PartialPivLU<Matrix> lu(pass.Gamma[k]);
    pass.gamma_rcond[k] = lu.rcond();
    if (!(pass.gamma_rcond[k] >= kGammaRcondMin)) {
      std::ostringstream os;
      os << "backward_pass: Gamma singular or ill-conditioned at k=" << k
         << " (rcond " << pass.gamma_rcond[k] << ")";
      throw NumericalError(os.str());
    }
    const Matrix& A = game.A[k];
    pass.Abar[k] = lu.solve(A);
    pass.Bbar[k] = -lu.solve(pass.S[k]);
    // A'H Gamma^{-1} A and A' - A'H Gamma^{-1} S
    pass.H[k] = ocp.Q[k] + A.transpose() * pass.H[k + 1] * pass.Abar[k];
    pass.G_next[k] = A.transpose() + A.transpose() * pass.H[k + 1] * pass.Bbar[k];
  }
  return pass;
}

Matrix psi(const BackwardPass& pass, int k, int tau) {
  require(k <= tau, "psi: requires k <= tau");
  require(tau <= pass.horizon() && k >= 0, "psi: stage out of range");
  const auto n = pass.H.front().rows();
  Matrix out = Matrix::Identity(n, n);
  for (int j = k + 1; j <= tau; ++j) out = out * pass.G_next[j - 1];
  return out;
}

Matrix phi(const BackwardPass& pass, int rho, int k) {
  require(rho <= k, "phi: requires rho <= k");
  require(k <= pass.horizon() && rho >= 0, "phi: stage out of range");
  const auto n = pass.H.front().rows();
  Matrix out = Matrix::Identity(n, n);
  for (int j = rho; j < k; ++j) out = pass.Abar[j] * out;
  return out;
}

AffineMaps assemble_affine_maps(const BackwardPass& pass, const OcpData& ocp,
                                const LqGame& game) {
  const auto& dm = game.dims;
  const int K = dm.K, n = dm.n, s = dm.s_total(), l = dm.l;
  const int blk = s + l;

  // Cache transition products: phis[rho][k] and psis[k][tau].
  std::vector<MatrixSeq> phis(K + 1, MatrixSeq(K + 1));
  std::vector<MatrixSeq> psis(K + 1, MatrixSeq(K + 1));
  for (int a = 0; a <= K; ++a) {
    phis[a][a] = Matrix::Identity(n, n);
    psis[a][a] = Matrix::Identity(n, n);
    for (int b = a + 1; b <= K; ++b) {
      phis[a][b] = pass.Abar[b - 1] * phis[a][b - 1];
      psis[a][b] = psis[a][b - 1] * pass.G_next[b - 1];
    }
  }

  AffineMaps maps;
  maps.Phi0.resize(K * n, n);
  maps.Phi1 = Matrix::Zero(K * n, K * n);
  maps.Phi2 = Matrix::Zero(K * n, K * blk);
  for (int k = 1; k <= K; ++k) {
    maps.Phi0.middleRows((k - 1) * n, n) = phis[0][k];
    for (int tau = 1; tau <= K; ++tau) {
      Matrix acc = Matrix::Zero(n, n);
      for (int rho = 1; rho <= std::min(k, tau); ++rho) {
        acc += phis[rho][k] * pass.Bbar[rho - 1] * psis[rho][tau];
      }
      maps.Phi1.block((k - 1) * n, (tau - 1) * n, n, n) = acc;
      Matrix coupling(n, blk);
      coupling << ocp.L[tau], -game.M[tau].transpose();
      maps.Phi2.block((k - 1) * n, (tau - 1) * blk, n, blk) = acc * coupling;
    }
  }
  return maps;
}

VectorSeq beta_sequence(const BackwardPass& pass, const OcpData& ocp, const LqGame& game,
                        const VectorSeq& v, const VectorSeq& mu) {
  const int K = game.dims.K;
  require(static_cast<int>(v.size()) == K + 1 && static_cast<int>(mu.size()) == K + 1,
          "beta_sequence: v and mu need K+1 stages");
  VectorSeq beta(K + 1);
  auto forcing = [&](int k) -> Vector {
    return ocp.p[k] + ocp.L[k] * v[k] - game.M[k].transpose() * mu[k];
  };
  beta[K] = forcing(K);
  for (int k = K - 1; k >= 0; --k) beta[k] = forcing(k) + pass.G_next[k] * beta[k + 1];
  return beta;
}

EquilibriumTrajectory recover_trajectory(const BackwardPass& pass, const OcpData& ocp,
                                         const LqGame& game, const VectorSeq& v,
                                         const VectorSeq& mu) {
  const int K = game.dims.K;
  const VectorSeq beta = beta_sequence(pass, ocp, game, v, mu);
  EquilibriumTrajectory t;
  t.v = v;
  t.mu = mu;
  t.x.resize(K + 1);
  t.u.resize(K);
  t.lambda.resize(K + 1);
  t.x[0] = game.x0;
  for (int k = 0; k < K; ++k) {
    t.x[k + 1] = pass.Abar[k] * t.x[k] + pass.Bbar[k] * beta[k + 1];
    const Matrix B = game.stacked_B(k);
    const Vector costate_next = pass.H[k + 1] * t.x[k + 1] + beta[k + 1];
    t.u[k] = -ocp.R[k].llt().solve(B.transpose() * costate_next);
  }
  for (int k = 0; k <= K; ++k) t.lambda[k] = pass.H[k] * t.x[k] + beta[k];
  return t;
}

void unstack(const Vector& y, const Dims& dims, const Vector& v0, const Vector& mu0,
             VectorSeq& v, VectorSeq& mu) {
  const int K = dims.K, s = dims.s_total(), l = dims.l;
  require(y.size() == K * (s + l), "unstack: y has wrong length");
  v.assign(K + 1, Vector());
  mu.assign(K + 1, Vector());
  v[0] = v0;
  mu[0] = mu0;
  for (int k = 1; k <= K; ++k) {
    const int off = (k - 1) * (s + l);
    v[k] = y.segment(off, s);
    mu[k] = y.segment(off + s, l);
  }
}

EquilibriumTrajectory recover_trajectory(const BackwardPass& pass, const OcpData& ocp,
                                         const LqGame& game, const Vector& y,
                                         const Vector& v0, const Vector& mu0) {
  VectorSeq v, mu;
  unstack(y, game.dims, v0, mu0, v, mu);
  return recover_trajectory(pass, ocp, game, v, mu);
}

}  // namespace olpdg
