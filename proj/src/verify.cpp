#include "olpdg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "olpdg/pipeline.hpp"

namespace olpdg {

namespace {

// Largest violation of 0 <= a, 0 <= b, a o b = 0.
double complementarity_violation(const Vector& a, const Vector& b) {
  double worst = 0.0;
  for (Eigen::Index t = 0; t < a.size(); ++t) {
    worst = std::max({worst, -a[t], -b[t], std::abs(a[t] * b[t])});
  }
  return worst;
}

// A_{to-1} ... A_from, identity when from == to.
Matrix state_transition(const LqGame& game, int from, int to) {
  const int n = game.dims.n;
  Matrix out = Matrix::Identity(n, n);
  for (int j = from; j < to; ++j) out = game.A[j] * out;
  return out;
}

}  // namespace

double KktReport::max_residual() const {
  return std::max({stationarity_u, dynamics, costate, costate_terminal, comp_v, comp_mu});
}

KktReport kkt_residuals(const OcpData& ocp, const LqGame& game,
                        const EquilibriumTrajectory& traj) {
  const auto& dm = game.dims;
  const int K = dm.K;
  require(static_cast<int>(traj.x.size()) == K + 1 && static_cast<int>(traj.u.size()) == K &&
              static_cast<int>(traj.v.size()) == K + 1 &&
              static_cast<int>(traj.lambda.size()) == K + 1 &&
              static_cast<int>(traj.mu.size()) == K + 1,
          "kkt_residuals: trajectory does not match the horizon");
  KktReport rep;
  double scale = 0.0;
  auto grow = [&scale](double v) { scale = std::max(scale, v); };

  rep.dynamics = max_abs(Vector(traj.x[0] - game.x0));
  for (int k = 0; k <= K; ++k) {
    const Vector& x = traj.x[k];
    const Vector& v = traj.v[k];
    const Vector& mu = traj.mu[k];
    const Vector& lam = traj.lambda[k];
    Vector lam_rhs = ocp.Q[k] * x + ocp.p[k] + ocp.L[k] * v - game.M[k].transpose() * mu;
    if (k < K) {
      const Matrix B = game.stacked_B(k);
      const Vector& u = traj.u[k];
      rep.stationarity_u = std::max(
          rep.stationarity_u, max_abs(Vector(ocp.R[k] * u + B.transpose() * traj.lambda[k + 1])));
      rep.dynamics =
          std::max(rep.dynamics, max_abs(Vector(traj.x[k + 1] - game.A[k] * x - B * u)));
      lam_rhs += game.A[k].transpose() * traj.lambda[k + 1];
      rep.costate = std::max(rep.costate, max_abs(Vector(lam - lam_rhs)));
      grow(max_abs(ocp.R[k]));
      grow(max_abs(B));
      grow(max_abs(game.A[k]));
      grow(max_abs(u));
    } else {
      rep.costate_terminal = max_abs(Vector(lam - lam_rhs));
    }
    const Vector slack_v = ocp.D[k] * v + ocp.d[k] + ocp.L[k].transpose() * x -
                           game.Ncon[k].transpose() * mu;
    const Vector slack_mu = game.M[k] * x + game.Ncon[k] * v + game.r[k];
    rep.comp_v = std::max(rep.comp_v, complementarity_violation(slack_v, v));
    rep.comp_mu = std::max(rep.comp_mu, complementarity_violation(slack_mu, mu));
    for (double d : {max_abs(ocp.Q[k]), max_abs(ocp.p[k]), max_abs(ocp.D[k]), max_abs(ocp.d[k]),
                     max_abs(ocp.L[k]), max_abs(game.M[k]), max_abs(game.Ncon[k]),
                     max_abs(game.r[k]), max_abs(x), max_abs(v), max_abs(mu), max_abs(lam)}) {
      grow(d);
    }
  }
  rep.scale = 1.0 + scale;
  return rep;
}

bool SufficiencyPass::complete() const {
  return std::all_of(T_invertible.begin(), T_invertible.end(), [](bool b) { return b; });
}

SufficiencyPass sufficiency_pass(const OcpData& ocp, const LqGame& game, const VectorSeq& v_star,
                                 const VectorSeq& mu_star) {
  const int K = game.dims.K;
  require(static_cast<int>(v_star.size()) == K + 1 && static_cast<int>(mu_star.size()) == K + 1,
          "sufficiency_pass: v and mu need K+1 stages");
  SufficiencyPass sp;
  sp.E.resize(K + 1);
  sp.e.resize(K + 1);
  sp.w.assign(K + 1, 0.0);
  sp.T.resize(K);
  sp.T_invertible.assign(K, false);
  sp.T_rcond.assign(K, 0.0);

  auto linear_term = [&](int k) -> Vector {
    return ocp.p[k] + ocp.L[k] * v_star[k] - game.M[k].transpose() * mu_star[k];
  };
  sp.E[K] = ocp.Q[K];
  sp.e[K] = linear_term(K);

  for (int k = K - 1; k >= 0; --k) {
    const Matrix B = game.stacked_B(k);
    const Matrix& A = game.A[k];
    const Matrix& En = sp.E[k + 1];
    sp.T[k] = ocp.R[k] + B.transpose() * En * B;
    const Eigen::PartialPivLU<Matrix> lu(sp.T[k]);
    sp.T_rcond[k] = lu.rcond();
    if (!(sp.T_rcond[k] >= kTRcondMin)) {
      // Stages below k cannot be computed.
      for (int j = k; j >= 0; --j) {
        sp.E[j] = Matrix::Constant(A.rows(), A.cols(), std::nan(""));
        sp.e[j] = Vector::Constant(A.rows(), std::nan(""));
        sp.w[j] = std::nan("");
      }
      return sp;
    }
    sp.T_invertible[k] = true;
    const Matrix EA = En * A;
    const Matrix BtEA = B.transpose() * EA;
    const Vector Bte = B.transpose() * sp.e[k + 1];
    sp.E[k] = symmetrize(A.transpose() * EA + ocp.Q[k] - BtEA.transpose() * lu.solve(BtEA));
    sp.e[k] = A.transpose() * sp.e[k + 1] - BtEA.transpose() * lu.solve(Bte) + linear_term(k);
    sp.w[k] = sp.w[k + 1] - 0.5 * Bte.dot(lu.solve(Bte));
  }
  return sp;
}

const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::pd: return "positive definite";
    case Definiteness::semidefinite: return "semidefinite within tolerance";
    case Definiteness::indefinite: return "indefinite";
    case Definiteness::not_computed: return "not computed";
  }
  return "unknown";
}

HessianData build_hessian(const OcpData& ocp, const LqGame& game, const SufficiencyPass& suff) {
  const auto& dm = game.dims;
  const int K = dm.K, m = dm.m_total(), s = dm.s_total();
  HessianData hd;
  hd.Y = Matrix::Zero(K * m, K * m);
  hd.C = Matrix::Zero(K * m, (K + 1) * s);
  hd.Dblk = Matrix::Zero((K + 1) * s, (K + 1) * s);
  for (int k = 0; k <= K; ++k) hd.Dblk.block(k * s, k * s, s, s) = ocp.D[k];

  for (int l = 0; l < K; ++l) {
    const Matrix Bl = game.stacked_B(l);
    for (int k = l + 1; k <= K; ++k) {
      hd.C.block(l * m, k * s, m, s) =
          Bl.transpose() * state_transition(game, l + 1, k).transpose() * ocp.L[k];
    }
  }

  if (!suff.complete()) {
    hd.H = Matrix();
    return hd;
  }

  for (int k = 0; k < K; ++k) {
    const Matrix Bk = game.stacked_B(k);
    // Phat = E_{k+1} + sum_{tau > k} Ups' T_tau^{-1} Ups,
    // Ups = B_tau'E_{tau+1}A_tau...A_{k+1}.
    Matrix tail_sum = Matrix::Zero(dm.n, dm.n);
    Matrix prod = Matrix::Identity(dm.n, dm.n);
    for (int tau = k + 1; tau < K; ++tau) {
      prod = game.A[tau] * prod;
      const Matrix Ups = game.stacked_B(tau).transpose() * suff.E[tau + 1] * prod;
      tail_sum += Ups.transpose() * suff.T[tau].partialPivLu().solve(Ups);
    }
    const Matrix Phat = suff.E[k + 1] + tail_sum;
    hd.Y.block(k * m, k * m, m, m) = suff.T[k] + Bk.transpose() * tail_sum * Bk;
    Matrix reach = game.A[k];  // A_k ... A_{l+1}
    for (int l = k - 1; l >= 0; --l) {
      const Matrix blk = Bk.transpose() * Phat * reach * game.stacked_B(l);
      hd.Y.block(k * m, l * m, m, m) = blk;
      hd.Y.block(l * m, k * m, m, m) = blk.transpose();
      reach = reach * game.A[l];
    }
  }
  hd.Y = symmetrize(hd.Y);

  const int nu = K * m, nv = (K + 1) * s;
  hd.H.resize(nu + nv, nu + nv);
  hd.H << hd.Y, hd.C, hd.C.transpose(), hd.Dblk;

  if (hd.H.size() == 0) {
    hd.definiteness = Definiteness::pd;
    return hd;
  }
  const Eigen::LDLT<Matrix> ldlt(hd.H);
  const Vector pivots = ldlt.vectorD();
  const double threshold = 1e-10 * std::max(1.0, max_abs(hd.H));
  hd.min_pivot = pivots.minCoeff();
  if (ldlt.info() != Eigen::Success || !pivots.allFinite() || hd.min_pivot < -threshold) {
    hd.definiteness = Definiteness::indefinite;
  } else if (hd.min_pivot <= threshold) {
    hd.definiteness = Definiteness::semidefinite;
  } else {
    hd.definiteness = Definiteness::pd;
  }
  return hd;
}

double condensed_objective(const OcpData& ocp, const LqGame& game, const VectorSeq& u,
                           const VectorSeq& v) {
  return ocp_objective(ocp, rollout_states(game, u), u, v);
}

BestResponseProblem best_response_problem(const LqGame& game, const EquilibriumTrajectory& traj,
                                          int i) {
  const auto& dm = game.dims;
  require(i >= 0 && i < dm.N, "best_response: player index out of range");
  const int K = dm.K, n = dm.n, mi = dm.m[i], si = dm.s[i];
  const int uo = dm.u_offset(i), vo = dm.v_offset(i);

  Dims d1;
  d1.n = n + 1;
  d1.N = 1;
  d1.K = K;
  d1.m = {mi};
  d1.s = {si};
  d1.l = dm.l;
  BestResponseProblem bp;
  bp.game = LqGame::zeros(d1);
  bp.u_shift.resize(K);
  LqGame& g = bp.game;

  for (int k = 0; k < K; ++k) {
    Vector others = traj.u[k];
    others.segment(uo, mi).setZero();
    const Matrix& Ri = game.R[k][i];
    const Matrix Rii = Ri.block(uo, uo, mi, mi);
    const Vector cross = Ri.middleRows(uo, mi) * others;
    bp.u_shift[k] = -Rii.llt().solve(cross);
    const Vector drift = game.stacked_B(k) * others + game.B[k][i] * bp.u_shift[k];

    g.A[k].topLeftCorner(n, n) = game.A[k];
    g.A[k].topRightCorner(n, 1) = drift;
    g.A[k](n, n) = 1.0;
    g.B[k][0].topRows(n) = game.B[k][i];
    g.R[k][0] = Rii;
  }
  for (int k = 0; k <= K; ++k) {
    Vector v_others = traj.v[k];
    v_others.segment(vo, si).setZero();
    g.Q[k][0].topLeftCorner(n, n) = game.Q[k][i];
    g.p[k][0].head(n) = game.p[k][i] + game.L[k][i] * v_others;
    g.D[k][0] = game.D[k][i].block(vo, vo, si, si);
    g.d[k][0] = game.d[k][i].segment(vo, si) + game.D[k][i].middleRows(vo, si) * v_others;
    g.L[k][0].topRows(n) = game.L[k][i].middleCols(vo, si);
    g.M[k].leftCols(n) = game.M[k];
    g.Ncon[k] = game.Ncon[k].middleCols(vo, si);
    g.r[k] = game.r[k] + game.Ncon[k] * v_others;
  }
  g.x0.head(n) = game.x0;
  g.x0[n] = 1.0;
  return bp;
}

BestResponse best_response_check(const LqGame& game, const EquilibriumTrajectory& traj, int i,
                                 const BestResponseOptions& options) {
  const auto& dm = game.dims;
  const int K = dm.K, mi = dm.m[i], si = dm.s[i];
  const int uo = dm.u_offset(i), vo = dm.v_offset(i);
  BestResponse br;
  br.player = i;
  const VectorSeq states = rollout_states(game, traj.u);
  br.trajectory_cost = player_cost(game, i, states, traj.u, traj.v);

  const BestResponseProblem bp = best_response_problem(game, traj, i);
  SolveOptions so;
  so.lemke = options.lemke;
  const Equilibrium inner = solve_equilibrium(bp.game, so);

  br.best = traj;
  for (int k = 0; k < K; ++k) {
    br.best.u[k].segment(uo, mi) = inner.trajectory.u[k] + bp.u_shift[k];
  }
  for (int k = 0; k <= K; ++k) br.best.v[k].segment(vo, si) = inner.trajectory.v[k];
  br.best.x = rollout_states(game, br.best.u);
  br.best_cost = player_cost(game, i, br.best.x, br.best.u, br.best.v);
  br.gap = br.best_cost - br.trajectory_cost;

  std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(i));
  std::normal_distribution<double> normal(0.0, 1.0);
  double u_scale = 0.0, v_scale = 0.0;
  for (const auto& u : traj.u) u_scale = std::max(u_scale, max_abs(Vector(u.segment(uo, mi))));
  for (const auto& v : traj.v) v_scale = std::max(v_scale, max_abs(Vector(v.segment(vo, si))));
  for (int t = 0; t < options.trials; ++t) {
    const double sigma = options.perturbation * std::ldexp(1.0, -(t % 4));
    VectorSeq u = traj.u, v = traj.v;
    for (auto& uk : u) {
      for (int a = 0; a < mi; ++a) uk[uo + a] += sigma * (1.0 + u_scale) * normal(rng);
    }
    for (auto& vk : v) {
      for (int a = 0; a < si; ++a) {
        vk[vo + a] = std::max(0.0, vk[vo + a] + sigma * (1.0 + v_scale) * normal(rng));
      }
    }
    const Rollout ro = simulate(game, u, v);
    if (!std::all_of(ro.feasible.begin(), ro.feasible.end(), [](bool b) { return b; })) continue;
    ++br.feasible_trials;
    br.sampled_improvement =
        std::max(br.sampled_improvement, br.trajectory_cost - ro.costs[i]);
  }
  return br;
}

Certificate certify(const OcpData& ocp, const LqGame& game, const EquilibriumTrajectory& traj,
                    const CertifyOptions& options) {
  Certificate cert;
  cert.kkt = kkt_residuals(ocp, game, traj);
  cert.kkt_ok = cert.kkt.scaled() <= options.kkt_tol;
  if (!cert.kkt_ok) cert.failures.push_back("kkt: scaled residual above tolerance");

  cert.suff = sufficiency_pass(ocp, game, traj.v, traj.mu);
  if (!cert.suff.complete()) {
    cert.failures.push_back("sufficiency: T_k not invertible");
  }
  cert.hessian = build_hessian(ocp, game, cert.suff);
  cert.hessian_pd = cert.hessian.pd();
  if (cert.suff.complete() && !cert.hessian_pd) {
    cert.failures.push_back(std::string("hessian: ") + to_string(cert.hessian.definiteness));
  }

  cert.nash_ok = true;
  for (int i = 0; i < game.dims.N; ++i) {
    try {
      cert.best_responses.push_back(best_response_check(game, traj, i, options.best_response));
      if (cert.best_responses.back().gap < -options.gap_tol) {
        cert.nash_ok = false;
        cert.failures.push_back("nash: player " + std::to_string(i + 1) +
                                " has a profitable deviation");
      }
    } catch (const std::exception& e) {
      cert.nash_ok = false;
      cert.failures.push_back("nash: best response of player " + std::to_string(i + 1) +
                              " failed: " + e.what());
    }
  }
  return cert;
}

}  // namespace olpdg
