#include "olpdg/smartgrid.hpp"

#include <numeric>

namespace olpdg::smartgrid {

void Scenario::check() const {
  require(S >= 1 && N >= 1 && K >= 1, "scenario: S, N, K must be >= 1");
  require(static_cast<int>(m.size()) == N, "scenario: m needs one entry per user");
  for (int v : m) require(v >= 1, "scenario: activity counts must be >= 1");
  require(static_cast<int>(Atilde.size()) == K, "scenario: Atilde needs K stages");
  require(static_cast<int>(Btilde.size()) == K, "scenario: Btilde needs K stages");
  require(static_cast<int>(P.size()) == K, "scenario: P needs K stages");
  require(static_cast<int>(rcost.size()) == K, "scenario: rcost needs K stages");
  require(static_cast<int>(q.size()) == K + 1, "scenario: q needs K+1 stages");
  require(static_cast<int>(b.size()) == K + 1, "scenario: b needs K+1 stages");
  require(static_cast<int>(a.size()) == K + 1, "scenario: a needs K+1 stages");
  require(static_cast<int>(Ltilde.size()) == K + 1, "scenario: Ltilde needs K+1 stages");
  require(static_cast<int>(eps.size()) == K + 1, "scenario: eps needs K+1 stages");
  require(static_cast<int>(Kmax.size()) == N, "scenario: Kmax needs one entry per user");
  require(X0.size() == S && Xminus1.size() == S, "scenario: X0 and Xminus1 need S entries");
  for (int k = 0; k <= K; ++k) {
    require(q[k] > 0.0, "scenario: q_k must be > 0");
    require(eps[k] > 0.0, "scenario: eps_k must be > 0");
    require(Ltilde[k].rows() == S && Ltilde[k].cols() == N, "scenario: Ltilde must be S x N");
    require(static_cast<int>(b[k].size()) == N && static_cast<int>(a[k].size()) == N,
            "scenario: b and a need one entry per user");
    if (k < K) {
      require(Atilde[k].rows() == S && Atilde[k].cols() == S, "scenario: Atilde must be S x S");
      require(static_cast<int>(Btilde[k].size()) == N && static_cast<int>(P[k].size()) == N &&
                  static_cast<int>(rcost[k].size()) == N,
              "scenario: Btilde, P and rcost need one entry per user");
      for (int i = 0; i < N; ++i) {
        require(Btilde[k][i].rows() == S && Btilde[k][i].cols() == m[i],
                "scenario: Btilde^i must be S x m_i");
        require(P[k][i].rows() == m[i] && P[k][i].cols() == S, "scenario: P^i must be m_i x S");
        require(rcost[k][i] > 0.0, "scenario: r_k^i must be > 0");
      }
    }
  }
  for (double cap : Kmax) require(cap > 0.0, "scenario: Kmax must be > 0");
}

Scenario default_scenario() {
  Scenario sc;
  sc.S = 3;
  sc.N = 2;
  sc.K = 12;
  sc.m = {2, 2};
  Matrix Bt(3, 2);
  Bt << 0.75, 0.0, 0.0, 0.375, 0.0, 0.75;
  const Matrix Pdemand = Matrix::Constant(2, 3, 0.375);
  for (int k = 0; k < sc.K; ++k) {
    sc.Atilde.push_back(Matrix::Identity(3, 3));
    sc.Btilde.push_back({Bt, Bt});
    sc.P.push_back({Pdemand, Pdemand});
    sc.rcost.push_back({0.7, 0.7});
  }
  for (int k = 0; k <= sc.K; ++k) {
    sc.q.push_back(k < sc.K ? 1.0 : 2.5);
    sc.b.push_back({1.6, 1.6});
    sc.a.push_back({3.4, 4.0});
    sc.Ltilde.push_back(Matrix::Constant(3, 2, 0.5));
    sc.eps.push_back(3.5);
  }
  sc.Kmax = {11.2, 12.2};
  sc.X0 = Vector::Constant(3, 4.0);
  sc.Xminus1 = Vector::Zero(3);
  return sc;
}

LqGame to_nzdg(const Scenario& sc) {
  sc.check();
  const int S = sc.S, N = sc.N, K = sc.K;
  Dims dims;
  dims.n = 2 * S;
  dims.N = N;
  dims.K = K;
  dims.m = sc.m;
  dims.s.assign(N, 1);
  dims.l = N + 1;
  LqGame g = LqGame::zeros(dims);
  const int m = dims.m_total();
  const Matrix IS = Matrix::Identity(S, S);

  for (int k = 0; k < K; ++k) {
    Matrix drift = sc.Atilde[k];
    for (int i = 0; i < N; ++i) drift += sc.Btilde[k][i] * sc.P[k][i];
    g.A[k].topLeftCorner(S, S) = drift;
    g.A[k].bottomLeftCorner(S, S) = IS;
    for (int i = 0; i < N; ++i) {
      g.B[k][i].topRows(S) = -sc.Btilde[k][i];
      Matrix R = Matrix::Zero(m, m);
      R.block(dims.u_offset(i), dims.u_offset(i), sc.m[i], sc.m[i]) =
          sc.rcost[k][i] * Matrix::Identity(sc.m[i], sc.m[i]);
      g.R[k][i] = R;
    }
  }
  for (int k = 0; k <= K; ++k) {
    Matrix Q = Matrix::Zero(2 * S, 2 * S);
    if (k < K) {
      Q << IS, -IS, -IS, IS;
    } else {
      Q.topLeftCorner(S, S) = IS;
    }
    Q *= sc.q[k];
    Matrix L = Matrix::Zero(2 * S, N);
    L.topRows(S) = -sc.Ltilde[k];
    for (int i = 0; i < N; ++i) {
      g.Q[k][i] = Q;
      g.L[k][i] = L;
      g.D[k][i](i, i) = sc.b[k][i];
      g.d[k][i][i] = -sc.a[k][i];
    }
    g.M[k].row(0).head(S).setOnes();
    g.Ncon[k].row(0).setConstant(-1.0);
    g.Ncon[k].bottomRows(N) = -Matrix::Identity(N, N);
    g.r[k][0] = -sc.eps[k];
    for (int i = 0; i < N; ++i) g.r[k][1 + i] = sc.Kmax[i];
  }
  g.x0.head(S) = sc.X0;
  g.x0.tail(S) = sc.Xminus1;
  return g;
}

double Report::total_storage(int i) const {
  double total = 0.0;
  for (const auto& stage : battery) total += stage[i];
  return total;
}

Report extract_report(const EquilibriumTrajectory& traj, const Scenario& sc) {
  const int S = sc.S, N = sc.N, K = sc.K;
  require(static_cast<int>(traj.x.size()) == K + 1 && static_cast<int>(traj.u.size()) == K &&
              static_cast<int>(traj.v.size()) == K + 1,
          "extract_report: trajectory does not match the scenario horizon");
  Report rep;
  rep.resources.resize(K + 1);
  rep.consumption.assign(K, VectorSeq(N));
  rep.battery.assign(K + 1, std::vector<double>(N));
  rep.storage_margin.resize(K + 1);
  rep.unmet_demand.assign(K + 1, std::vector<double>(N, 0.0));
  rep.imbalance.assign(K + 1, std::vector<double>(N, 0.0));
  rep.storage_cost.assign(K + 1, std::vector<double>(N, 0.0));
  rep.incentive.assign(K + 1, std::vector<double>(N, 0.0));
  rep.salvage.assign(N, 0.0);
  rep.total_cost.assign(N, 0.0);

  int u_off = 0;
  std::vector<int> offsets(N);
  for (int i = 0; i < N; ++i) {
    offsets[i] = u_off;
    u_off += sc.m[i];
  }

  for (int k = 0; k <= K; ++k) {
    const Vector X = traj.x[k].head(S);
    const Vector Xprev = traj.x[k].tail(S);
    rep.resources[k] = X;
    const Vector& storage = traj.v[k];
    for (int i = 0; i < N; ++i) rep.battery[k][i] = storage[i];
    rep.storage_margin[k] = X.sum() - sc.eps[k] - storage.sum();
    for (int i = 0; i < N; ++i) {
      if (k < K) {
        const Vector ui = traj.u[k].segment(offsets[i], sc.m[i]);
        rep.consumption[k][i] = sc.P[k][i] * X - ui;
        rep.unmet_demand[k][i] = 0.5 * sc.rcost[k][i] * ui.squaredNorm();
        rep.imbalance[k][i] = 0.5 * sc.q[k] * (X - Xprev).squaredNorm();
      }
      rep.storage_cost[k][i] = 0.5 * sc.b[k][i] * storage[i] * storage[i];
      rep.incentive[k][i] = sc.a[k][i] * storage[i] + X.dot(sc.Ltilde[k] * storage);
      rep.total_cost[i] += rep.unmet_demand[k][i] + rep.imbalance[k][i] +
                           rep.storage_cost[k][i] - rep.incentive[k][i];
    }
  }
  for (int i = 0; i < N; ++i) {
    rep.salvage[i] = 0.5 * sc.q[K] * rep.resources[K].squaredNorm();
    rep.total_cost[i] += rep.salvage[i];
  }
  return rep;
}

}  // namespace olpdg::smartgrid
