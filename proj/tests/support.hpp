#pragma once

// Random instance generators and independent oracles shared by the unit and
// acceptance tests.

#include <random>

#include "olpdg/game.hpp"
#include "olpdg/potential.hpp"

namespace olpdg::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Matrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  Matrix a(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) a(r, c) = uniform(rng, -scale, scale);
  return a;
}

inline Vector random_vector(Rng& rng, int size, double scale = 1.0) {
  Vector v(size);
  for (int t = 0; t < size; ++t) v[t] = uniform(rng, -scale, scale);
  return v;
}

// G G' / size + shift I.
inline Matrix random_spd(Rng& rng, int size, double shift) {
  const Matrix G = random_matrix(rng, size, size);
  Matrix S = G * G.transpose() / std::max(1, size);
  S.diagonal().array() += shift;
  return symmetrize(S);
}

inline Dims random_dims(Rng& rng, int max_n, int max_N, int max_K, int max_m, int max_s,
                        int max_l) {
  Dims d;
  d.n = uniform_int(rng, 1, max_n);
  d.N = uniform_int(rng, 1, max_N);
  d.K = uniform_int(rng, 1, max_K);
  d.l = uniform_int(rng, 1, max_l);
  for (int i = 0; i < d.N; ++i) {
    d.m.push_back(uniform_int(rng, 1, max_m));
    d.s.push_back(uniform_int(rng, 1, max_s));
  }
  return d;
}

struct GameOptions {
  double a_scale = 0.6;
  double q_shift = 0.1;
  double r_shift = 0.5;
  double d_shift = 0.5;
  double l_scale = 0.3;
  double m_scale = 0.3;
  double r_offset = 2.0;  // constraint offsets drawn from [r_offset, r_offset + 1]
  bool inert_constraints = false;
};

// Game whose players differ only in the blocks the potential conditions leave
// free: other players' diagonal blocks of R and D, and other players' entries
// of d.
inline LqGame random_potential_game(Rng& rng, const Dims& dims, const GameOptions& opt = {}) {
  LqGame g = LqGame::zeros(dims);
  const int n = dims.n, N = dims.N, K = dims.K, m = dims.m_total(), s = dims.s_total(),
            l = dims.l;
  auto perturb_other_blocks = [&](const Matrix& pooled, int i, const std::vector<int>& sizes,
                                  auto offset) {
    Matrix out = pooled;
    for (int a = 0; a < N; ++a) {
      if (a == i) continue;
      out.block(offset(a), offset(a), sizes[a], sizes[a]) += random_spd(rng, sizes[a], 0.0);
    }
    return out;
  };
  auto u_off = [&](int a) { return dims.u_offset(a); };
  auto v_off = [&](int a) { return dims.v_offset(a); };

  for (int k = 0; k <= K; ++k) {
    const Matrix Q = random_spd(rng, n, opt.q_shift);
    const Vector p = random_vector(rng, n);
    const Matrix L = random_matrix(rng, n, s, opt.l_scale);
    const Matrix Dp = random_spd(rng, s, opt.d_shift);
    const Vector dp = random_vector(rng, s);
    Matrix Rp;
    if (k < K) {
      g.A[k] = random_matrix(rng, n, n, opt.a_scale);
      Rp = random_spd(rng, m, opt.r_shift);
    }
    for (int i = 0; i < N; ++i) {
      g.Q[k][i] = Q;
      g.p[k][i] = p;
      g.L[k][i] = opt.inert_constraints ? Matrix(Matrix::Zero(n, s)) : L;
      g.D[k][i] = perturb_other_blocks(Dp, i, dims.s, v_off);
      g.d[k][i] = random_vector(rng, s);
      g.d[k][i].segment(dims.v_offset(i), dims.s[i]) = dp.segment(dims.v_offset(i), dims.s[i]);
      if (k < K) {
        g.B[k][i] = random_matrix(rng, n, dims.m[i]);
        g.R[k][i] = perturb_other_blocks(Rp, i, dims.m, u_off);
      }
    }
    if (opt.inert_constraints) {
      // v = 0 is optimal (d > 0, L = 0) and the rows are slack for every x.
      for (int i = 0; i < N; ++i) {
        g.D[k][i] = Dp;
        g.d[k][i] = Vector::Constant(s, 1.0) + dp.cwiseAbs();
      }
      g.r[k] = Vector::Constant(l, 1.0);
    } else {
      g.M[k] = random_matrix(rng, l, n, opt.m_scale);
      g.Ncon[k] = -random_matrix(rng, l, s, 1.0).cwiseAbs();
      g.r[k] = Vector::Constant(l, opt.r_offset) + random_vector(rng, l, 0.5).cwiseAbs();
    }
  }
  g.x0 = random_vector(rng, n, 2.0);
  return g;
}

// Breaks one cross-player condition at a random stage (needs N >= 2).
inline LqGame break_potential(Rng& rng, LqGame g, double size = 0.1) {
  const Dims& dm = g.dims;
  const int k = uniform_int(rng, 0, dm.K - 1);
  const int i = uniform_int(rng, 0, dm.N - 1);
  const int j = (i + 1) % dm.N;
  switch (uniform_int(rng, 0, 2)) {
    case 0: {
      // Off-diagonal block of player i's R only.
      Matrix E = Matrix::Zero(dm.m_total(), dm.m_total());
      E.block(dm.u_offset(i), dm.u_offset(j), dm.m[i], dm.m[j]).setConstant(size);
      g.R[k][i] += E + E.transpose();
      break;
    }
    case 1:
      g.p[k][i][0] += size;
      break;
    default:
      g.Q[k][i](0, 0) += size;
      break;
  }
  return g;
}

/// Finite-horizon LQ regulator of the pooled problem by dynamic programming
/// on the value function 1/2 x'P x + s'x; returns the optimal controls.
inline VectorSeq dp_lq_controls(const LqGame& game, const OcpData& ocp) {
  const int K = game.dims.K;
  Matrix P = ocp.Q[K];
  Vector sv = ocp.p[K];
  MatrixSeq gain(K);
  VectorSeq feed(K);
  for (int k = K - 1; k >= 0; --k) {
    const Matrix B = game.stacked_B(k);
    const Matrix& A = game.A[k];
    const Matrix Huu = ocp.R[k] + B.transpose() * P * B;
    const Eigen::LDLT<Matrix> f(Huu);
    gain[k] = -f.solve(B.transpose() * P * A);
    feed[k] = -f.solve(B.transpose() * sv);
    const Matrix Acl = A + B * gain[k];
    sv = ocp.p[k] + Acl.transpose() * sv + gain[k].transpose() * ocp.R[k] * feed[k] +
         Acl.transpose() * P * B * feed[k];
    P = symmetrize(ocp.Q[k] + A.transpose() * P * Acl);
  }
  VectorSeq u(K);
  Vector x = game.x0;
  for (int k = 0; k < K; ++k) {
    u[k] = gain[k] * x + feed[k];
    x = game.A[k] * x + game.stacked_B(k) * u[k];
  }
  return u;
}

// Central-difference Hessian of f at z.
template <class F>
Matrix fd_hessian(F&& f, const Vector& z, double h) {
  const Eigen::Index d = z.size();
  Matrix H(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b) {
      double acc = 0.0;
      for (int sa : {1, -1}) {
        for (int sb : {1, -1}) {
          Vector zz = z;
          zz[a] += sa * h;
          zz[b] += sb * h;
          acc += sa * sb * f(zz);
        }
      }
      H(a, b) = H(b, a) = acc / (4.0 * h * h);
    }
  }
  return H;
}

}  // namespace olpdg::testing
