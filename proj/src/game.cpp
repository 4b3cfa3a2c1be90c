#include "olpdg/game.hpp"

#include <numeric>
#include <sstream>

namespace olpdg {

namespace {

constexpr double kSymmetryTol = 1e-12;

std::string at(int k, int i) {
  std::ostringstream os;
  os << "at k=" << k << ", i=" << i + 1;
  return os.str();
}

void check_shape(std::vector<std::string>& out, const Matrix& a, Eigen::Index rows,
                 Eigen::Index cols, const std::string& name) {
  if (a.rows() != rows || a.cols() != cols) {
    std::ostringstream os;
    os << name << " has shape " << a.rows() << "x" << a.cols() << ", expected " << rows << "x"
       << cols;
    out.push_back(os.str());
  }
}

void check_length(std::vector<std::string>& out, const Vector& a, Eigen::Index len,
                  const std::string& name) {
  if (a.size() != len) {
    std::ostringstream os;
    os << name << " has length " << a.size() << ", expected " << len;
    out.push_back(os.str());
  }
}

void check_symmetric(ValidationReport& rep, const Matrix& a, const std::string& name) {
  if (a.rows() != a.cols()) return;
  const double dev = asymmetry(a);
  if (dev == 0.0) return;
  const double scale = max_abs(a);
  std::ostringstream os;
  os << name << " asymmetric (max |X-X'| = " << dev << ")";
  if (dev > kSymmetryTol * scale) {
    rep.violations.push_back(os.str());
  } else {
    rep.warnings.push_back(os.str() + ", symmetrized");
  }
}

template <class Seq>
bool sized(std::vector<std::string>& out, const Seq& seq, std::size_t expected,
           const std::string& name) {
  if (seq.size() != expected) {
    std::ostringstream os;
    os << name << " has " << seq.size() << " stages, expected " << expected;
    out.push_back(os.str());
    return false;
  }
  return true;
}

template <class Seq>
bool sized_players(std::vector<std::string>& out, const std::vector<Seq>& seq,
                   std::size_t stages, std::size_t players, const std::string& name) {
  if (!sized(out, seq, stages, name)) return false;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (seq[k].size() != players) {
      std::ostringstream os;
      os << name << " at k=" << k << " has " << seq[k].size() << " players, expected "
         << players;
      out.push_back(os.str());
      return false;
    }
  }
  return true;
}

}  // namespace

int Dims::m_total() const { return std::accumulate(m.begin(), m.end(), 0); }
int Dims::s_total() const { return std::accumulate(s.begin(), s.end(), 0); }
int Dims::u_offset(int i) const { return std::accumulate(m.begin(), m.begin() + i, 0); }
int Dims::v_offset(int i) const { return std::accumulate(s.begin(), s.begin() + i, 0); }

void Dims::check() const {
  require(n >= 1, "dims: n must be >= 1");
  require(N >= 1, "dims: N must be >= 1");
  require(K >= 1, "dims: K must be >= 1");
  require(l >= 1, "dims: l must be >= 1");
  require(static_cast<int>(m.size()) == N, "dims: m must list one size per player");
  require(static_cast<int>(s.size()) == N, "dims: s must list one size per player");
  for (int i = 0; i < N; ++i) {
    require(m[i] >= 1, "dims: every m_i must be >= 1");
    require(s[i] >= 1, "dims: every s_i must be >= 1");
  }
}

LqGame LqGame::zeros(const Dims& dims) {
  dims.check();
  const int n = dims.n, K = dims.K, N = dims.N, m = dims.m_total(), s = dims.s_total(),
            l = dims.l;
  LqGame g;
  g.dims = dims;
  g.A.assign(K, Matrix::Zero(n, n));
  g.B.resize(K);
  for (auto& stage : g.B) {
    for (int i = 0; i < N; ++i) stage.push_back(Matrix::Zero(n, dims.m[i]));
  }
  g.Q.assign(K + 1, MatrixSeq(N, Matrix::Zero(n, n)));
  g.p.assign(K + 1, VectorSeq(N, Vector::Zero(n)));
  g.R.assign(K, MatrixSeq(N, Matrix::Zero(m, m)));
  g.D.assign(K + 1, MatrixSeq(N, Matrix::Zero(s, s)));
  g.d.assign(K + 1, VectorSeq(N, Vector::Zero(s)));
  g.L.assign(K + 1, MatrixSeq(N, Matrix::Zero(n, s)));
  g.M.assign(K + 1, Matrix::Zero(l, n));
  g.Ncon.assign(K + 1, Matrix::Zero(l, s));
  g.r.assign(K + 1, Vector::Zero(l));
  g.x0 = Vector::Zero(n);
  return g;
}

Matrix LqGame::stacked_B(int k) const {
  Matrix out(dims.n, dims.m_total());
  for (int i = 0; i < dims.N; ++i) {
    out.middleCols(dims.u_offset(i), dims.m[i]) = B[k][i];
  }
  return out;
}

ValidationReport validate(const LqGame& game) {
  ValidationReport rep;
  auto& out = rep.violations;
  try {
    game.dims.check();
  } catch (const std::invalid_argument& e) {
    out.emplace_back(e.what());
    return rep;
  }
  const auto& dm = game.dims;
  const int n = dm.n, K = dm.K, N = dm.N, m = dm.m_total(), s = dm.s_total(), l = dm.l;
  const auto uN = static_cast<std::size_t>(N);
  const auto stages = static_cast<std::size_t>(K + 1);
  const auto controls = static_cast<std::size_t>(K);

  check_length(out, game.x0, n, "x0");
  if (sized(out, game.A, controls, "A")) {
    for (int k = 0; k < K; ++k) check_shape(out, game.A[k], n, n, "A at k=" + std::to_string(k));
  }
  if (sized_players(out, game.B, controls, uN, "B")) {
    for (int k = 0; k < K; ++k)
      for (int i = 0; i < N; ++i) check_shape(out, game.B[k][i], n, dm.m[i], "B " + at(k, i));
  }
  if (sized_players(out, game.R, controls, uN, "R")) {
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < N; ++i) {
        const Matrix& Ri = game.R[k][i];
        const std::string where = at(k, i);
        check_shape(out, Ri, m, m, "R " + where);
        if (Ri.rows() != m || Ri.cols() != m) continue;
        check_symmetric(rep, Ri, "R " + where);
        // Positive definiteness is required on the player's own control block.
        const Matrix own = symmetrize(Ri).block(dm.u_offset(i), dm.u_offset(i), dm.m[i], dm.m[i]);
        Eigen::LLT<Matrix> llt(own);
        if (llt.info() != Eigen::Success) {
          out.push_back("R not positive definite " + where);
        }
      }
    }
  }
  if (sized_players(out, game.Q, stages, uN, "Q")) {
    for (int k = 0; k <= K; ++k) {
      for (int i = 0; i < N; ++i) {
        check_shape(out, game.Q[k][i], n, n, "Q " + at(k, i));
        check_symmetric(rep, game.Q[k][i], "Q " + at(k, i));
      }
    }
  }
  if (sized_players(out, game.p, stages, uN, "p")) {
    for (int k = 0; k <= K; ++k)
      for (int i = 0; i < N; ++i) check_length(out, game.p[k][i], n, "p " + at(k, i));
  }
  if (sized_players(out, game.D, stages, uN, "D")) {
    for (int k = 0; k <= K; ++k) {
      for (int i = 0; i < N; ++i) {
        check_shape(out, game.D[k][i], s, s, "D " + at(k, i));
        check_symmetric(rep, game.D[k][i], "D " + at(k, i));
      }
    }
  }
  if (sized_players(out, game.d, stages, uN, "d")) {
    for (int k = 0; k <= K; ++k)
      for (int i = 0; i < N; ++i) check_length(out, game.d[k][i], s, "d " + at(k, i));
  }
  if (sized_players(out, game.L, stages, uN, "L")) {
    for (int k = 0; k <= K; ++k)
      for (int i = 0; i < N; ++i) check_shape(out, game.L[k][i], n, s, "L " + at(k, i));
  }
  if (sized(out, game.M, stages, "M")) {
    for (int k = 0; k <= K; ++k) check_shape(out, game.M[k], l, n, "M at k=" + std::to_string(k));
  }
  if (sized(out, game.Ncon, stages, "N")) {
    for (int k = 0; k <= K; ++k)
      check_shape(out, game.Ncon[k], l, s, "N at k=" + std::to_string(k));
  }
  if (sized(out, game.r, stages, "r")) {
    for (int k = 0; k <= K; ++k) check_length(out, game.r[k], l, "r at k=" + std::to_string(k));
  }
  return rep;
}

LqGame symmetrized(LqGame game) {
  auto fix = [](Matrix& a) {
    if (a.rows() == a.cols() && asymmetry(a) <= kSymmetryTol * max_abs(a)) a = symmetrize(a);
  };
  for (auto& stage : game.Q)
    for (auto& a : stage) fix(a);
  for (auto& stage : game.R)
    for (auto& a : stage) fix(a);
  for (auto& stage : game.D)
    for (auto& a : stage) fix(a);
  return game;
}

VectorSeq rollout_states(const LqGame& game, const VectorSeq& u) {
  const auto& dm = game.dims;
  require(static_cast<int>(u.size()) == dm.K, "simulate: u must have K stages");
  VectorSeq x(dm.K + 1);
  x[0] = game.x0;
  for (int k = 0; k < dm.K; ++k) {
    require(u[k].size() == dm.m_total(), "simulate: u_k has wrong dimension");
    x[k + 1] = game.A[k] * x[k] + game.stacked_B(k) * u[k];
  }
  return x;
}

double stage_cost(const LqGame& game, int k, int i, const Vector& x, const Vector& u,
                  const Vector& v) {
  double c = 0.5 * x.dot(game.Q[k][i] * x) + game.p[k][i].dot(x);
  if (k < game.dims.K) c += 0.5 * u.dot(game.R[k][i] * u);
  c += 0.5 * v.dot(game.D[k][i] * v) + game.d[k][i].dot(v) + x.dot(game.L[k][i] * v);
  return c;
}

double player_cost(const LqGame& game, int i, const VectorSeq& states, const VectorSeq& u,
                   const VectorSeq& v) {
  const int K = game.dims.K;
  double total = 0.0;
  for (int k = 0; k < K; ++k) total += stage_cost(game, k, i, states[k], u[k], v[k]);
  total += stage_cost(game, K, i, states[K], Vector(), v[K]);
  return total;
}

bool stage_feasible(const LqGame& game, int k, const Vector& x, const Vector& v, double tol) {
  const Vector slack = game.M[k] * x + game.Ncon[k] * v + game.r[k];
  return (slack.array() >= -tol).all() && (v.array() >= -tol).all();
}

Rollout simulate(const LqGame& game, const VectorSeq& u, const VectorSeq& v) {
  const auto& dm = game.dims;
  require(static_cast<int>(v.size()) == dm.K + 1, "simulate: v must have K+1 stages");
  for (const auto& vk : v) {
    require(vk.size() == dm.s_total(), "simulate: v_k has wrong dimension");
  }
  Rollout out;
  out.states = rollout_states(game, u);
  out.costs.resize(dm.N);
  for (int i = 0; i < dm.N; ++i) out.costs[i] = player_cost(game, i, out.states, u, v);
  out.feasible.resize(dm.K + 1);
  for (int k = 0; k <= dm.K; ++k) out.feasible[k] = stage_feasible(game, k, out.states[k], v[k]);
  return out;
}

NonlinearGame as_nonlinear(const LqGame& game) {
  NonlinearGame ng;
  ng.dims = game.dims;
  ng.dynamics = [game](int k, const Vector& x, const Vector& u) -> Vector {
    return game.A[k] * x + game.stacked_B(k) * u;
  };
  ng.constraint = [game](int k, const Vector& x, const Vector& v) -> Vector {
    return game.M[k] * x + game.Ncon[k] * v + game.r[k];
  };
  ng.cost = [game](int k, int i, const Vector& x, const Vector& u, const Vector& v) {
    return stage_cost(game, k, i, x, u, v);
  };
  ng.cost_gradient = [game](int k, int i, const Vector& x, const Vector& u,
                            const Vector& v) -> Vector {
    const bool terminal = k == game.dims.K;
    const Eigen::Index n = x.size(), m = terminal ? 0 : u.size(), s = v.size();
    Vector g(n + m + s);
    g.head(n) = game.Q[k][i] * x + game.p[k][i] + game.L[k][i] * v;
    if (!terminal) g.segment(n, m) = game.R[k][i] * u;
    g.tail(s) = game.D[k][i] * v + game.d[k][i] + game.L[k][i].transpose() * x;
    return g;
  };
  return ng;
}

}  // namespace olpdg
