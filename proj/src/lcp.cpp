#include "olpdg/lcp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace olpdg {

const char* to_string(LcpStatus status) {
  switch (status) {
    case LcpStatus::solved: return "solved";
    case LcpStatus::ray_termination: return "ray_termination";
    case LcpStatus::max_pivots: return "max_pivots";
    case LcpStatus::infeasible_stage: return "infeasible_stage";
  }
  return "unknown";
}

std::vector<int> LcpSolution::active_set(double tol) const {
  std::vector<int> out;
  for (int i = 0; i < z.size(); ++i) {
    if (z[i] > tol) out.push_back(i);
  }
  return out;
}

bool is_complementary(const Vector& z, const Vector& w, double tol) {
  if (z.size() != w.size()) return false;
  if (z.size() == 0) return true;
  if (z.minCoeff() < -tol || w.minCoeff() < -tol) return false;
  return std::abs(z.dot(w)) <= tol * (1.0 + z.norm() * w.norm());
}

namespace {

// Tableau over the variables w_0..w_{d-1}, z_0..z_{d-1}, z0 (artificial):
//   [B^{-1} | -B^{-1} M | -B^{-1} e | B^{-1} q]
class LemkeTableau {
 public:
  explicit LemkeTableau(const LcpProblem& p)
      : d_(p.size()), t_(d_, 2 * d_ + 2), basis_(d_) {
    t_.leftCols(d_).setIdentity();
    t_.middleCols(d_, d_) = -p.M;
    t_.col(artificial()).setConstant(-1.0);
    t_.col(rhs()).noalias() = p.q;
    for (int i = 0; i < d_; ++i) basis_[i] = i;
  }

  int artificial() const { return 2 * d_; }
  int rhs() const { return 2 * d_ + 1; }
  int complement(int var) const { return var < d_ ? var + d_ : var - d_; }
  int basic(int row) const { return basis_[row]; }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int i = 0; i < d_; ++i) {
      if (i != row && t_(i, col) != 0.0) t_.row(i) -= t_(i, col) * t_.row(row);
    }
    basis_[row] = col;
  }

  // Row whose (rhs, B^{-1} row) is lexicographically smallest; ties in the
  // rhs resolve towards the larger index. Used for the artificial entry.
  int initial_row() const {
    int best = 0;
    for (int i = 1; i < d_; ++i) {
      if (t_(i, rhs()) <= t_(best, rhs())) best = i;
    }
    return best;
  }

  // Lexicographic minimum ratio test for an entering column. Returns -1 when
  // the column has no positive entry (secondary ray).
  int ratio_row(int col, double pivot_tol) const {
    std::vector<int> rows;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d_; ++i) {
      const double a = t_(i, col);
      if (a > pivot_tol) {
        rows.push_back(i);
        best = std::min(best, t_(i, rhs()) / a);
      }
    }
    if (rows.empty()) return -1;
    const double band = 1e-12 * (1.0 + std::abs(best));
    std::vector<int> ties;
    for (int i : rows) {
      if (t_(i, rhs()) / t_(i, col) <= best + band) ties.push_back(i);
    }
    for (int i : ties) {
      if (basis_[i] == artificial()) return i;
    }
    // Break remaining ties on the rows of B^{-1} scaled by the pivot column.
    for (int j = 0; j < d_ && ties.size() > 1; ++j) {
      double lo = std::numeric_limits<double>::infinity();
      for (int i : ties) lo = std::min(lo, t_(i, j) / t_(i, col));
      std::vector<int> keep;
      for (int i : ties) {
        if (t_(i, j) / t_(i, col) <= lo + 1e-14 * (1.0 + std::abs(lo))) keep.push_back(i);
      }
      ties.swap(keep);
    }
    return ties.front();
  }

  Vector z() const {
    Vector z = Vector::Zero(d_);
    for (int i = 0; i < d_; ++i) {
      const int var = basis_[i];
      if (var >= d_ && var < 2 * d_) z[var - d_] = t_(i, rhs());
    }
    return z;
  }

  std::vector<int> basic_z() const {
    std::vector<int> out;
    for (int var : basis_) {
      if (var >= d_ && var < 2 * d_) out.push_back(var - d_);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  int d_;
  Matrix t_;
  std::vector<int> basis_;
};

// Solves the complementary system for the given basic z set.
bool solve_basis(const LcpProblem& p, const std::vector<int>& alpha, Vector& z) {
  const int d = p.size();
  z = Vector::Zero(d);
  if (alpha.empty()) return true;
  const auto na = static_cast<Eigen::Index>(alpha.size());
  Matrix Maa(na, na);
  Vector qa(na);
  for (Eigen::Index r = 0; r < na; ++r) {
    qa[r] = p.q[alpha[r]];
    for (Eigen::Index c = 0; c < na; ++c) Maa(r, c) = p.M(alpha[r], alpha[c]);
  }
  const Eigen::FullPivLU<Matrix> lu(Maa);
  if (!lu.isInvertible()) return false;
  const Vector za = lu.solve(-qa);
  if (!za.allFinite()) return false;
  for (Eigen::Index r = 0; r < na; ++r) z[alpha[r]] = za[r];
  return true;
}

LcpSolution finish(const LcpProblem& p, Vector z, double tol) {
  LcpSolution sol;
  for (int i = 0; i < z.size(); ++i) {
    if (z[i] < 0.0 && z[i] > -tol) z[i] = 0.0;
  }
  sol.z = std::move(z);
  sol.w = p.M * sol.z + p.q;
  return sol;
}

}  // namespace

LcpSolution lemke_solve(const LcpProblem& problem, const LemkeOptions& options) {
  const int d = problem.size();
  require(d >= 1, "lemke_solve: empty problem");
  require(problem.M.rows() == d && problem.M.cols() == d, "lemke_solve: M must be d x d");
  const int max_pivots = options.max_pivots > 0 ? options.max_pivots : 50 * d + 100;

  if (problem.q.minCoeff() >= 0.0) {
    LcpSolution sol = finish(problem, Vector::Zero(d), options.tol);
    sol.status = LcpStatus::solved;
    return sol;
  }

  LemkeTableau tab(problem);
  int row = tab.initial_row();
  int leaving = tab.basic(row);
  tab.pivot(row, tab.artificial());
  int pivots = 1;
  int entering = tab.complement(leaving);

  LcpSolution sol;
  while (true) {
    if (pivots >= max_pivots) {
      sol = finish(problem, tab.z(), options.tol);
      sol.status = LcpStatus::max_pivots;
      sol.pivots = pivots;
      sol.diagnostics = "pivot limit reached";
      return sol;
    }
    row = tab.ratio_row(entering, options.pivot_tol);
    if (row < 0) {
      sol = finish(problem, tab.z(), options.tol);
      sol.status = LcpStatus::ray_termination;
      sol.pivots = pivots;
      std::ostringstream os;
      os << "secondary ray on entering variable "
         << (entering < d ? "w" : "z") << (entering % d) << " after " << pivots << " pivots";
      sol.diagnostics = os.str();
      return sol;
    }
    leaving = tab.basic(row);
    tab.pivot(row, entering);
    ++pivots;
    if (leaving == tab.artificial()) break;
    entering = tab.complement(leaving);
  }

  Vector z = tab.z();
  Vector polished;
  if (solve_basis(problem, tab.basic_z(), polished)) {
    const Vector w = problem.M * polished + problem.q;
    if (is_complementary(polished, w, options.tol)) z = polished;
  }
  sol = finish(problem, z, options.tol);
  sol.pivots = pivots;
  if (is_complementary(sol.z, sol.w, options.tol)) {
    sol.status = LcpStatus::solved;
  } else {
    sol.status = LcpStatus::ray_termination;
    sol.diagnostics = "terminal basis violates complementarity beyond tolerance";
  }
  return sol;
}

std::vector<LcpSolution> enumerate_solve(const LcpProblem& problem, double tol) {
  const int d = problem.size();
  if (d > kEnumerationMaxSize) {
    throw std::invalid_argument("enumerate_solve: d = " + std::to_string(d) +
                                " exceeds the enumeration cap of " +
                                std::to_string(kEnumerationMaxSize));
  }
  require(problem.M.rows() == d && problem.M.cols() == d, "enumerate_solve: M must be d x d");
  std::vector<LcpSolution> found;
  const std::uint32_t count = 1u << d;
  std::vector<int> alpha;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    alpha.clear();
    for (int i = 0; i < d; ++i) {
      if (mask & (1u << i)) alpha.push_back(i);
    }
    Vector z;
    if (!solve_basis(problem, alpha, z)) continue;
    if (z.size() && z.minCoeff() < -tol) continue;
    LcpSolution sol = finish(problem, z, tol);
    if (!is_complementary(sol.z, sol.w, tol)) continue;
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const LcpSolution& f) {
      return max_abs(Vector(f.z - sol.z)) <= tol * (1.0 + max_abs(sol.z));
    });
    if (!duplicate) found.push_back(std::move(sol));
  }
  return found;
}

StageBlocks assemble_stage_blocks(const OcpData& ocp, const LqGame& game) {
  const auto& dm = game.dims;
  const int K = dm.K, n = dm.n, s = dm.s_total(), l = dm.l, blk = s + l;
  StageBlocks b;
  b.Mtilde = Matrix::Zero(K * blk, K * blk);
  b.qtilde = Matrix::Zero(K * blk, K * n);
  b.stilde.resize(K * blk);
  for (int k = 1; k <= K; ++k) {
    const int off = (k - 1) * blk;
    auto Mk = b.Mtilde.block(off, off, blk, blk);
    Mk.topLeftCorner(s, s) = ocp.D[k];
    Mk.topRightCorner(s, l) = -game.Ncon[k].transpose();
    Mk.bottomLeftCorner(l, s) = game.Ncon[k];
    auto qk = b.qtilde.block(off, (k - 1) * n, blk, n);
    qk.topRows(s) = ocp.L[k].transpose();
    qk.bottomRows(l) = game.M[k];
    b.stilde.segment(off, s) = ocp.d[k];
    b.stilde.segment(off + s, l) = game.r[k];
  }
  return b;
}

namespace {

std::vector<LcpLabel> stage_labels(const Dims& dm, int k) {
  std::vector<LcpLabel> out;
  for (int i = 0; i < dm.N; ++i) {
    for (int c = 0; c < dm.s[i]; ++c) {
      out.push_back({k, LcpLabel::Kind::v, i, dm.v_offset(i) + c});
    }
  }
  for (int c = 0; c < dm.l; ++c) out.push_back({k, LcpLabel::Kind::mu, -1, c});
  return out;
}

}  // namespace

LcpProblem assemble_lcp(const StageBlocks& blocks, const AffineMaps& maps, const LqGame& game,
                        const OcpData& ocp) {
  const auto& dm = game.dims;
  const int K = dm.K, n = dm.n;
  Vector p_stack(K * n);
  for (int k = 1; k <= K; ++k) p_stack.segment((k - 1) * n, n) = ocp.p[k];
  LcpProblem prob;
  prob.M = blocks.Mtilde + blocks.qtilde * maps.Phi2;
  prob.q = blocks.qtilde * (maps.Phi0 * game.x0 + maps.Phi1 * p_stack) + blocks.stilde;
  for (int k = 1; k <= K; ++k) {
    const auto labels = stage_labels(dm, k);
    prob.labels.insert(prob.labels.end(), labels.begin(), labels.end());
  }
  return prob;
}

LcpProblem stage_problem(const OcpData& ocp, const LqGame& game, int k, const Vector& x) {
  const auto& dm = game.dims;
  const int s = dm.s_total(), l = dm.l;
  LcpProblem prob;
  prob.M = Matrix::Zero(s + l, s + l);
  prob.M.topLeftCorner(s, s) = ocp.D[k];
  prob.M.topRightCorner(s, l) = -game.Ncon[k].transpose();
  prob.M.bottomLeftCorner(l, s) = game.Ncon[k];
  prob.q.resize(s + l);
  prob.q.head(s) = ocp.L[k].transpose() * x + ocp.d[k];
  prob.q.tail(l) = game.M[k] * x + game.r[k];
  prob.labels = stage_labels(dm, k);
  return prob;
}

StageSolution solve_stage0(const OcpData& ocp, const LqGame& game, const Vector& x0,
                           const LemkeOptions& options) {
  const int s = game.dims.s_total(), l = game.dims.l;
  StageSolution out;
  out.lcp = lemke_solve(stage_problem(ocp, game, 0, x0), options);
  if (out.lcp.status != LcpStatus::solved) {
    out.lcp.diagnostics = "stage 0: " + std::string(to_string(out.lcp.status)) +
                          (out.lcp.diagnostics.empty() ? "" : "; " + out.lcp.diagnostics);
    out.lcp.status = LcpStatus::infeasible_stage;
  }
  out.v = out.lcp.z.head(s);
  out.mu = out.lcp.z.tail(l);
  return out;
}

}  // namespace olpdg
