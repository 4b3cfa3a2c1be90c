#include "olpdg/potential.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace olpdg {

bool EqualityTolerance::equal(const Matrix& a, const Matrix& b, double* deviation) const {
  const double dev = max_abs(Matrix(a - b));
  if (deviation) *deviation = dev;
  const double scale = std::max(max_abs(a), max_abs(b));
  return dev <= std::max(abs, rel * scale);
}

PotentialReport check_conditions(const LqGame& game, const EqualityTolerance& tol) {
  const auto& dm = game.dims;
  PotentialReport rep;
  auto record = [&](const char* cond, int k, int i, int j, const Matrix& a, const Matrix& b) {
    double dev = 0.0;
    if (!tol.equal(a, b, &dev)) rep.violations.push_back({cond, k, i, j, dev});
  };
  for (int k = 0; k <= dm.K; ++k) {
    for (int i = 0; i < dm.N; ++i) {
      for (int j = i + 1; j < dm.N; ++j) {
        const int ui = dm.u_offset(i), uj = dm.u_offset(j);
        const int vi = dm.v_offset(i), vj = dm.v_offset(j);
        if (k < dm.K) {
          record("Ri-Rj", k, i, j, game.R[k][i].block(ui, uj, dm.m[i], dm.m[j]),
                 game.R[k][j].block(ui, uj, dm.m[i], dm.m[j]));
        }
        record("Qi-Qj", k, i, j, game.Q[k][i], game.Q[k][j]);
        record("pi-pj", k, i, j, game.p[k][i], game.p[k][j]);
        record("Li-Lj", k, i, j, game.L[k][i], game.L[k][j]);
        record("Di-Dj", k, i, j, game.D[k][i].block(vi, vj, dm.s[i], dm.s[j]),
               game.D[k][j].block(vi, vj, dm.s[i], dm.s[j]));
      }
    }
  }
  rep.is_potential = rep.violations.empty();
  return rep;
}

OcpData build_ocp(const LqGame& game, const EqualityTolerance& tol) {
  const auto rep = check_conditions(game, tol);
  if (!rep.is_potential) {
    throw std::invalid_argument("build_ocp: game is not potential (" +
                                to_string(rep.violations.front()) + ")");
  }
  const auto& dm = game.dims;
  const int K = dm.K;
  OcpData ocp;
  ocp.Q.resize(K + 1);
  ocp.p.resize(K + 1);
  ocp.R.resize(K);
  ocp.D.resize(K + 1);
  ocp.d.resize(K + 1);
  ocp.L.resize(K + 1);

  auto check_sym = [&](const Matrix& a, const char* name, int k) {
    const double scale = max_abs(a);
    if (asymmetry(a) > std::max(tol.abs, 1e-10 * scale)) {
      std::ostringstream os;
      os << "build_ocp: pooled " << name << " at k=" << k << " is asymmetric ("
         << asymmetry(a) << ")";
      throw std::logic_error(os.str());
    }
  };

  for (int k = 0; k <= K; ++k) {
    ocp.Q[k] = game.Q[k][0];
    ocp.p[k] = game.p[k][0];
    ocp.L[k] = game.L[k][0];
    Matrix D(dm.s_total(), dm.s_total());
    Vector d(dm.s_total());
    for (int i = 0; i < dm.N; ++i) {
      const int off = dm.v_offset(i);
      D.middleRows(off, dm.s[i]) = game.D[k][i].middleRows(off, dm.s[i]);
      d.segment(off, dm.s[i]) = game.d[k][i].segment(off, dm.s[i]);
    }
    check_sym(D, "D", k);
    ocp.D[k] = symmetrize(D);
    ocp.d[k] = d;
    if (k < K) {
      Matrix R(dm.m_total(), dm.m_total());
      for (int i = 0; i < dm.N; ++i) {
        const int off = dm.u_offset(i);
        R.middleRows(off, dm.m[i]) = game.R[k][i].middleRows(off, dm.m[i]);
      }
      check_sym(R, "R", k);
      ocp.R[k] = symmetrize(R);
    }
  }
  return ocp;
}

double potential_value(const OcpData& ocp, int k, const Vector& x, const Vector& u,
                       const Vector& v) {
  double val = 0.5 * x.dot(ocp.Q[k] * x) + ocp.p[k].dot(x);
  if (k < ocp.horizon()) val += 0.5 * u.dot(ocp.R[k] * u);
  val += 0.5 * v.dot(ocp.D[k] * v) + ocp.d[k].dot(v) + x.dot(ocp.L[k] * v);
  return val;
}

double ocp_objective(const OcpData& ocp, const VectorSeq& states, const VectorSeq& u,
                     const VectorSeq& v) {
  const int K = ocp.horizon();
  double total = potential_value(ocp, K, states[K], Vector(), v[K]);
  for (int k = 0; k < K; ++k) total += potential_value(ocp, k, states[k], u[k], v[k]);
  return total;
}

std::string to_string(const PotentialViolation& v) {
  std::ostringstream os;
  os << v.condition << ", k=" << v.k << ", (" << v.i + 1 << "," << v.j + 1
     << "), deviation " << v.deviation;
  return os.str();
}

}  // namespace olpdg
