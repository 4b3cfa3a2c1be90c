#include "olpdg/nonlinear_potential.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace olpdg {

namespace {

struct Layout {
  int n = 0, m = 0, s = 0;
  bool terminal = false;

  int size() const { return n + (terminal ? 0 : m) + s; }
  int u_start() const { return n; }
  int v_start() const { return n + (terminal ? 0 : m); }
};

Layout layout(const Dims& dims, int k) {
  return {dims.n, dims.m_total(), dims.s_total(), k == dims.K};
}

void split(const Layout& lay, const Vector& z, Vector& x, Vector& u, Vector& v) {
  x = z.head(lay.n);
  u = lay.terminal ? Vector() : Vector(z.segment(lay.u_start(), lay.m));
  v = z.tail(lay.s);
}

// Cost at a concatenated point; nullopt when the evaluator throws or returns
// a non-finite value.
std::optional<double> eval(const NonlinearGame& game, int k, int i, const Layout& lay,
                           const Vector& z) {
  Vector x, u, v;
  split(lay, z, x, u, v);
  try {
    const double value = game.cost(k, i, x, u, v);
    if (!std::isfinite(value)) return std::nullopt;
    return value;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

double scaled_step(double h, double coordinate) {
  return h * std::max(1.0, std::abs(coordinate));
}

std::optional<double> first_partial(const NonlinearGame& game, int k, int i, const Layout& lay,
                                    const Vector& z, int a, double h) {
  const double ha = scaled_step(h, z[a]);
  Vector zp = z, zm = z;
  zp[a] += ha;
  zm[a] -= ha;
  const auto fp = eval(game, k, i, lay, zp);
  const auto fm = eval(game, k, i, lay, zm);
  if (!fp || !fm) return std::nullopt;
  return (*fp - *fm) / (2.0 * ha);
}

std::optional<double> mixed_partial(const NonlinearGame& game, int k, int i, const Layout& lay,
                                    const Vector& z, int a, int b, double h) {
  const double ha = scaled_step(h, z[a]);
  const double hb = scaled_step(h, z[b]);
  double acc = 0.0;
  for (int sa : {1, -1}) {
    for (int sb : {1, -1}) {
      Vector zz = z;
      zz[a] += sa * ha;
      zz[b] += sb * hb;
      const auto f = eval(game, k, i, lay, zz);
      if (!f) return std::nullopt;
      acc += sa * sb * *f;
    }
  }
  return acc / (4.0 * ha * hb);
}

struct Block {
  int start = 0;
  int size = 0;
};

}  // namespace

SymmetryReport check_symmetry(const NonlinearGame& game, const std::vector<StagePoint>& samples,
                              const SymmetryOptions& options) {
  require(options.fd_step > 0.0, "check_symmetry: fd_step must be > 0");
  require(static_cast<bool>(game.cost), "check_symmetry: game has no cost evaluator");
  const Dims& dims = game.dims;
  const int N = dims.N;
  SymmetryReport report;

  for (int sidx = 0; sidx < static_cast<int>(samples.size()); ++sidx) {
    const StagePoint& sp = samples[sidx];
    require(sp.k >= 0 && sp.k <= dims.K, "check_symmetry: sample stage out of range");
    const Layout lay = layout(dims, sp.k);
    require(sp.x.size() == lay.n && sp.v.size() == lay.s &&
                (lay.terminal || sp.u.size() == lay.m),
            "check_symmetry: sample point has the wrong dimension");
    Vector z(lay.size());
    z.head(lay.n) = sp.x;
    if (!lay.terminal) z.segment(lay.u_start(), lay.m) = sp.u;
    z.tail(lay.s) = sp.v;

    std::vector<Block> ub(N), vb(N);
    for (int i = 0; i < N; ++i) {
      ub[i] = {lay.u_start() + dims.u_offset(i), dims.m[i]};
      vb[i] = {lay.v_start() + dims.v_offset(i), dims.s[i]};
    }

    bool failed = false;
    auto record = [&](const char* cond, int i, int j, double dev) {
      report.max_deviation = std::max(report.max_deviation, dev);
      if (dev > options.tol) report.worst.push_back({cond, sp.k, i, j, sidx, dev});
    };
    // Max |d2 g^i / da db - d2 g^j / da db| over a in block P, b in block R.
    auto cross = [&](int i, int j, const Block& P, const Block& R) -> double {
      double worst = 0.0;
      for (int a = P.start; a < P.start + P.size; ++a) {
        for (int b = R.start; b < R.start + R.size; ++b) {
          const auto gi = mixed_partial(game, sp.k, i, lay, z, a, b, options.fd_step);
          const auto gj = mixed_partial(game, sp.k, j, lay, z, a, b, options.fd_step);
          if (!gi || !gj) {
            failed = true;
            return 0.0;
          }
          worst = std::max(worst, std::abs(*gi - *gj));
        }
      }
      return worst;
    };

    const double h1 = std::max(options.fd_step / 10.0, 1e-8);
    for (int i = 0; i < N && !failed; ++i) {
      for (int j = i + 1; j < N && !failed; ++j) {
        double dx = 0.0;
        for (int a = 0; a < lay.n && !failed; ++a) {
          const auto gi = first_partial(game, sp.k, i, lay, z, a, h1);
          const auto gj = first_partial(game, sp.k, j, lay, z, a, h1);
          if (!gi || !gj) {
            failed = true;
            break;
          }
          dx = std::max(dx, std::abs(*gi - *gj));
        }
        if (failed) break;
        record("px", i, j, dx);
        if (!lay.terminal) {
          const double du = cross(i, j, ub[i], ub[j]);
          if (failed) break;
          record("ux", i, j, du);
        }
        const double dv = cross(i, j, vb[i], vb[j]);
        if (failed) break;
        record("vv", i, j, dv);
      }
    }
    if (!lay.terminal) {
      for (int i = 0; i < N && !failed; ++i) {
        for (int j = 0; j < N && !failed; ++j) {
          if (i == j) continue;
          // Field symmetry between the u^i and v^j components.
          const double dsep = cross(i, j, ub[i], vb[j]);
          if (failed) break;
          record("sep", i, j, dsep);
        }
      }
    }
    if (failed) report.flagged_samples.push_back(sidx);
  }
  report.holds = report.worst.empty();
  return report;
}

Vector build_field(const NonlinearGame& game, int k, const Vector& point) {
  const Dims& dims = game.dims;
  require(k >= 0 && k <= dims.K, "build_field: stage out of range");
  const Layout lay = layout(dims, k);
  require(point.size() == lay.size(), "build_field: point has the wrong dimension");
  const int N = dims.N;

  auto block_name = [&](int i, const char* kind) {
    return std::string(kind) + "^" + std::to_string(i + 1);
  };

  Vector F = Vector::Zero(lay.size());
  auto fill = [&](int i, int start, int size, const char* kind) {
    if (size == 0) return;
    if (game.cost_gradient) {
      Vector x, u, v;
      split(lay, point, x, u, v);
      Vector g;
      try {
        g = game.cost_gradient(k, i, x, u, v);
      } catch (const std::exception& e) {
        throw NumericalError("build_field: gradient of player " + std::to_string(i + 1) +
                             " failed in block " + block_name(i, kind) + ": " + e.what());
      }
      require(g.size() == lay.size(), "build_field: gradient has the wrong dimension");
      F.segment(start, size) = g.segment(start, size);
      return;
    }
    require(static_cast<bool>(game.cost), "build_field: game has no cost evaluator");
    for (int a = start; a < start + size; ++a) {
      const auto d = first_partial(game, k, i, lay, point, a, 1e-6);
      if (!d) {
        throw NumericalError("build_field: cost of player " + std::to_string(i + 1) +
                             " failed in block " + block_name(i, kind));
      }
      F[a] = *d;
    }
  };

  if (N > 0) fill(0, 0, lay.n, "x");
  for (int i = 0; i < N && !lay.terminal; ++i) {
    fill(i, lay.u_start() + dims.u_offset(i), dims.m[i], "u");
  }
  for (int i = 0; i < N; ++i) fill(i, lay.v_start() + dims.v_offset(i), dims.s[i], "v");
  return F;
}

double integrate_potential(const NonlinearGame& game, int k, const Vector& point,
                           const PathSpec& path) {
  require(path.quadrature_nodes >= 2, "integrate_potential: quadrature_nodes must be >= 2");
  const Vector base = path.base_point.size() == 0 ? Vector(Vector::Zero(point.size()))
                                                  : path.base_point;
  require(base.size() == point.size(), "integrate_potential: base point dimension mismatch");
  const Vector dir = point - base;
  return simpson(
      [&](double z) { return build_field(game, k, base + z * dir).dot(dir); }, 0.0, 1.0,
      path.quadrature_nodes);
}

}  // namespace olpdg
