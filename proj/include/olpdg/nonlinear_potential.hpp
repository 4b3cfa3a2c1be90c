#pragma once

// Numerical potential-game test for games given through cost callbacks, and
// evaluation of the potential by line integration of the pseudo-gradient
// field
//   F_k = [dg^1/dx; dg^1/du^1; ...; dg^N/du^N; dg^1/dv^1; ...; dg^N/dv^N].

#include <string>
#include <vector>

#include "olpdg/game.hpp"

namespace olpdg {

struct StagePoint {
  int k = 0;
  Vector x;
  Vector u;  // empty at k == K
  Vector v;
};

struct SymmetryIssue {
  // "ux": cross second derivatives in (u^i, u^j) differ between g^i and g^j.
  // "px": first derivatives in x differ between g^i and g^j.
  // "vv": cross second derivatives in (v^i, v^j) differ.
  // "sep": cross second derivatives in (u^i, v^j) differ, i != j.
  std::string condition;
  int k = 0;
  int i = 0;
  int j = 0;
  int sample = 0;
  double deviation = 0.0;
};

struct SymmetryReport {
  bool holds = true;
  std::vector<SymmetryIssue> worst;  // one entry per failing (condition, k, i, j, sample)
  std::vector<int> flagged_samples;  // evaluator failed near these points
  double max_deviation = 0.0;
};

struct SymmetryOptions {
  double fd_step = 1e-5;
  double tol = 1e-4;
};

SymmetryReport check_symmetry(const NonlinearGame& game, const std::vector<StagePoint>& samples,
                              const SymmetryOptions& options = {});

// Field F_k at a concatenated point (x, u, v), or (x, v) at k == K. Uses the
// game's analytic gradient when present, central differences (step 1e-6)
// otherwise. Throws NumericalError naming the block when an evaluation fails.
Vector build_field(const NonlinearGame& game, int k, const Vector& point);

struct PathSpec {
  Vector base_point;         // empty selects the origin
  int quadrature_nodes = 16; // Simpson panels, >= 2
};

// Line integral of F_k along the straight segment from the base point to
// point, with integration constant zero.
double integrate_potential(const NonlinearGame& game, int k, const Vector& point,
                           const PathSpec& path = {});

// Composite Simpson rule over [a, b] with the given number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  require(panels >= 1, "simpson: panels must be >= 1");
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double z0 = a + p * h;
    sum += f(z0) + 4.0 * f(z0 + 0.5 * h) + f(z0 + h);
  }
  return sum * h / 6.0;
}

}  // namespace olpdg
