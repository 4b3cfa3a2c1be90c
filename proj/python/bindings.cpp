#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "olpdg/io.hpp"
#include "olpdg/lcp.hpp"
#include "olpdg/pipeline.hpp"
#include "olpdg/potential.hpp"
#include "olpdg/smartgrid.hpp"
#include "olpdg/verify.hpp"

namespace py = pybind11;
using namespace olpdg;

namespace {

// Rows are stages; an empty sequence gives a 0 x 0 array.
Matrix rows_of(const VectorSeq& seq) {
  if (seq.empty()) return Matrix();
  Matrix out(seq.size(), seq.front().size());
  for (std::size_t k = 0; k < seq.size(); ++k) out.row(k) = seq[k].transpose();
  return out;
}

VectorSeq seq_of(const Matrix& m) {
  VectorSeq out;
  for (Eigen::Index k = 0; k < m.rows(); ++k) out.push_back(m.row(k).transpose());
  return out;
}

py::object wrap(io::GameDocument doc) {
  if (auto* g = std::get_if<LqGame>(&doc)) return py::cast(std::move(*g));
  return py::cast(std::get<smartgrid::Scenario>(std::move(doc)));
}

py::dict dims_dict(const Dims& d) {
  py::dict out;
  out["n"] = d.n;
  out["N"] = d.N;
  out["K"] = d.K;
  out["m"] = d.m;
  out["s"] = d.s;
  out["l"] = d.l;
  return out;
}

EquilibriumTrajectory trajectory_from(const py::dict& t) {
  EquilibriumTrajectory out;
  out.x = seq_of(t["x"].cast<Matrix>());
  out.u = seq_of(t["u"].cast<Matrix>());
  out.v = seq_of(t["v"].cast<Matrix>());
  out.lambda = seq_of(t["lambda"].cast<Matrix>());
  out.mu = seq_of(t["mu"].cast<Matrix>());
  return out;
}

py::dict trajectory_dict(const EquilibriumTrajectory& t) {
  py::dict out;
  out["x"] = rows_of(t.x);
  out["u"] = rows_of(t.u);
  out["v"] = rows_of(t.v);
  out["lambda"] = rows_of(t.lambda);
  out["mu"] = rows_of(t.mu);
  return out;
}

}  // namespace

PYBIND11_MODULE(_olpdg, m) {
  m.doc() = "Open-loop potential difference games";

  py::register_exception<PipelineError>(m, "PipelineError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<LqGame>(m, "Game")
      .def_property_readonly("dims", [](const LqGame& g) { return dims_dict(g.dims); })
      .def_property_readonly("x0", [](const LqGame& g) { return g.x0; })
      .def("to_json", [](const LqGame& g) { return io::to_json(g); })
      .def("simulate",
           [](const LqGame& g, const Matrix& u, const Matrix& v) {
             const Rollout r = simulate(g, seq_of(u), seq_of(v));
             return py::make_tuple(rows_of(r.states), r.costs, r.feasible);
           },
           py::arg("u"), py::arg("v"),
           "Returns (states, per-player costs, per-stage feasibility).");

  py::class_<smartgrid::Scenario>(m, "Scenario")
      .def_readonly("S", &smartgrid::Scenario::S)
      .def_readonly("N", &smartgrid::Scenario::N)
      .def_readonly("K", &smartgrid::Scenario::K)
      .def_readonly("Kmax", &smartgrid::Scenario::Kmax)
      .def("to_game", &smartgrid::to_nzdg)
      .def("to_json", [](const smartgrid::Scenario& s) { return io::to_json(s); })
      .def("scale_incentive",
           [](smartgrid::Scenario s, int user, double factor) {
             if (user < 0 || user >= s.N) throw py::index_error("user out of range");
             for (auto& a : s.a) a[user] *= factor;
             return s;
           },
           py::arg("user"), py::arg("factor"),
           "Copy with user's storage incentive a multiplied by factor.");

  py::class_<LcpSolution>(m, "LcpResult")
      .def_readonly("z", &LcpSolution::z)
      .def_readonly("w", &LcpSolution::w)
      .def_readonly("pivots", &LcpSolution::pivots)
      .def_property_readonly("status", [](const LcpSolution& s) { return to_string(s.status); })
      .def("active_set", &LcpSolution::active_set, py::arg("tol") = 1e-9);

  py::class_<Equilibrium>(m, "Equilibrium")
      .def_property_readonly("trajectory",
                             [](const Equilibrium& e) { return trajectory_dict(e.trajectory); })
      .def_readonly("lcp", &Equilibrium::lcp_solution)
      .def_property_readonly("lcp_size", [](const Equilibrium& e) { return e.lcp.size(); });

  py::class_<Certificate>(m, "Certificate")
      .def_readonly("kkt_ok", &Certificate::kkt_ok)
      .def_readonly("hessian_pd", &Certificate::hessian_pd)
      .def_readonly("nash_ok", &Certificate::nash_ok)
      .def_readonly("failures", &Certificate::failures)
      .def_property_readonly("passed", &Certificate::passed)
      .def_property_readonly("kkt_residual", [](const Certificate& c) { return c.kkt.scaled(); })
      .def_property_readonly("hessian_min_pivot",
                             [](const Certificate& c) { return c.hessian.min_pivot; })
      .def_property_readonly("gaps", [](const Certificate& c) {
        std::vector<double> out;
        for (const auto& br : c.best_responses) out.push_back(br.gap);
        return out;
      });

  m.def("default_scenario", &smartgrid::default_scenario);
  m.def("parse", [](const std::string& text) { return wrap(io::parse_game(text)); },
        py::arg("text"), "Parse a JSON game or scenario document.");
  m.def("load", [](const std::string& path) { return wrap(io::load_game(path)); },
        py::arg("path"));

  m.def("check_potential",
        [](const LqGame& g) {
          const PotentialReport rep = check_conditions(g);
          std::vector<std::string> v;
          for (const auto& x : rep.violations) v.push_back(to_string(x));
          return py::make_tuple(rep.is_potential, v);
        },
        py::arg("game"), "Returns (is_potential, violation messages).");

  m.def("solve", [](const LqGame& g) { return solve_equilibrium(g); }, py::arg("game"));
  m.def("solve", [](const smartgrid::Scenario& s) { return solve_equilibrium(smartgrid::to_nzdg(s)); },
        py::arg("scenario"));

  m.def("certify",
        [](const LqGame& g, const py::dict& traj, double kkt_tol, double gap_tol,
           std::uint64_t seed, int trials) {
          CertifyOptions opt;
          opt.kkt_tol = kkt_tol;
          opt.gap_tol = gap_tol;
          opt.best_response.seed = seed;
          opt.best_response.trials = trials;
          return certify(build_ocp(g), g, trajectory_from(traj), opt);
        },
        py::arg("game"), py::arg("trajectory"), py::arg("kkt_tol") = 1e-8,
        py::arg("gap_tol") = 1e-6, py::arg("seed") = 1, py::arg("trials") = 64);

  m.def("lemke_solve",
        [](const Matrix& M, const Vector& q, int max_pivots) {
          LcpProblem p;
          p.M = M;
          p.q = q;
          LemkeOptions opt;
          opt.max_pivots = max_pivots;
          return lemke_solve(p, opt);
        },
        py::arg("M"), py::arg("q"), py::arg("max_pivots") = 0);

  m.def("smartgrid_report",
        [](const smartgrid::Scenario& s, const py::dict& traj) {
          const smartgrid::Report r = smartgrid::extract_report(trajectory_from(traj), s);
          py::dict out;
          out["resources"] = rows_of(r.resources);
          out["battery"] = r.battery;
          out["storage_margin"] = r.storage_margin;
          out["total_cost"] = r.total_cost;
          std::vector<Matrix> cons;
          for (int i = 0; i < s.N; ++i) {
            VectorSeq per;
            for (const auto& stage : r.consumption) per.push_back(stage[i]);
            cons.push_back(rows_of(per));
          }
          out["consumption"] = cons;
          std::vector<double> totals;
          for (int i = 0; i < s.N; ++i) totals.push_back(r.total_storage(i));
          out["total_storage"] = totals;
          return out;
        },
        py::arg("scenario"), py::arg("trajectory"));
}
