// olpdg: check, solve and certify constrained LQ potential games from the
// command line.
//
// Exit status: 0 success, 1 bad input, 2 not a potential game, 3 solver
// failure, 4 certificate failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "olpdg/io.hpp"
#include "olpdg/pipeline.hpp"
#include "olpdg/smartgrid.hpp"
#include "olpdg/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace olpdg;

namespace {

enum Exit { kOk = 0, kInput = 1, kNotPotential = 2, kSolver = 3, kCertificate = 4 };

struct RunConfig {
  std::string mode;
  std::string input;
  std::string out = "out";
  std::string trajectory;
  double tol = 1e-8;
  double gap_tol = 1e-6;
  double potential_tol = 1e-10;
  std::uint64_t seed = 1;
  int trials = 64;
  std::string param;
  std::vector<double> scales;
  std::set<std::string> emit = {"trajectory.csv", "lcp.csv", "report.json", "summary.txt"};

  bool emits(const std::string& name) const { return emit.count(name) > 0; }
};

// Loaded input: an LQ game, possibly built from a smart-grid scenario.
struct Input {
  LqGame game;
  std::optional<smartgrid::Scenario> scenario;
};

Input load_input(const RunConfig& cfg, bool scenario_default) {
  Input in;
  if (cfg.input.empty()) {
    if (!scenario_default) throw std::invalid_argument("--input is required for this mode");
    in.scenario = smartgrid::default_scenario();
  } else {
    auto doc = io::load_game(cfg.input);
    if (auto* sc = std::get_if<smartgrid::Scenario>(&doc)) {
      in.scenario = *sc;
    } else {
      in.game = std::get<LqGame>(doc);
    }
  }
  if (in.scenario) in.game = smartgrid::to_nzdg(*in.scenario);
  return in;
}

json potential_json(const PotentialReport& rep) {
  json j;
  j["is_potential"] = rep.is_potential;
  j["violations"] = json::array();
  for (const auto& v : rep.violations) {
    j["violations"].push_back({{"condition", v.condition},
                               {"k", v.k},
                               {"i", v.i + 1},
                               {"j", v.j + 1},
                               {"deviation", v.deviation},
                               {"message", to_string(v)}});
  }
  return j;
}

json kkt_json(const KktReport& r) {
  return {{"stationarity_u", r.stationarity_u}, {"dynamics", r.dynamics},
          {"costate", r.costate},               {"costate_terminal", r.costate_terminal},
          {"comp_v", r.comp_v},                 {"comp_mu", r.comp_mu},
          {"scale", r.scale},                   {"scaled_max", r.scaled()}};
}

json certificate_json(const Certificate& c) {
  json j;
  j["kkt"] = kkt_json(c.kkt);
  j["kkt_ok"] = c.kkt_ok;
  j["sufficiency_complete"] = c.suff.complete();
  j["hessian"] = {{"definiteness", to_string(c.hessian.definiteness)},
                  {"pd", c.hessian.pd()},
                  {"min_pivot", c.hessian.min_pivot},
                  {"size", c.hessian.H.rows()}};
  j["best_response"] = json::array();
  for (const auto& br : c.best_responses) {
    j["best_response"].push_back({{"player", br.player + 1},
                                  {"gap", br.gap},
                                  {"trajectory_cost", br.trajectory_cost},
                                  {"best_cost", br.best_cost},
                                  {"sampled_improvement", br.sampled_improvement},
                                  {"feasible_trials", br.feasible_trials}});
  }
  j["nash_ok"] = c.nash_ok;
  j["failures"] = c.failures;
  j["passed"] = c.passed();
  return j;
}

std::string summary_text(const std::string& title, const std::vector<std::pair<std::string, bool>>& rows,
                         const std::vector<std::string>& notes) {
  std::ostringstream os;
  os << title << "\n";
  for (const auto& [name, ok] : rows) os << (ok ? "PASS " : "FAIL ") << name << "\n";
  for (const auto& n : notes) os << "  " << n << "\n";
  return os.str();
}

CertifyOptions certify_options(const RunConfig& cfg) {
  CertifyOptions co;
  co.kkt_tol = cfg.tol;
  co.gap_tol = cfg.gap_tol;
  co.best_response.seed = cfg.seed;
  co.best_response.trials = cfg.trials;
  return co;
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions so;
  so.potential_tol.rel = cfg.potential_tol;
  return so;
}

void emit(const RunConfig& cfg, const fs::path& dir, const std::string& name,
          const std::string& contents) {
  if (cfg.emits(name)) io::write_file(dir / name, contents);
}

int run_check(const RunConfig& cfg, const fs::path& dir) {
  const Input in = load_input(cfg, true);
  const PotentialReport rep = check_conditions(in.game, solve_options(cfg).potential_tol);
  json report;
  report["mode"] = "check";
  report["potential"] = potential_json(rep);
  emit(cfg, dir, "report.json", report.dump(2) + "\n");
  std::vector<std::string> notes;
  for (const auto& v : rep.violations) notes.push_back(to_string(v));
  emit(cfg, dir, "summary.txt",
       summary_text("olpdg check", {{"potential conditions", rep.is_potential}}, notes));
  for (const auto& n : notes) std::cerr << n << "\n";
  std::cout << (rep.is_potential ? "potential game" : "not a potential game") << "\n";
  return rep.is_potential ? kOk : kNotPotential;
}

// Figure series of the smart-grid report, one CSV per panel.
void emit_smartgrid_series(const fs::path& dir, const smartgrid::Report& rep,
                           const smartgrid::Scenario& sc) {
  std::string res = "k";
  for (int j = 0; j < sc.S; ++j) res += ",X" + std::to_string(j + 1);
  res += "\n";
  for (int k = 0; k <= sc.K; ++k) {
    res += std::to_string(k);
    for (int j = 0; j < sc.S; ++j) res += "," + io::format_double(rep.resources[k][j]);
    res += "\n";
  }
  io::write_file(dir / "fig_resources.csv", res);

  std::string cons = "k,user,activity,consumption\n";
  for (int k = 0; k < sc.K; ++k) {
    for (int i = 0; i < sc.N; ++i) {
      for (int a = 0; a < sc.m[i]; ++a) {
        cons += std::to_string(k) + "," + std::to_string(i + 1) + "," + std::to_string(a + 1) +
                "," + io::format_double(rep.consumption[k][i][a]) + "\n";
      }
    }
  }
  io::write_file(dir / "fig_consumption.csv", cons);

  std::string bat = "k";
  for (int i = 0; i < sc.N; ++i) bat += ",K" + std::to_string(i + 1);
  bat += ",storage_margin\n";
  for (int k = 0; k <= sc.K; ++k) {
    bat += std::to_string(k);
    for (int i = 0; i < sc.N; ++i) bat += "," + io::format_double(rep.battery[k][i]);
    bat += "," + io::format_double(rep.storage_margin[k]) + "\n";
  }
  io::write_file(dir / "fig_battery.csv", bat);

  std::string cost = "k,user,unmet_demand,imbalance,storage_cost,incentive\n";
  for (int k = 0; k <= sc.K; ++k) {
    for (int i = 0; i < sc.N; ++i) {
      cost += std::to_string(k) + "," + std::to_string(i + 1) + "," +
              io::format_double(rep.unmet_demand[k][i]) + "," +
              io::format_double(rep.imbalance[k][i]) + "," +
              io::format_double(rep.storage_cost[k][i]) + "," +
              io::format_double(rep.incentive[k][i]) + "\n";
    }
  }
  io::write_file(dir / "fig_costs.csv", cost);
}

struct SolveOutcome {
  int status = kOk;
  std::optional<Equilibrium> eq;
  std::optional<Certificate> cert;
};

SolveOutcome solve_and_certify(const RunConfig& cfg, const Input& in, const fs::path& dir,
                               const std::string& mode) {
  SolveOutcome out;
  json report;
  report["mode"] = mode;
  std::vector<std::pair<std::string, bool>> rows;
  std::vector<std::string> notes;
  try {
    out.eq = solve_equilibrium(in.game, solve_options(cfg));
  } catch (const PipelineError& e) {
    report["failed_stage"] = e.stage();
    report["error"] = e.what();
    if (e.stage() == "potential_check") {
      report["potential"] = potential_json(check_conditions(in.game));
    }
    emit(cfg, dir, "report.json", report.dump(2) + "\n");
    emit(cfg, dir, "summary.txt",
         summary_text("olpdg " + mode, {{"stage " + e.stage(), false}}, {e.what()}));
    std::cerr << "error in stage " << e.stage() << ": " << e.what() << "\n";
    out.status = e.stage() == "validate"          ? kInput
                 : e.stage() == "potential_check" ? kNotPotential
                                                  : kSolver;
    return out;
  }
  const Equilibrium& eq = *out.eq;
  report["potential"] = potential_json(eq.potential);
  report["lcp"] = {{"status", to_string(eq.lcp_solution.status)},
                   {"pivots", eq.lcp_solution.pivots},
                   {"size", eq.lcp.size()},
                   {"stage0_status", to_string(eq.stage0.lcp.status)}};
  emit(cfg, dir, "trajectory.csv", io::trajectory_csv(eq.trajectory, in.game.dims));
  emit(cfg, dir, "lcp.csv", io::lcp_csv(eq.lcp, eq.lcp_solution));

  out.cert = certify(eq.ocp, in.game, eq.trajectory, certify_options(cfg));
  const Certificate& cert = *out.cert;
  report["certificate"] = certificate_json(cert);
  rows = {{"potential conditions", true},
          {"lcp solved", true},
          {"kkt residuals", cert.kkt_ok},
          {"hessian positive definite", cert.hessian_pd},
          {"best response", cert.nash_ok}};
  notes = cert.failures;

  if (in.scenario) {
    const smartgrid::Report rep = smartgrid::extract_report(eq.trajectory, *in.scenario);
    json sg;
    sg["total_storage"] = json::array();
    for (int i = 0; i < in.scenario->N; ++i) sg["total_storage"].push_back(rep.total_storage(i));
    sg["total_cost"] = rep.total_cost;
    sg["storage_margin"] = rep.storage_margin;
    report["smartgrid"] = sg;
    if (mode == "smartgrid" || mode == "sweep") emit_smartgrid_series(dir, rep, *in.scenario);
  }
  emit(cfg, dir, "report.json", report.dump(2) + "\n");
  emit(cfg, dir, "summary.txt", summary_text("olpdg " + mode, rows, notes));
  out.status = cert.passed() ? kOk : kCertificate;
  std::cout << "lcp " << to_string(eq.lcp_solution.status) << " in " << eq.lcp_solution.pivots
            << " pivots; certificate " << (cert.passed() ? "passed" : "FAILED") << "\n";
  return out;
}

int run_verify(const RunConfig& cfg, const fs::path& dir) {
  const Input in = load_input(cfg, false);
  if (cfg.trajectory.empty()) return solve_and_certify(cfg, in, dir, "verify").status;

  const PotentialReport pot = check_conditions(in.game, solve_options(cfg).potential_tol);
  if (!pot.is_potential) {
    for (const auto& v : pot.violations) std::cerr << to_string(v) << "\n";
    return kNotPotential;
  }
  const OcpData ocp = build_ocp(in.game, solve_options(cfg).potential_tol);
  const EquilibriumTrajectory traj =
      io::parse_trajectory_csv(io::read_file(cfg.trajectory), in.game.dims);
  const Certificate cert = certify(ocp, in.game, traj, certify_options(cfg));
  json report;
  report["mode"] = "verify";
  report["trajectory"] = cfg.trajectory;
  report["potential"] = potential_json(pot);
  report["certificate"] = certificate_json(cert);
  emit(cfg, dir, "report.json", report.dump(2) + "\n");
  emit(cfg, dir, "summary.txt",
       summary_text("olpdg verify",
                    {{"kkt residuals", cert.kkt_ok},
                     {"hessian positive definite", cert.hessian_pd},
                     {"best response", cert.nash_ok}},
                    cert.failures));
  std::cout << "certificate " << (cert.passed() ? "passed" : "FAILED") << "\n";
  return cert.passed() ? kOk : kCertificate;
}

// Scales one scenario parameter. Names: a<i>, b<i>, rcost<i>, Kmax<i> (users
// 1-based), q, eps, Ltilde.
void scale_parameter(smartgrid::Scenario& sc, const std::string& name, double f) {
  auto user = [&](const std::string& prefix) -> int {
    if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return -1;
    const int i = std::stoi(name.substr(prefix.size())) - 1;
    require(i >= 0 && i < sc.N, "--param: user index out of range in " + name);
    return i;
  };
  if (name == "q") {
    for (auto& v : sc.q) v *= f;
  } else if (name == "eps") {
    for (auto& v : sc.eps) v *= f;
  } else if (name == "Ltilde") {
    for (auto& v : sc.Ltilde) v *= f;
  } else if (int i = user("Kmax"); i >= 0) {
    sc.Kmax[i] *= f;
  } else if (int i = user("rcost"); i >= 0) {
    for (auto& st : sc.rcost) st[i] *= f;
  } else if (int i = user("a"); i >= 0) {
    for (auto& st : sc.a) st[i] *= f;
  } else if (int i = user("b"); i >= 0) {
    for (auto& st : sc.b) st[i] *= f;
  } else {
    throw std::invalid_argument("--param: unknown parameter " + name);
  }
}

int run_sweep(const RunConfig& cfg, const fs::path& dir) {
  require(!cfg.param.empty(), "sweep needs --param");
  require(!cfg.scales.empty(), "sweep needs --scale");
  const Input base = load_input(cfg, true);
  require(base.scenario.has_value(), "sweep needs a smart-grid scenario");
  std::string table = "run,scale,status";
  for (int i = 0; i < base.scenario->N; ++i) table += ",total_storage" + std::to_string(i + 1);
  for (int i = 0; i < base.scenario->N; ++i) table += ",total_cost" + std::to_string(i + 1);
  table += "\n";
  int worst = kOk;
  for (std::size_t r = 0; r < cfg.scales.size(); ++r) {
    Input in;
    in.scenario = *base.scenario;
    scale_parameter(*in.scenario, cfg.param, cfg.scales[r]);
    in.game = smartgrid::to_nzdg(*in.scenario);
    char name[64];
    std::snprintf(name, sizeof name, "run_%02zu_%s_x%s", r, cfg.param.c_str(),
                  io::format_double(cfg.scales[r]).c_str());
    const fs::path run_dir = dir / name;
    io::save_scenario(run_dir / "scenario.json", *in.scenario);
    const SolveOutcome o = solve_and_certify(cfg, in, run_dir, "sweep");
    worst = std::max(worst, o.status);
    table += std::string(name) + "," + io::format_double(cfg.scales[r]) + "," +
             std::to_string(o.status);
    if (o.eq) {
      const auto rep = smartgrid::extract_report(o.eq->trajectory, *in.scenario);
      for (int i = 0; i < in.scenario->N; ++i) table += "," + io::format_double(rep.total_storage(i));
      for (int i = 0; i < in.scenario->N; ++i) table += "," + io::format_double(rep.total_cost[i]);
    } else {
      for (int i = 0; i < 2 * in.scenario->N; ++i) table += ",";
    }
    table += "\n";
  }
  io::write_file(dir / "sweep_summary.csv", table);
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-loop Nash equilibria of constrained LQ potential difference games"};
  RunConfig cfg;
  std::vector<std::string> emit_list;
  app.add_option("mode", cfg.mode, "check | solve | verify | smartgrid | sweep")
      ->required()
      ->check(CLI::IsMember({"check", "solve", "verify", "smartgrid", "sweep"}));
  app.add_option("--input", cfg.input, "game or scenario JSON file");
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_option("--tol", cfg.tol, "scaled KKT residual tolerance")->capture_default_str();
  app.add_option("--gap-tol", cfg.gap_tol, "best-response gap tolerance")->capture_default_str();
  app.add_option("--potential-tol", cfg.potential_tol, "relative tolerance of the potential test")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed of the sampled best-response check")
      ->capture_default_str();
  app.add_option("--trials", cfg.trials, "sampled perturbations per player")->capture_default_str();
  app.add_option("--trajectory", cfg.trajectory, "trajectory.csv to verify (verify mode)");
  app.add_option("--param", cfg.param, "sweep parameter: a<i>, b<i>, rcost<i>, Kmax<i>, q, eps, Ltilde");
  app.add_option("--scale", cfg.scales, "comma-separated sweep factors")->delimiter(',');
  app.add_option("--emit", emit_list, "artifacts to write (comma-separated)")
      ->delimiter(',')
      ->check(CLI::IsMember({"trajectory.csv", "lcp.csv", "report.json", "summary.txt"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }
  if (!emit_list.empty()) cfg.emit = {emit_list.begin(), emit_list.end()};

  try {
    const fs::path dir = cfg.out;
    fs::create_directories(dir);
    if (cfg.mode == "check") return run_check(cfg, dir);
    if (cfg.mode == "verify") return run_verify(cfg, dir);
    if (cfg.mode == "sweep") return run_sweep(cfg, dir);
    const Input in = load_input(cfg, cfg.mode == "smartgrid");
    if (cfg.mode == "smartgrid") {
      require(in.scenario.has_value(), "smartgrid mode needs a scenario file");
    }
    return solve_and_certify(cfg, in, dir, cfg.mode).status;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  }
}
