#include "olpdg/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace olpdg::io {

using nlohmann::json;

namespace {

const json& field(const json& obj, const std::string& name, const std::string& where) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw std::invalid_argument("missing field \"" + name + "\"" +
                                (where.empty() ? "" : " in " + where));
  }
  return obj.at(name);
}

std::string at_index(const std::string& name, int a) {
  return name + "[" + std::to_string(a) + "]";
}

double to_double(const json& j, const std::string& name) {
  if (!j.is_number()) throw std::invalid_argument("field \"" + name + "\" must be a number");
  return j.get<double>();
}

int to_int(const json& j, const std::string& name) {
  if (!j.is_number_integer()) {
    throw std::invalid_argument("field \"" + name + "\" must be an integer");
  }
  return j.get<int>();
}

const json& list(const json& j, const std::string& name, std::size_t size) {
  if (!j.is_array() || j.size() != size) {
    throw std::invalid_argument("field \"" + name + "\" must be a list of " +
                                std::to_string(size) + " entries");
  }
  return j;
}

Matrix read_matrix(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& name) {
  list(j, name, static_cast<std::size_t>(rows));
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string row_name = at_index(name, static_cast<int>(r));
    const json& row = list(j[r], row_name, static_cast<std::size_t>(cols));
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = to_double(row[c], row_name);
  }
  return out;
}

Vector read_vector(const json& j, Eigen::Index size, const std::string& name) {
  list(j, name, static_cast<std::size_t>(size));
  Vector out(size);
  for (Eigen::Index a = 0; a < size; ++a) out[a] = to_double(j[a], name);
  return out;
}

json write_matrix(const Matrix& a) {
  json out = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json write_vector(const Vector& a) {
  json out = json::array();
  for (Eigen::Index t = 0; t < a.size(); ++t) out.push_back(a[t]);
  return out;
}

template <class T, class F>
json write_seq(const std::vector<T>& seq, F&& f) {
  json out = json::array();
  for (const auto& item : seq) out.push_back(f(item));
  return out;
}

// Reads a [count] list with a per-entry reader.
template <class F>
auto read_seq(const json& j, int count, const std::string& name, F&& f) {
  list(j, name, static_cast<std::size_t>(count));
  std::vector<decltype(f(j[0], 0, std::string()))> out;
  out.reserve(count);
  for (int a = 0; a < count; ++a) out.push_back(f(j[a], a, at_index(name, a)));
  return out;
}

std::vector<int> read_ints(const json& j, int count, const std::string& name) {
  return read_seq(j, count, name,
                  [](const json& e, int, const std::string& nm) { return to_int(e, nm); });
}

std::vector<double> read_doubles(const json& j, int count, const std::string& name) {
  return read_seq(j, count, name,
                  [](const json& e, int, const std::string& nm) { return to_double(e, nm); });
}

LqGame parse_lq(const json& doc) {
  const json& jd = field(doc, "dims", "");
  Dims dims;
  dims.n = to_int(field(jd, "n", "dims"), "n");
  dims.N = to_int(field(jd, "N", "dims"), "N");
  dims.K = to_int(field(jd, "K", "dims"), "K");
  dims.l = to_int(field(jd, "l", "dims"), "l");
  require(dims.N >= 1 && dims.K >= 1, "dims: N and K must be >= 1");
  dims.m = read_ints(field(jd, "m", "dims"), dims.N, "m");
  dims.s = read_ints(field(jd, "s", "dims"), dims.N, "s");
  dims.check();

  LqGame g = LqGame::zeros(dims);
  const int K = dims.K, N = dims.N, n = dims.n, m = dims.m_total(), s = dims.s_total(),
            l = dims.l;
  auto per_stage_matrix = [&](const char* name, int stages, int rows, int cols) {
    return read_seq(field(doc, name, ""), stages, name,
                    [&](const json& e, int, const std::string& nm) {
                      return read_matrix(e, rows, cols, nm);
                    });
  };
  auto per_stage_vector = [&](const char* name, int stages, int size) {
    return read_seq(field(doc, name, ""), stages, name,
                    [&](const json& e, int, const std::string& nm) {
                      return read_vector(e, size, nm);
                    });
  };
  auto per_player_matrix = [&](const char* name, int stages, auto rows, auto cols) {
    return read_seq(field(doc, name, ""), stages, name,
                    [&](const json& e, int, const std::string& nm) {
                      return read_seq(e, N, nm, [&](const json& f, int i, const std::string& nn) {
                        return read_matrix(f, rows(i), cols(i), nn);
                      });
                    });
  };
  auto per_player_vector = [&](const char* name, int stages, int size) {
    return read_seq(field(doc, name, ""), stages, name,
                    [&](const json& e, int, const std::string& nm) {
                      return read_seq(e, N, nm, [&](const json& f, int, const std::string& nn) {
                        return read_vector(f, size, nn);
                      });
                    });
  };
  auto fixed = [](int v) { return [v](int) { return v; }; };

  g.A = per_stage_matrix("A", K, n, n);
  g.B = per_player_matrix("B", K, fixed(n), [&](int i) { return dims.m[i]; });
  g.Q = per_player_matrix("Q", K + 1, fixed(n), fixed(n));
  g.p = per_player_vector("p", K + 1, n);
  g.R = per_player_matrix("R", K, fixed(m), fixed(m));
  g.D = per_player_matrix("D", K + 1, fixed(s), fixed(s));
  g.d = per_player_vector("d", K + 1, s);
  g.L = per_player_matrix("L", K + 1, fixed(n), fixed(s));
  g.M = per_stage_matrix("M", K + 1, l, n);
  g.Ncon = per_stage_matrix("N", K + 1, l, s);
  g.r = per_stage_vector("r", K + 1, l);
  g.x0 = read_vector(field(doc, "x0", ""), n, "x0");

  const ValidationReport rep = validate(g);
  if (!rep.valid()) {
    std::string msg = "game failed validation:";
    for (const auto& v : rep.violations) msg += "\n  " + v;
    throw std::invalid_argument(msg);
  }
  return symmetrized(std::move(g));
}

smartgrid::Scenario parse_scenario(const json& doc) {
  smartgrid::Scenario sc;
  sc.S = to_int(field(doc, "S", ""), "S");
  sc.N = to_int(field(doc, "N", ""), "N");
  sc.K = to_int(field(doc, "K", ""), "K");
  require(sc.S >= 1 && sc.N >= 1 && sc.K >= 1, "scenario: S, N, K must be >= 1");
  const int S = sc.S, N = sc.N, K = sc.K;
  sc.m = read_ints(field(doc, "m", ""), N, "m");
  for (int v : sc.m) require(v >= 1, "scenario: activity counts must be >= 1");

  auto user_doubles = [&](const char* name, int stages) {
    return read_seq(field(doc, name, ""), stages, name,
                    [&](const json& e, int, const std::string& nm) {
                      return read_doubles(e, N, nm);
                    });
  };
  auto user_matrices = [&](const char* name, auto rows, auto cols) {
    return read_seq(field(doc, name, ""), K, name,
                    [&](const json& e, int, const std::string& nm) {
                      return read_seq(e, N, nm, [&](const json& f, int i, const std::string& nn) {
                        return read_matrix(f, rows(i), cols(i), nn);
                      });
                    });
  };
  sc.Atilde = read_seq(field(doc, "Atilde", ""), K, "Atilde",
                       [&](const json& e, int, const std::string& nm) {
                         return read_matrix(e, S, S, nm);
                       });
  sc.Btilde = user_matrices("Btilde", [&](int) { return S; }, [&](int i) { return sc.m[i]; });
  sc.P = user_matrices("P", [&](int i) { return sc.m[i]; }, [&](int) { return S; });
  sc.q = read_doubles(field(doc, "q", ""), K + 1, "q");
  sc.rcost = user_doubles("rcost", K);
  sc.b = user_doubles("b", K + 1);
  sc.a = user_doubles("a", K + 1);
  sc.Ltilde = read_seq(field(doc, "Ltilde", ""), K + 1, "Ltilde",
                       [&](const json& e, int, const std::string& nm) {
                         return read_matrix(e, S, N, nm);
                       });
  sc.eps = read_doubles(field(doc, "eps", ""), K + 1, "eps");
  sc.Kmax = read_doubles(field(doc, "Kmax", ""), N, "Kmax");
  sc.X0 = read_vector(field(doc, "X0", ""), S, "X0");
  sc.Xminus1 = read_vector(field(doc, "Xminus1", ""), S, "Xminus1");
  sc.check();
  return sc;
}

json header(const char* kind) {
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["kind"] = kind;
  return doc;
}

void append_cell(std::string& out, double value) {
  out += ',';
  out += format_double(value);
}

double parse_cell(const std::string& cell, int line) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("trajectory.csv line " + std::to_string(line) +
                                ": cannot parse \"" + cell + "\"");
  }
  return value;
}

}  // namespace

GameDocument parse_game(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("parse error: ") + e.what());
  }
  const int schema = to_int(field(doc, "schema", ""), "schema");
  if (schema != kSchemaVersion) {
    throw std::invalid_argument("unsupported schema version " + std::to_string(schema));
  }
  const json& kind = field(doc, "kind", "");
  if (kind == "lq_game") return parse_lq(doc);
  if (kind == "smartgrid") return parse_scenario(doc);
  throw std::invalid_argument("field \"kind\" must be \"lq_game\" or \"smartgrid\"");
}

GameDocument load_game(const std::filesystem::path& path) {
  return parse_game(read_file(path));
}

std::string to_json(const LqGame& g) {
  json doc = header("lq_game");
  const Dims& dm = g.dims;
  doc["dims"] = {{"n", dm.n}, {"N", dm.N}, {"K", dm.K}, {"m", dm.m}, {"s", dm.s}, {"l", dm.l}};
  auto mats = [](const MatrixSeq& seq) { return write_seq(seq, write_matrix); };
  auto vecs = [](const VectorSeq& seq) { return write_seq(seq, write_vector); };
  doc["A"] = mats(g.A);
  doc["B"] = write_seq(g.B, mats);
  doc["Q"] = write_seq(g.Q, mats);
  doc["p"] = write_seq(g.p, vecs);
  doc["R"] = write_seq(g.R, mats);
  doc["D"] = write_seq(g.D, mats);
  doc["d"] = write_seq(g.d, vecs);
  doc["L"] = write_seq(g.L, mats);
  doc["M"] = mats(g.M);
  doc["N"] = mats(g.Ncon);
  doc["r"] = vecs(g.r);
  doc["x0"] = write_vector(g.x0);
  return doc.dump(1) + "\n";
}

std::string to_json(const smartgrid::Scenario& sc) {
  json doc = header("smartgrid");
  auto mats = [](const MatrixSeq& seq) { return write_seq(seq, write_matrix); };
  doc["S"] = sc.S;
  doc["N"] = sc.N;
  doc["K"] = sc.K;
  doc["m"] = sc.m;
  doc["Atilde"] = mats(sc.Atilde);
  doc["Btilde"] = write_seq(sc.Btilde, mats);
  doc["P"] = write_seq(sc.P, mats);
  doc["q"] = sc.q;
  doc["rcost"] = sc.rcost;
  doc["b"] = sc.b;
  doc["a"] = sc.a;
  doc["Ltilde"] = mats(sc.Ltilde);
  doc["eps"] = sc.eps;
  doc["Kmax"] = sc.Kmax;
  doc["X0"] = write_vector(sc.X0);
  doc["Xminus1"] = write_vector(sc.Xminus1);
  return doc.dump(1) + "\n";
}

void save_game(const std::filesystem::path& path, const LqGame& game) {
  write_file(path, to_json(game));
}

void save_scenario(const std::filesystem::path& path, const smartgrid::Scenario& scenario) {
  write_file(path, to_json(scenario));
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string trajectory_csv(const EquilibriumTrajectory& traj, const Dims& dims) {
  const int n = dims.n, m = dims.m_total(), s = dims.s_total(), l = dims.l, K = dims.K;
  std::string out = "k";
  auto names = [&out](const char* prefix, int count) {
    for (int a = 0; a < count; ++a) out += "," + std::string(prefix) + std::to_string(a);
  };
  names("x", n);
  names("u", m);
  names("v", s);
  names("lambda", n);
  names("mu", l);
  out += '\n';
  for (int k = 0; k <= K; ++k) {
    out += std::to_string(k);
    for (int a = 0; a < n; ++a) append_cell(out, traj.x[k][a]);
    for (int a = 0; a < m; ++a) {
      if (k < K) {
        append_cell(out, traj.u[k][a]);
      } else {
        out += ',';
      }
    }
    for (int a = 0; a < s; ++a) append_cell(out, traj.v[k][a]);
    for (int a = 0; a < n; ++a) append_cell(out, traj.lambda[k][a]);
    for (int a = 0; a < l; ++a) append_cell(out, traj.mu[k][a]);
    out += '\n';
  }
  return out;
}

EquilibriumTrajectory parse_trajectory_csv(const std::string& text, const Dims& dims) {
  const int n = dims.n, m = dims.m_total(), s = dims.s_total(), l = dims.l, K = dims.K;
  const int width = 1 + 2 * n + m + s + l;
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "trajectory.csv: missing header");
  EquilibriumTrajectory t;
  t.x.assign(K + 1, Vector(n));
  t.u.assign(K, Vector(m));
  t.v.assign(K + 1, Vector(s));
  t.lambda.assign(K + 1, Vector(n));
  t.mu.assign(K + 1, Vector(l));
  for (int k = 0; k <= K; ++k) {
    const int line_no = k + 2;
    require(static_cast<bool>(std::getline(in, line)),
            "trajectory.csv: expected " + std::to_string(K + 1) + " data rows");
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    require(static_cast<int>(cells.size()) == width,
            "trajectory.csv line " + std::to_string(line_no) + ": wrong number of columns");
    require(cells[0] == std::to_string(k),
            "trajectory.csv line " + std::to_string(line_no) + ": unexpected stage index");
    int c = 1;
    for (int a = 0; a < n; ++a) t.x[k][a] = parse_cell(cells[c++], line_no);
    for (int a = 0; a < m; ++a, ++c) {
      if (k < K) t.u[k][a] = parse_cell(cells[c], line_no);
    }
    for (int a = 0; a < s; ++a) t.v[k][a] = parse_cell(cells[c++], line_no);
    for (int a = 0; a < n; ++a) t.lambda[k][a] = parse_cell(cells[c++], line_no);
    for (int a = 0; a < l; ++a) t.mu[k][a] = parse_cell(cells[c++], line_no);
  }
  return t;
}

std::string lcp_csv(const LcpProblem& problem, const LcpSolution& solution) {
  std::string out = "index,stage,kind,player,component,z,w\n";
  for (int t = 0; t < problem.size(); ++t) {
    out += std::to_string(t);
    if (t < static_cast<int>(problem.labels.size())) {
      const LcpLabel& lb = problem.labels[t];
      out += "," + std::to_string(lb.stage) + "," + (lb.kind == LcpLabel::Kind::v ? "v" : "mu") +
             "," + (lb.player >= 0 ? std::to_string(lb.player + 1) : std::string()) + "," +
             std::to_string(lb.index);
    } else {
      out += ",,,,";
    }
    append_cell(out, t < solution.z.size() ? solution.z[t] : 0.0);
    append_cell(out, t < solution.w.size() ? solution.w[t] : 0.0);
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace olpdg::io
