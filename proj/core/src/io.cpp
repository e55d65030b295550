#include "casurf/io.hpp"

#include "casurf/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace casurf {

namespace {

using json = nlohmann::json;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json opt(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json grid_obj(const Grid2D& g) {
  return {{"nu", g.nu}, {"nv", g.nv}, {"u0", g.u0}, {"u1", g.u1}, {"v0", g.v0}, {"v1", g.v1}};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class CsvError {
 public:
  CsvError(std::string source) : source_(std::move(source)) {}
  [[noreturn]] void fail(int line, const std::string& msg) const {
    std::ostringstream os;
    os << source_ << ":" << line << ": " << msg;
    throw ValidationError(os.str());
  }

 private:
  std::string source_;
};

double parse_double(const std::string& tok, const CsvError& err, int line, const std::string& what) {
  const std::string t = trim(tok);
  double x = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    if (t == "nan" || t == "NaN") return std::nan("");
    err.fail(line, "cannot parse " + what + " value '" + t + "'");
  }
  return x;
}

/// key=value tokens of a comment line.
std::map<std::string, std::string> key_values(const std::string& body) {
  std::map<std::string, std::string> kv;
  std::istringstream is(body);
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

void write_vec_cols(std::ostream& os, const std::string& prefix, int dim) {
  for (int c = 1; c <= dim; ++c) os << ',' << prefix << c;
}

}  // namespace

void write_curve_csv(std::ostream& os, const CurveSample& curve) {
  const int dim = curve.space.ambient_dim();
  os << "# casurf curve\n# c=" << num(curve.space.c()) << " speed=" << num(curve.speed) << "\n";
  os << "s";
  write_vec_cols(os, "x", dim);
  os << ",kappa\n";
  for (std::size_t k = 0; k < curve.size(); ++k) {
    os << num(curve.s[k]);
    for (int c = 0; c < dim; ++c) os << ',' << num(curve.alpha[k][c]);
    os << ',' << num(curve.kappa[k]) << '\n';
  }
}

void write_surface_csv(std::ostream& os, const ImmersionGrid& g, bool partials) {
  const int dim = g.P.ambient_dim();
  const Grid2D& G = g.grid;
  if (g.psi.size() != G.size()) throw ValidationError("surface export: point count does not match the grid");
  const bool with_partials = partials && g.has_partials() && g.has_second_partials();
  os << "# casurf surface\n";
  os << "# c1=" << num(g.P.c1()) << " c2=" << num(g.P.c2()) << "\n";
  os << "# signature=" << g.P.signature().to_string() << "\n";
  os << "# grid nu=" << G.nu << " nv=" << G.nv << " u0=" << num(G.u0) << " u1=" << num(G.u1)
     << " v0=" << num(G.v0) << " v1=" << num(G.v1) << "\n";
  os << "# family=" << (g.family.name.empty() ? "unknown" : g.family.name);
  if (g.family.theta1) os << " theta1=" << num(*g.family.theta1);
  if (g.family.theta2) os << " theta2=" << num(*g.family.theta2);
  if (g.family.K) os << " K=" << num(*g.family.K);
  if (g.family.Kperp) os << " Kperp=" << num(*g.family.Kperp);
  os << "\n";
  for (const auto& [k, v] : g.family.params) os << "# param " << k << "=" << num(v) << "\n";
  os << "u,v";
  write_vec_cols(os, "x", dim);
  if (with_partials)
    for (const char* p : {"xu", "xv", "xuu", "xuv", "xvv"}) write_vec_cols(os, p, dim);
  os << ",excluded\n";
  for (int i = 0; i < G.nu; ++i) {
    for (int j = 0; j < G.nv; ++j) {
      const std::size_t k = G.index(i, j);
      os << num(G.u(i)) << ',' << num(G.v(j));
      for (int c = 0; c < dim; ++c) os << ',' << num(g.psi[k][c]);
      if (with_partials)
        for (const auto* field : {&g.psi_u, &g.psi_v, &g.psi_uu, &g.psi_uv, &g.psi_vv})
          for (int c = 0; c < dim; ++c) os << ',' << num((*field)[k][c]);
      os << ',' << (g.is_excluded(i, j) ? 1 : 0) << '\n';
    }
  }
}

ImmersionGrid read_surface_csv(std::istream& is, const std::string& source) {
  const CsvError err(source);
  std::optional<double> c1, c2;
  std::string signature;
  std::optional<Grid2D> grid;
  FamilyInfo family;
  std::vector<std::string> header;
  int line_no = 0;
  std::string line;

  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] != '#') {
      header = split(t, ',');
      break;
    }
    const std::string body = trim(t.substr(1));
    auto kv = key_values(body);
    auto get = [&](const std::string& key) {
      auto it = kv.find(key);
      if (it == kv.end()) err.fail(line_no, "missing '" + key + "=' in header comment");
      return parse_double(it->second, err, line_no, key);
    };
    if (kv.count("c1") || kv.count("c2")) {
      c1 = get("c1");
      c2 = get("c2");
    } else if (body.rfind("signature=", 0) == 0) {
      signature = body.substr(10);
    } else if (body.rfind("grid", 0) == 0) {
      const double nu = get("nu"), nv = get("nv");
      try {
        grid = Grid2D::make(static_cast<int>(nu), static_cast<int>(nv), get("u0"), get("u1"), get("v0"),
                            get("v1"));
      } catch (const ValidationError& e) {
        err.fail(line_no, e.what());
      }
    } else if (body.rfind("family=", 0) == 0) {
      family.name = kv["family"];
      if (kv.count("theta1")) family.theta1 = get("theta1");
      if (kv.count("theta2")) family.theta2 = get("theta2");
      if (kv.count("K")) family.K = get("K");
      if (kv.count("Kperp")) family.Kperp = get("Kperp");
    } else if (body.rfind("param ", 0) == 0) {
      for (const auto& [k, v] : kv) family.params[k] = parse_double(v, err, line_no, k);
    }
  }
  if (header.empty()) err.fail(line_no, "missing column header row");
  if (!c1 || !c2) err.fail(line_no, "missing '# c1=... c2=...' header comment");
  if (!grid) err.fail(line_no, "missing '# grid ...' header comment");

  std::optional<ProductSpace> P;
  try {
    P.emplace(*c1, *c2);
  } catch (const ValidationError& e) {
    err.fail(line_no, e.what());
  }
  if (!signature.empty() && signature != P->signature().to_string())
    err.fail(line_no, "signature " + signature + " does not match c1, c2 (" + P->signature().to_string() + ")");
  const int dim = P->ambient_dim();

  for (auto& h : header) h = trim(h);
  const std::size_t base = 2 + static_cast<std::size_t>(dim);
  const std::size_t with_p = base + 5 * static_cast<std::size_t>(dim);
  bool partials = false;
  bool has_excl = !header.empty() && header.back() == "excluded";
  const std::size_t ncols = header.size() - (has_excl ? 1 : 0);
  if (ncols == with_p) partials = true;
  else if (ncols != base) {
    std::ostringstream os;
    os << "expected " << base << " or " << with_p << " data columns for ambient dimension " << dim << ", got "
       << ncols;
    err.fail(line_no, os.str());
  }
  if (header[0] != "u" || header[1] != "v" || header[2] != "x1")
    err.fail(line_no, "column header must start with u,v,x1");

  ImmersionGrid g(*P, *grid);
  g.family = family;
  const std::size_t n = grid->size();
  g.psi.reserve(n);
  if (partials)
    for (auto* f : {&g.psi_u, &g.psi_v, &g.psi_uu, &g.psi_uv, &g.psi_vv}) f->reserve(n);
  g.excluded.assign(n, 0);
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tok = split(t, ',');
    if (tok.size() != header.size()) {
      std::ostringstream os;
      os << "expected " << header.size() << " columns, got " << tok.size();
      err.fail(line_no, os.str());
    }
    if (rows >= n) err.fail(line_no, "more rows than the grid has nodes");
    const int i = static_cast<int>(rows / static_cast<std::size_t>(grid->nv));
    const int j = static_cast<int>(rows % static_cast<std::size_t>(grid->nv));
    const double u = parse_double(tok[0], err, line_no, "u");
    const double v = parse_double(tok[1], err, line_no, "v");
    const double tol = 1e-9 * std::max({1.0, std::abs(grid->u1 - grid->u0), std::abs(grid->v1 - grid->v0)});
    if (std::abs(u - grid->u(i)) > tol || std::abs(v - grid->v(j)) > tol) {
      std::ostringstream os;
      os << "node (" << u << ", " << v << ") does not match grid node (" << grid->u(i) << ", " << grid->v(j) << ")";
      err.fail(line_no, os.str());
    }
    auto vec_at = [&](std::size_t off) {
      Vec x(dim);
      for (int c = 0; c < dim; ++c) x[c] = parse_double(tok[off + c], err, line_no, header[off + c]);
      return x;
    };
    g.psi.push_back(vec_at(2));
    if (partials) {
      std::size_t off = base;
      for (auto* f : {&g.psi_u, &g.psi_v, &g.psi_uu, &g.psi_uv, &g.psi_vv}) {
        f->push_back(vec_at(off));
        off += static_cast<std::size_t>(dim);
      }
    }
    if (has_excl) g.excluded[rows] = parse_double(tok.back(), err, line_no, "excluded") != 0.0 ? 1 : 0;
    ++rows;
  }
  if (rows != n) {
    std::ostringstream os;
    os << "file ends after " << rows << " of " << n << " grid rows (truncated?)";
    err.fail(line_no, os.str());
  }
  g.analytic = partials;
  return g;
}

void write_obj(std::ostream& os, const ImmersionGrid& g, const std::array<int, 3>& axes) {
  const int dim = g.P.ambient_dim();
  for (int a : axes)
    if (a < 0 || a >= dim) throw ValidationError("OBJ projection axis out of range");
  const Grid2D& G = g.grid;
  os << "# casurf surface " << g.family.name << "\n";
  os << "# projection onto ambient coordinates x" << axes[0] + 1 << ", x" << axes[1] + 1 << ", x"
     << axes[2] + 1 << " for inspection only; not an isometric embedding\n";
  for (std::size_t k = 0; k < G.size(); ++k)
    os << "v " << num(g.psi[k][axes[0]]) << ' ' << num(g.psi[k][axes[1]]) << ' ' << num(g.psi[k][axes[2]])
       << '\n';
  for (int i = 0; i + 1 < G.nu; ++i)
    for (int j = 0; j + 1 < G.nv; ++j) {
      if (g.is_excluded(i, j) || g.is_excluded(i + 1, j) || g.is_excluded(i, j + 1) ||
          g.is_excluded(i + 1, j + 1))
        continue;
      os << "f " << G.index(i, j) + 1 << ' ' << G.index(i + 1, j) + 1 << ' ' << G.index(i + 1, j + 1) + 1
         << ' ' << G.index(i, j + 1) + 1 << '\n';
    }
}

void write_backlund_csv(std::ostream& os, const BacklundSolution& sol) {
  const Grid2D& G = sol.grid;
  os << "# casurf backlund case=" << to_string(sol.sign_case) << "\n";
  os << "u,v,theta1,theta2,mu1,mu2,excluded\n";
  for (int i = 0; i < G.nu; ++i)
    for (int j = 0; j < G.nv; ++j) {
      const std::size_t k = G.index(i, j);
      os << num(G.u(i)) << ',' << num(G.v(j)) << ',' << num(sol.theta1(i, j)) << ',' << num(sol.theta2(i, j))
         << ',' << num(sol.mu1(i, j)) << ',' << num(sol.mu2(i, j)) << ',' << int(sol.excluded[k]) << '\n';
    }
}

void write_metric_csv(std::ostream& os, const MetricGrid& m) {
  const Grid2D& G = m.grid();
  os << "u,v,E,F,G,excluded\n";
  for (int i = 0; i < G.nu; ++i)
    for (int j = 0; j < G.nv; ++j)
      os << num(G.u(i)) << ',' << num(G.v(j)) << ',' << num(m.E(i, j)) << ',' << num(m.F(i, j)) << ','
         << num(m.G(i, j)) << ',' << (m.is_excluded(i, j) ? 1 : 0) << '\n';
}

void write_fields_csv(std::ostream& os, const std::vector<std::string>& names,
                      const std::vector<const Field2D*>& fields) {
  if (names.size() != fields.size() || fields.empty())
    throw ValidationError("field export: names and fields must match and be non-empty");
  const Grid2D& G = fields[0]->grid();
  for (const Field2D* f : fields)
    if (!(f->grid() == G)) throw ValidationError("field export: fields live on different grids");
  os << "u,v";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (int i = 0; i < G.nu; ++i)
    for (int j = 0; j < G.nv; ++j) {
      os << num(G.u(i)) << ',' << num(G.v(j));
      for (const Field2D* f : fields) os << ',' << num((*f)(i, j));
      os << '\n';
    }
}

std::string grid_json(const Grid2D& g) { return grid_obj(g).dump(); }

std::string constants_json(const ExisConstants& C) {
  const json j = {{"c1", C.c1},
                  {"c2", C.c2},
                  {"theta1", C.theta1},
                  {"theta2", C.theta2},
                  {"a1", C.a1},
                  {"a2", C.a2},
                  {"A1", C.A1},
                  {"A2", C.A2},
                  {"case", to_string(C.sign_case)},
                  {"K", C.gauss_curvature()},
                  {"Kperp", C.normal_curvature()}};
  return j.dump();
}

std::string angle_report_json(const AngleReport& r) {
  std::map<std::string, std::size_t> counts;
  for (std::size_t k = 0; k < r.classification.size(); ++k) {
    const int i = static_cast<int>(k / static_cast<std::size_t>(r.grid.nv));
    const int j = static_cast<int>(k % static_cast<std::size_t>(r.grid.nv));
    if (std::isnan(r.theta1(i, j))) continue;
    ++counts[to_string(r.classification[k])];
  }
  double kperp_max = 0.0;
  for (double x : r.Kperp.data())
    if (std::isfinite(x)) kperp_max = std::max(kperp_max, x);
  const json j = {{"family", r.family},
                  {"grid", grid_obj(r.grid)},
                  {"theta1_median", r.theta1_median},
                  {"theta2_median", r.theta2_median},
                  {"theta1_expected", opt(r.theta1_expected)},
                  {"theta2_expected", opt(r.theta2_expected)},
                  {"max_dev1", r.max_dev1},
                  {"max_dev2", r.max_dev2},
                  {"K_predicted", opt(r.K_predicted)},
                  {"K_max_err", r.K_predicted ? json(r.K_max_err) : json(nullptr)},
                  {"K_gauss_eq_max_err", r.K_gauss_eq_max_err},
                  {"Kperp_predicted", opt(r.Kperp_predicted)},
                  {"Kperp_max", kperp_max},
                  {"Kperp_max_err", r.Kperp_predicted ? json(r.Kperp_max_err) : json(nullptr)},
                  {"sigma_max", r.sigma_max},
                  {"shape_pattern_max", r.shape_pattern_max},
                  {"algebraic_max", r.algebraic_max},
                  {"two_value_max_dev", opt(r.two_value_max_dev)},
                  {"dominant_class", to_string(r.dominant_class)},
                  {"class_counts", counts},
                  {"excluded", r.excluded}};
  return j.dump();
}

std::string compat_report_json(const CompatReport& r) {
  const json j = {{"gauss", r.gauss},
                  {"codazzi", r.codazzi},
                  {"ricci", r.ricci},
                  {"parallel_f", r.par_f},
                  {"parallel_h", r.par_h},
                  {"parallel_s", r.par_s},
                  {"parallel_t", r.par_t},
                  {"algebraic",
                   {{"f2_sh", r.algebraic.f2_sh},
                    {"t2_hs", r.algebraic.t2_hs},
                    {"adjoint", r.algebraic.adjoint},
                    {"fs_st", r.algebraic.fs_st},
                    {"hf_th", r.algebraic.hf_th}}},
                  {"nodes", r.nodes},
                  {"max", r.max()}};
  return j.dump();
}

std::string backlund_report_json(const BacklundSolution& sol, const PairResidual& pair,
                                 const SineGordonResidual& sg) {
  json j = {{"case", to_string(sol.sign_case)},
            {"grid", grid_obj(sol.grid)},
            {"constants", json::parse(constants_json(sol.constants))},
            {"sweeps", sol.sweeps},
            {"scheme_residual", sol.scheme_residual},
            {"pair_residual", {{"eq_u", pair.eq_u}, {"eq_v", pair.eq_v}}},
            {"sine_gordon_residual", {{"plus", sg.r_plus}, {"minus", sg.r_minus}}},
            {"excluded", sol.excluded_count()}};
  if (!sol.warning.empty()) j["warning"] = sol.warning;
  return j.dump();
}

}  // namespace casurf
