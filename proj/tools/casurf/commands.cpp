#include "commands.hpp"

#include "options.hpp"

#include "casurf/backlund.hpp"
#include "casurf/error.hpp"
#include "casurf/families.hpp"
#include "casurf/io.hpp"
#include "casurf/verify.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

namespace casurf::cli {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

/// Collects failed checks; failures become exit code 3 after the outputs are written.
class Checks {
 public:
  void require(bool ok, const std::string& name, double value, double tol) {
    if (ok) return;
    std::ostringstream os;
    os << name << " = " << value << " exceeds tolerance " << tol;
    failed_.push_back(os.str());
  }
  int finish() const {
    for (const auto& f : failed_) std::cerr << "check failed: " << f << "\n";
    return failed_.empty() ? 0 : 3;
  }

 private:
  std::vector<std::string> failed_;
};

Grid2D square_grid(int n, double L) {
  if (n < 5) throw ValidationError("n must be at least 5");
  if (!(L > 0)) throw ValidationError("L must be positive");
  return Grid2D::make(n, n, 0.0, L, 0.0, L);
}

/// Curve through the base point with initial tangent e2, traversed at `speed`
/// for parameter values [0, t_max]; kappa is a function of arc length.
CurveSample make_curve(const SpaceForm& M, const FnSpec& kappa, double t_max, double speed, double h) {
  if (!(h > 0)) throw ValidationError("curve_h must be positive");
  Vec T0 = Vec::Zero(M.ambient_dim());
  T0[1] = 1.0;
  const CurveSample c =
      integrate_curve(M, CurvatureSpec::callable([kappa](double s) { return kappa(s); }), M.base_point(), T0,
                      t_max * speed + 2 * h, h);
  return speed == 1.0 ? c : reparameterize_speed(c, speed);
}

std::function<double(double)> as_fn(const FnSpec& f) {
  return [f](double x) { return f(x); };
}

json surface_report(const ImmersionGrid& g) {
  return {{"angle", json::parse(angle_report_json(angle_constancy(g)))},
          {"compat", json::parse(compat_report_json(compatibility_residuals(frame_data_from_immersion(g))))}};
}

void emit(const std::filesystem::path& path, const json& report) {
  write_text(path, report.dump(2) + "\n");
  std::cout << report.dump() << "\n";
}

template <class F>
void write_file(const std::filesystem::path& path, F&& writer) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  writer(out);
  std::cerr << "wrote " << path.string() << "\n";
}

// ---------------------------------------------------------------- generate

struct GenerateParams {
  std::string family = "theta_halfpi";
  double c1 = 1.0;
  double c2 = 1.0;
  double theta = kPi / 6;
  std::string which = "first";
  int n = 64;
  double L = 0.5;
  FnSpec kappa1{0.3, 0.2, 1.0};
  FnSpec kappa2{0.3, 0.2, 1.0};
  FnSpec kappa{0.2, 0.0, 1.0};
  double curve_h = 1e-3;
  bool ruled = false;
  FnSpec ruled_c{};
  bool no_partials = false;
  std::vector<int> obj;
  std::string prefix;
  double angle_tol = 1e-6;
  double k_tol = 1e-4;
};

ImmersionGrid build_family(const GenerateParams& p) {
  const ProductSpace P(p.c1, p.c2);
  const Grid2D grid = square_grid(p.n, p.L);
  const double L = p.L, h = p.curve_h;
  const std::string& f = p.family;
  if (f == "slice") {
    Factor which;
    if (p.which == "first")
      which = Factor::First;
    else if (p.which == "second")
      which = Factor::Second;
    else
      throw ValidationError("which must be 'first' or 'second'");
    const Vec fixed = which == Factor::First ? P.M2().base_point() : P.M1().base_point();
    return slice_surface(P, which, fixed, grid);
  }
  if (f == "product") {
    return product_of_curves(make_curve(P.M1(), p.kappa1, L, 1.0, h), make_curve(P.M2(), p.kappa2, L, 1.0, h), grid);
  }
  if (f == "totally_geodesic") {
    if (!(p.c1 * p.c2 > 0)) throw ValidationError("totally_geodesic requires c1 c2 > 0");
    const double s = p.c1 + p.c2;
    return totally_geodesic_mixed(P, make_curve(P.M1(), FnSpec{}, L, std::sqrt(p.c2 / s), h),
                                  make_curve(P.M2(), FnSpec{}, L, std::sqrt(p.c1 / s), h), grid);
  }
  if (!(p.theta > 0 && p.theta < kPi / 2)) throw ValidationError("theta must lie in (0, pi/2)");
  FlatFactorForm flat;
  flat.ruled = p.ruled;
  if (p.ruled) flat.C = as_fn(p.ruled_c);
  const double ct = std::cos(p.theta), st = std::sin(p.theta);
  if (f == "theta_halfpi") {
    const CurveSample ft = make_curve(P.M1(), p.kappa1, L, ct, h);
    if (P.M2().flat()) return family_theta_halfpi(P, p.theta, ft, nullptr, grid, flat);
    const CurveSample fb = make_curve(P.M2(), p.kappa2, L, 1.0, h);
    return family_theta_halfpi(P, p.theta, ft, &fb, grid, flat);
  }
  if (f == "zero_theta") {
    const CurveSample fb = make_curve(P.M2(), p.kappa2, L, st, h);
    if (P.M1().flat()) return family_zero_theta(P, p.theta, nullptr, fb, grid, flat);
    const CurveSample ft = make_curve(P.M1(), p.kappa1, L, 1.0, h);
    return family_zero_theta(P, p.theta, &ft, fb, grid, flat);
  }
  if (f == "two_angle") {
    const double r1 = std::sqrt(std::abs(p.c1)), r2 = std::sqrt(std::abs(p.c2));
    const FnSpec k = p.kappa;
    // kappa is the common normalized curvature as a function of v.
    const FnSpec k1{r1 * k.a, r1 * k.b, k.omega / ct};
    const FnSpec k2{r2 * k.a, r2 * k.b, k.omega / st};
    return two_angle_case1(P, p.theta, make_curve(P.M1(), k1, L, ct, h), make_curve(P.M2(), k2, L, st, h), grid);
  }
  throw ValidationError("unknown family '" + f +
                        "' (expected slice, product, totally_geodesic, theta_halfpi, zero_theta or two_angle)");
}

int run_generate(const OptionSet& opts, const GenerateParams& p) {
  ImmersionGrid g = build_family(p);
  if (p.no_partials) {
    for (auto* v : {&g.psi_u, &g.psi_v, &g.psi_uu, &g.psi_uv, &g.psi_vv}) v->clear();
    g.analytic = false;
  }
  const std::string prefix = p.prefix.empty() ? p.family : p.prefix;
  write_file(opts.out_path(prefix, ".csv"), [&](std::ostream& os) { write_surface_csv(os, g); });
  if (!p.obj.empty()) {
    if (p.obj.size() != 3) throw ValidationError("obj needs exactly three ambient axes (0-based)");
    write_file(opts.out_path(prefix, ".obj"), [&](std::ostream& os) { write_obj(os, g, {p.obj[0], p.obj[1], p.obj[2]}); });
  }
  const json report = surface_report(g);
  emit(opts.out_path(prefix, "_report.json"), report);

  Checks checks;
  const json& a = report.at("angle");
  const double dev = std::max(a.at("max_dev1").get<double>(), a.at("max_dev2").get<double>());
  checks.require(dev <= p.angle_tol, "angle deviation", dev, p.angle_tol);
  if (!a.at("K_max_err").is_null()) {
    const double e = a.at("K_max_err").get<double>();
    checks.require(e <= p.k_tol, "K error", e, p.k_tol);
  }
  return checks.finish();
}

// ---------------------------------------------------------------- backlund

struct BacklundParams {
  double c1 = 1.0;
  double c2 = 1.0;
  double theta1 = kPi / 3;
  double theta2 = kPi / 6;
  int n = 65;
  double L = 1.0;
  FnSpec data1{kPi / 2, 0.0, 1.0};
  FnSpec data2{kPi / 2, 0.0, 1.0};
  std::string variant = "exis1";
  double tol = 1e-10;
  int max_sweeps = 50;
  bool refine = false;
  std::string prefix = "backlund";
  double k_tol = 1e-3;
};

struct BacklundRun {
  json report;
  std::optional<BacklundSolution> sol;
  std::optional<ExisFields> fields;
  MetricGrid metric;
};

BacklundRun backlund_once(const BacklundParams& p, const Grid2D& grid) {
  const ExisConstants C = exis_constants(p.c1, p.c2, p.theta1, p.theta2);
  GoursatParams gp;
  gp.tol = p.tol;
  gp.max_sweeps = p.max_sweeps;
  BacklundRun run;
  ExisFields fields;
  if (p.variant == "exis1") {
    const BacklundSolution sol = solve_backlund(C, as_fn(p.data1), as_fn(p.data2), grid, gp);
    if (!sol.warning.empty()) std::cerr << "warning: " << sol.warning << "\n";
    run.report = json::parse(backlund_report_json(sol, pair_residual(sol), sine_gordon_residual(sol)));
    fields = exis1_fields(sol);
    run.sol = sol;
  } else if (p.variant == "exis2" || p.variant == "exis3") {
    fields = p.variant == "exis2" ? solve_exis2(C, as_fn(p.data1), as_fn(p.data2), grid, gp)
                                  : solve_exis3(C, as_fn(p.data1), as_fn(p.data2), grid, gp);
    run.report = {{"grid", json::parse(grid_json(grid))},
                  {"constants", json::parse(constants_json(C))},
                  {"sweeps", fields.sweeps},
                  {"scheme_residual", fields.scheme_residual}};
  } else {
    throw ValidationError("variant must be exis1, exis2 or exis3");
  }
  run.report["variant"] = p.variant;
  run.metric = assemble_metric(fields);
  const Field2D K = gauss_curvature(run.metric);
  run.report["K_expected"] = C.gauss_curvature();
  run.report["K_max_err"] = max_interior_error(K, C.gauss_curvature(), run.metric.excluded);
  run.report["compat"] = json::parse(compat_report_json(compatibility_residuals(build_frame_data(fields), C)));
  run.fields = std::move(fields);
  return run;
}

double ratio(double coarse, double fine) { return fine > 0 ? coarse / fine : (coarse > 0 ? INFINITY : 1.0); }

int run_backlund(const OptionSet& opts, const BacklundParams& p) {
  const Grid2D grid = square_grid(p.n, p.L);
  BacklundRun run = backlund_once(p, grid);
  if (run.sol) {
    write_file(opts.out_path(p.prefix, "_solution.csv"), [&](std::ostream& os) { write_backlund_csv(os, *run.sol); });
  } else {
    const ExisFields& f = *run.fields;
    write_file(opts.out_path(p.prefix, "_fields.csv"), [&](std::ostream& os) {
      write_fields_csv(os, {"E", "G", "mu1", "mu2"}, {&f.E, &f.G, &f.mu1, &f.mu2});
    });
  }
  write_file(opts.out_path(p.prefix, "_metric.csv"), [&](std::ostream& os) { write_metric_csv(os, run.metric); });

  if (p.refine) {
    const BacklundRun fine = backlund_once(p, grid.refined());
    json r = {{"n_fine", grid.refined().nu},
              {"K_max_err_fine", fine.report.at("K_max_err")},
              {"K_ratio", ratio(run.report.at("K_max_err"), fine.report.at("K_max_err"))},
              {"gauss_ratio", ratio(run.report["compat"].at("gauss"), fine.report["compat"].at("gauss"))}};
    if (run.sol) {
      const auto& a = run.report;
      const auto& b = fine.report;
      const double pa = std::max(a["pair_residual"].at("eq_u").get<double>(), a["pair_residual"].at("eq_v").get<double>());
      const double pb = std::max(b["pair_residual"].at("eq_u").get<double>(), b["pair_residual"].at("eq_v").get<double>());
      r["pair_ratio"] = ratio(pa, pb);
      r["sine_gordon_plus_ratio"] = ratio(a["sine_gordon_residual"].at("plus"), b["sine_gordon_residual"].at("plus"));
      r["sine_gordon_minus_ratio"] = ratio(a["sine_gordon_residual"].at("minus"), b["sine_gordon_residual"].at("minus"));
    }
    run.report["refinement"] = r;
  }
  emit(opts.out_path(p.prefix, "_report.json"), run.report);

  Checks checks;
  const double e = run.report.at("K_max_err");
  checks.require(e <= p.k_tol, "K error", e, p.k_tol);
  return checks.finish();
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructParams {
  std::string source = "exis1";
  double c1 = 1.0;
  double c2 = 1.0;
  double theta1 = kPi / 3;
  double theta2 = kPi / 6;
  int n = 65;
  double L = 0.5;
  FnSpec data1{kPi / 2, 0.0, 1.0};
  FnSpec data2{kPi / 2, 0.0, 1.0};
  double drift_tol = 1e-4;
  double angle_tol = 1e-3;
  std::string prefix = "reconstruct";
};

int run_reconstruct(const OptionSet& opts, const ReconstructParams& p) {
  if (!(p.c1 > 0 && p.c2 > 0)) throw ValidationError("reconstruction requires positive curvatures");
  const Grid2D grid = square_grid(p.n, p.L);
  const ProductSpace P(p.c1, p.c2);
  std::optional<FrameData> fd;
  double e1 = 0.0, e2 = 0.0;
  if (p.source == "exis1") {
    const ExisConstants C = exis_constants(p.c1, p.c2, p.theta1, p.theta2);
    if (C.sign_case != BacklundCase::SineSine)
      throw ValidationError("exis1 reconstruction needs A1, A2 > 0 for these curvatures and angles");
    const BacklundSolution sol = solve_backlund(C, as_fn(p.data1), as_fn(p.data2), grid);
    if (sol.excluded_count() > 0)
      throw ValidationError("the Backlund fields hit a singular value inside the grid; choose other data or a smaller L");
    fd = build_frame_data(exis1_fields(sol));
    e1 = p.theta1;
    e2 = p.theta2;
  } else if (p.source == "totally_geodesic") {
    fd = frame_data_totally_geodesic(p.c1, p.c2, grid);
    e1 = e2 = 0.5 * std::acos((p.c2 - p.c1) / (p.c1 + p.c2));
  } else {
    throw ValidationError("source must be exis1 or totally_geodesic");
  }
  ReconstructOptions ro;
  ro.drift_tol = p.drift_tol;
  const ReconstructResult r = reconstruct_immersion(*fd, P, ro);

  write_file(opts.out_path(p.prefix, ".csv"), [&](std::ostream& os) { write_surface_csv(os, r.immersion); });
  write_file(opts.out_path(p.prefix, "_metric_error.csv"),
             [&](std::ostream& os) { write_fields_csv(os, {"metric_rel_err"}, {&r.metric_rel_err}); });
  const json angle = json::parse(angle_report_json(angle_constancy(r.immersion)));
  const json report = {{"angle", angle},
                       {"expected", {{"theta1", e1}, {"theta2", e2}}},
                       {"reconstruction",
                        {{"metric_max_rel_err", r.metric_max_rel_err},
                         {"quadric_max_defect", r.quadric_max_defect},
                         {"frame_drift_max", r.frame_drift_max},
                         {"commutation_defect", r.commutation_defect}}}};
  emit(opts.out_path(p.prefix, "_report.json"), report);

  Checks checks;
  const double d1 = std::abs(angle.at("theta1_median").get<double>() - e1);
  const double d2 = std::abs(angle.at("theta2_median").get<double>() - e2);
  const double dev = std::max(angle.at("max_dev1").get<double>(), angle.at("max_dev2").get<double>());
  checks.require(d1 <= p.angle_tol, "|theta1 - expected|", d1, p.angle_tol);
  checks.require(d2 <= p.angle_tol, "|theta2 - expected|", d2, p.angle_tol);
  checks.require(dev <= p.angle_tol, "angle deviation", dev, p.angle_tol);
  return checks.finish();
}

// ---------------------------------------------------------------- verify

struct VerifyParams {
  std::string input;
  double angle_tol = -1.0;
  double k_tol = 1e-4;
  double perturb = 0.0;
  std::int64_t seed = -1;
  std::string prefix;
};

int run_verify(const OptionSet& opts, const VerifyParams& p) {
  if (p.input.empty()) throw ValidationError("verify needs --input <surface.csv>");
  std::ifstream in(p.input);
  if (!in) throw ValidationError("cannot open '" + p.input + "'");
  ImmersionGrid g = read_surface_csv(in, p.input);
  if (p.perturb < 0) throw ValidationError("perturb must be non-negative");
  if (p.perturb > 0) {
    if (p.seed < 0) throw ValidationError("perturb needs an explicit --seed");
    std::mt19937_64 rng(static_cast<std::uint64_t>(p.seed));
    std::normal_distribution<double> noise(0.0, p.perturb);
    for (Vec& x : g.psi) {
      for (int k = 0; k < x.size(); ++k) x[k] += noise(rng);
      x = g.P.project(x);
    }
    for (auto* v : {&g.psi_u, &g.psi_v, &g.psi_uu, &g.psi_uv, &g.psi_vv}) v->clear();
    g.analytic = false;
  }
  const double angle_tol = p.angle_tol >= 0 ? p.angle_tol : (g.analytic ? 1e-6 : 1e-3);
  const std::string prefix =
      p.prefix.empty() ? std::filesystem::path(p.input).stem().string() + "_verify" : p.prefix;
  const json report = surface_report(g);
  emit(opts.out_path(prefix, "_report.json"), report);

  Checks checks;
  const json& a = report.at("angle");
  const double dev = std::max(a.at("max_dev1").get<double>(), a.at("max_dev2").get<double>());
  checks.require(dev <= angle_tol, "angle deviation", dev, angle_tol);
  if (!a.at("K_max_err").is_null()) {
    const double e = a.at("K_max_err").get<double>();
    checks.require(e <= p.k_tol, "K error", e, p.k_tol);
  }
  return checks.finish();
}

// ---------------------------------------------------------------- constants

struct ConstantsParams {
  double c1 = 1.0;
  double c2 = 1.0;
  double theta1 = kPi / 3;
  double theta2 = kPi / 6;
};

}  // namespace

void add_generate(CLI::App& app, std::function<int()>& run) {
  CLI::App* sub = app.add_subcommand("generate", "Sample a constant angle surface and report its invariants");
  auto p = std::make_shared<GenerateParams>();
  auto o = std::make_shared<OptionSet>(sub);
  o->add("family", p->family, "slice | product | totally_geodesic | theta_halfpi | zero_theta | two_angle");
  o->add("c1", p->c1, "Curvature of the first factor");
  o->add("c2", p->c2, "Curvature of the second factor");
  o->add("theta", p->theta, "Angle parameter in (0, pi/2)");
  o->add("which", p->which, "Slice factor: first | second");
  o->add("n", p->n, "Nodes per direction");
  o->add("L", p->L, "Parameter range [0, L] in u and v");
  o->add("kappa1", p->kappa1, "Geodesic curvature of the first-factor curve (function of arc length)");
  o->add("kappa2", p->kappa2, "Geodesic curvature of the second-factor curve (function of arc length)");
  o->add("kappa", p->kappa, "two_angle: normalized curvature kappa/sqrt|c| as a function of v");
  o->add("curve-h", p->curve_h, "Arc-length step of the curve integrator");
  o->add_flag("ruled", p->ruled, "Use the ruled form when the swept factor is flat");
  o->add("ruled-c", p->ruled_c, "Function C driving the ruled form");
  o->add_flag("no-partials", p->no_partials, "Omit the closed-form partials from the CSV");
  o->add("obj", p->obj, "Also write an OBJ projected to these three ambient axes (0-based)")->expected(3);
  o->add("prefix", p->prefix, "Output file prefix (default: the family name)");
  o->add("angle-tol", p->angle_tol, "Allowed angle deviation");
  o->add("k-tol", p->k_tol, "Allowed Gaussian curvature error");
  sub->callback([&run, p, o] {
    run = [p, o] {
      o->resolve();
      return run_generate(*o, *p);
    };
  });
}

void add_backlund(CLI::App& app, std::function<int()>& run) {
  CLI::App* sub = app.add_subcommand("backlund", "Solve the Backlund pair (or the Exis2/Exis3 systems) by Goursat sweeps");
  auto p = std::make_shared<BacklundParams>();
  auto o = std::make_shared<OptionSet>(sub);
  o->add("c1", p->c1, "Curvature of the first factor");
  o->add("c2", p->c2, "Curvature of the second factor");
  o->add("theta1", p->theta1, "Larger angle");
  o->add("theta2", p->theta2, "Smaller angle");
  o->add("n", p->n, "Nodes per direction");
  o->add("L", p->L, "Parameter range [0, L] in u and v");
  o->add("data1", p->data1, "exis1: theta1 on u = 0; exis2/exis3: G on u = 0 (function of v)");
  o->add("data2", p->data2, "exis1: theta2 on v = 0; exis2: mu on v = 0; exis3: E on v = 0 (function of u)");
  o->add("variant", p->variant, "exis1 | exis2 | exis3");
  o->add("tol", p->tol, "Sweep convergence tolerance");
  o->add("max-sweeps", p->max_sweeps, "Sweep limit");
  o->add_flag("refine", p->refine, "Repeat on the refined grid and report residual ratios");
  o->add("prefix", p->prefix, "Output file prefix");
  o->add("k-tol", p->k_tol, "Allowed Gaussian curvature error");
  sub->callback([&run, p, o] {
    run = [p, o] {
      o->resolve();
      return run_backlund(*o, *p);
    };
  });
}

void add_reconstruct(CLI::App& app, std::function<int()>& run) {
  CLI::App* sub = app.add_subcommand("reconstruct", "Rebuild an immersion from frame data and check its angles");
  auto p = std::make_shared<ReconstructParams>();
  auto o = std::make_shared<OptionSet>(sub);
  o->add("source", p->source, "exis1 | totally_geodesic");
  o->add("c1", p->c1, "Curvature of the first factor (> 0)");
  o->add("c2", p->c2, "Curvature of the second factor (> 0)");
  o->add("theta1", p->theta1, "Larger angle (exis1)");
  o->add("theta2", p->theta2, "Smaller angle (exis1)");
  o->add("n", p->n, "Nodes per direction");
  o->add("L", p->L, "Parameter range [0, L] in u and v");
  o->add("data1", p->data1, "theta1 on u = 0 (exis1)");
  o->add("data2", p->data2, "theta2 on v = 0 (exis1)");
  o->add("drift-tol", p->drift_tol, "Frame drift that aborts the march");
  o->add("angle-tol", p->angle_tol, "Allowed angle error");
  o->add("prefix", p->prefix, "Output file prefix");
  sub->callback([&run, p, o] {
    run = [p, o] {
      o->resolve();
      return run_reconstruct(*o, *p);
    };
  });
}

void add_verify(CLI::App& app, std::function<int()>& run) {
  CLI::App* sub = app.add_subcommand("verify", "Measure the invariants of a surface CSV");
  auto p = std::make_shared<VerifyParams>();
  auto o = std::make_shared<OptionSet>(sub);
  o->add("input", p->input, "Surface CSV");
  o->add("angle-tol", p->angle_tol, "Allowed angle deviation (default 1e-6 with partials, 1e-3 without)");
  o->add("k-tol", p->k_tol, "Allowed Gaussian curvature error");
  o->add("perturb", p->perturb, "Standard deviation of Gaussian noise added to the points");
  o->add("seed", p->seed, "Seed for --perturb");
  o->add("prefix", p->prefix, "Output file prefix (default: <input stem>_verify)");
  sub->callback([&run, p, o] {
    run = [p, o] {
      o->resolve();
      return run_verify(*o, *p);
    };
  });
}

void add_constants(CLI::App& app, std::function<int()>& run) {
  CLI::App* sub = app.add_subcommand("constants", "Print a1, a2, A1, A2 and the sign case");
  auto p = std::make_shared<ConstantsParams>();
  auto o = std::make_shared<OptionSet>(sub);
  o->add("c1", p->c1, "Curvature of the first factor");
  o->add("c2", p->c2, "Curvature of the second factor");
  o->add("theta1", p->theta1, "Larger angle");
  o->add("theta2", p->theta2, "Smaller angle");
  sub->callback([&run, p, o] {
    run = [p, o] {
      o->resolve();
      std::cout << json::parse(constants_json(exis_constants(p->c1, p->c2, p->theta1, p->theta2))).dump(2) << "\n";
      return 0;
    };
  });
}

}  // namespace casurf::cli
