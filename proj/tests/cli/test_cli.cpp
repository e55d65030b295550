#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("casurf_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Runs casurf with CASURF_OUT_DIR pointing at the work directory.
Result casurf(const std::string& args, const std::string& env = "") {
  const fs::path out = work_dir() / "stdout.txt", err = work_dir() / "stderr.txt";
  const std::string cmd = "cd '" + work_dir().string() + "' && CASURF_OUT_DIR='" + work_dir().string() + "' " + env +
                          " '" CASURF_EXE "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

json report(const std::string& name) { return json::parse(slurp(work_dir() / name)); }

}  // namespace

TEST_CASE("generate theta_halfpi") {
  const Result r = casurf("generate --family theta_halfpi --c1 1 --c2 1 --theta 0.5236 --n 64");
  REQUIRE(r.code == 0);
  const json a = json::parse(r.out).at("angle");
  CHECK(std::abs(a.at("K_predicted").get<double>() - 0.25) < 1e-5);
  CHECK(a.at("K_max_err").get<double>() < 1e-4);
  CHECK(fs::exists(work_dir() / "theta_halfpi.csv"));
  CHECK(report("theta_halfpi_report.json") == json::parse(r.out));
}

TEST_CASE("generate slice and totally geodesic") {
  const Result s = casurf("generate --family slice --which first");
  REQUIRE(s.code == 0);
  CHECK(json::parse(s.out)["angle"]["theta1_median"] == 0.0);
  CHECK(json::parse(s.out)["angle"]["theta2_median"] == 0.0);

  const Result t = casurf("generate --family totally_geodesic --c1 2 --c2 2 --obj 0 1 3");
  REQUIRE(t.code == 0);
  const json a = json::parse(t.out).at("angle");
  CHECK(std::abs(a.at("theta1_median").get<double>() - std::numbers::pi / 4) < 1e-6);
  CHECK(a.at("K_max_err").get<double>() < 1e-4);
  CHECK(a.at("sigma_max").get<double>() < 1e-6);
  CHECK(slurp(work_dir() / "totally_geodesic.obj").find("x1, x2, x4") != std::string::npos);
}

TEST_CASE("generate validation") {
  CHECK(casurf("generate --family nonsense").code == 2);
  CHECK(casurf("generate --family two_angle --c1 1 --c2 -1").code == 2);
  CHECK(casurf("generate --theta 2").code == 2);
  CHECK(casurf("generate --n abc").code == 2);
  CHECK(casurf("frobnicate").code == 2);
  CHECK(casurf("--help").code == 0);
}

TEST_CASE("config files and overrides") {
  std::ofstream(work_dir() / "cfg.json") << R"({"family": "slice", "which": "second", "n": 33, "prefix": "cfg"})";
  const Result r = casurf("generate --config cfg.json --n 65");
  REQUIRE(r.code == 0);
  const json a = report("cfg_report.json").at("angle");
  CHECK(a["grid"]["nu"] == 65);
  CHECK(std::abs(a["theta1_median"].get<double>() - std::numbers::pi / 2) < 1e-12);

  std::ofstream(work_dir() / "typo.json") << R"({"famly": "slice"})";
  const Result t = casurf("generate --config typo.json");
  CHECK(t.code == 2);
  CHECK(t.err.find("unknown key 'famly'") != std::string::npos);

  const Result d = casurf("generate --family slice --prefix elsewhere --out-dir sub");
  CHECK(d.code == 0);
  CHECK(fs::exists(work_dir() / "sub" / "elsewhere_report.json"));
}

TEST_CASE("backlund") {
  const Result r = casurf("backlund --c1 1 --c2 1 --theta1 1.0471975511965976 --theta2 0.5235987755982988 --n 65");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("K_max_err").get<double>() < 1e-3);
  CHECK(j.at("case") == "sine-sine");
  CHECK(fs::exists(work_dir() / "backlund_solution.csv"));
  CHECK(fs::exists(work_dir() / "backlund_metric.csv"));

  const Result z = casurf("backlund --data1 0 --data2 0 --n 17 --prefix zero");
  REQUIRE(z.code == 0);
  const json zj = json::parse(z.out);
  CHECK(zj["pair_residual"]["eq_u"] == 0.0);
  CHECK(zj["pair_residual"]["eq_v"] == 0.0);
  CHECK(zj["sine_gordon_residual"]["plus"] == 0.0);
  CHECK(zj["sine_gordon_residual"]["minus"] == 0.0);

  const Result f = casurf("backlund --refine --n 33 --prefix refined");
  REQUIRE(f.code == 0);
  const json ref = json::parse(f.out).at("refinement");
  CHECK(ref.at("pair_ratio").get<double>() > 3.0);
  CHECK(ref.at("pair_ratio").get<double>() < 5.0);
  CHECK(ref.at("sine_gordon_plus_ratio").get<double>() > 3.0);

  const Result e3 = casurf("backlund --variant exis3 --c1 -1 --c2 -1 --data1 1 --data2 1 --L 0.5 --prefix e3");
  CHECK(e3.code == 0);
  CHECK(fs::exists(work_dir() / "e3_fields.csv"));

  const Result nc = casurf("backlund --max-sweeps 2 --prefix nc");
  CHECK(nc.code == 4);
  CHECK(nc.err.find("2 sweeps") != std::string::npos);
  CHECK(casurf("backlund --theta1 0.2 --theta2 0.5").code == 2);
}

TEST_CASE("reconstruct") {
  const Result r = casurf("reconstruct");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(std::abs(j["angle"]["theta1_median"].get<double>() - std::numbers::pi / 3) < 1e-3);
  CHECK(std::abs(j["angle"]["theta2_median"].get<double>() - std::numbers::pi / 6) < 1e-3);
  CHECK(j["reconstruction"]["metric_max_rel_err"].get<double>() < 1e-3);
  CHECK(slurp(work_dir() / "reconstruct_metric_error.csv").rfind("u,v,metric_rel_err", 0) == 0);

  const Result neg = casurf("reconstruct --c2 -1");
  CHECK(neg.code == 2);
  CHECK(neg.err.find("reconstruction requires positive curvatures") != std::string::npos);

  CHECK(casurf("reconstruct --source totally_geodesic --c1 1 --c2 3 --prefix tg").code == 0);
  // An impossible tolerance turns into a check failure.
  CHECK(casurf("reconstruct --angle-tol 1e-14 --prefix strict").code == 3);
}

TEST_CASE("verify") {
  REQUIRE(casurf("generate --family zero_theta --c1 1 --c2 1 --theta 1.0471975511965976 --n 33 --prefix zt").code == 0);
  const Result v = casurf("verify --input zt.csv");
  REQUIRE(v.code == 0);
  CHECK(slurp(work_dir() / "zt_report.json") == slurp(work_dir() / "zt_verify_report.json"));

  const Result noisy = casurf("verify --input zt.csv --perturb 1e-2 --seed 42 --prefix noisy");
  CHECK(noisy.code == 3);
  CHECK(noisy.err.find("angle deviation") != std::string::npos);
  const Result again = casurf("verify --input zt.csv --perturb 1e-2 --seed 42 --prefix noisy2");
  CHECK(slurp(work_dir() / "noisy_report.json") == slurp(work_dir() / "noisy2_report.json"));
  CHECK(casurf("verify --input zt.csv --perturb 1e-2").code == 2);

  std::ifstream in(work_dir() / "zt.csv");
  std::ofstream cut(work_dir() / "cut.csv");
  std::string line;
  for (int k = 0; k < 50 && std::getline(in, line); ++k) cut << line << "\n";
  cut.close();
  const Result t = casurf("verify --input cut.csv");
  CHECK(t.code == 2);
  CHECK(t.err.find("cut.csv:50:") != std::string::npos);
  CHECK(casurf("verify --input missing.csv").code == 2);
  CHECK(casurf("verify").code == 2);
}

TEST_CASE("constants") {
  const Result r = casurf("constants --c1 1 --c2 -1 --theta1 1.0471975511965976 --theta2 0.5235987755982988");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(std::abs(j["A1"].get<double>() - 0.5) < 1e-14);
  CHECK(std::abs(j["A2"].get<double>() + 0.5) < 1e-14);
  CHECK(j["case"] == "mixed");
  CHECK(casurf("constants --theta1 0.1 --theta2 0.2").code == 2);
}
