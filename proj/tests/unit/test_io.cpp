#include "casurf/error.hpp"
#include "casurf/io.hpp"

#include "../support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <sstream>

using namespace casurf;
using namespace casurf::testing;
using nlohmann::json;

namespace {

std::string csv_of(const ImmersionGrid& g, bool partials = true) {
  std::ostringstream os;
  write_surface_csv(os, g, partials);
  return os.str();
}

ImmersionGrid parse(const std::string& text) {
  std::istringstream is(text);
  return read_surface_csv(is, "mem.csv");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("surface CSV round trip") {
  const ImmersionGrid s = theta_halfpi_sample(1.0, -1.0, 0.4, 9);
  const std::string text = csv_of(s);
  CHECK(text.rfind("# casurf surface", 0) == 0);
  CHECK(text.find("# signature=") != std::string::npos);
  const ImmersionGrid r = parse(text);
  CHECK(r.grid == s.grid);
  CHECK(r.P.c1() == 1.0);
  CHECK(r.P.c2() == -1.0);
  CHECK(r.family.name == s.family.name);
  CHECK(r.family.theta2.value() == s.family.theta2.value());
  REQUIRE(r.has_second_partials());
  for (std::size_t k = 0; k < s.grid.size(); ++k) {
    CHECK((r.psi[k] - s.psi[k]).norm() == 0.0);
    CHECK((r.psi_uv[k] - s.psi_uv[k]).norm() == 0.0);
  }
  // Reports computed from the file match the in-memory ones exactly.
  CHECK(angle_report_json(angle_constancy(r)) == angle_report_json(angle_constancy(s)));

  const ImmersionGrid bare = parse(csv_of(s, false));
  CHECK(!bare.has_partials());
  CHECK(bare.psi.size() == s.grid.size());
}

TEST_CASE("schema errors carry line numbers") {
  const ImmersionGrid s = slice_sample(1.0, 1.0, Factor::First, 5);
  const std::string text = csv_of(s);
  std::vector<std::string> lines;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) lines.push_back(l);

  std::string cut;
  for (std::size_t k = 0; k + 3 < lines.size(); ++k) cut += lines[k] + "\n";
  const std::string msg = error_of(cut);
  CHECK(msg.find("mem.csv:" + std::to_string(lines.size() - 3) + ":") == 0);
  CHECK(msg.find("truncated") != std::string::npos);

  std::string bad = text;
  const std::size_t pos = bad.find('\n', bad.find("u,v,x1"));
  bad.insert(pos + 1, "0,0,abc\n");
  CHECK(error_of(bad).find("columns") != std::string::npos);

  CHECK(error_of("").find("mem.csv:") == 0);
  CHECK(error_of("# casurf surface\nu,v,x1\n").find("missing") != std::string::npos);
}

TEST_CASE("curve, backlund and field exports") {
  const ProductSpace P(1.0, 1.0);
  std::ostringstream c;
  write_curve_csv(c, geodesic_curve(P.M1(), 0.01, 1e-3));
  CHECK(c.str().find("\n") != std::string::npos);

  const BacklundSolution sol = sine_instance(5);
  std::ostringstream b;
  write_backlund_csv(b, sol);
  std::size_t rows = 0;
  std::istringstream bs(b.str());
  for (std::string l; std::getline(bs, l);)
    if (!l.empty() && l[0] != '#') ++rows;
  CHECK(rows == sol.grid.size() + 1);

  std::ostringstream m;
  write_metric_csv(m, assemble_metric(sol));
  CHECK(m.str().find("E,F,G") != std::string::npos);

  std::ostringstream f;
  write_fields_csv(f, {"a"}, {&sol.theta1});
  CHECK(f.str().find("u,v,a") != std::string::npos);
  CHECK_THROWS_AS(write_fields_csv(f, {"a", "b"}, {&sol.theta1}), ValidationError);
}

TEST_CASE("OBJ export") {
  ImmersionGrid s = slice_sample(1.0, 1.0, Factor::First, 4);
  s.excluded.assign(s.grid.size(), 0);
  s.excluded[s.node(1, 1)] = 1;
  std::ostringstream os;
  write_obj(os, s, {0, 1, 2});
  const std::string t = os.str();
  CHECK(t.find("# projection") != std::string::npos);
  std::size_t v = 0, f = 0;
  std::istringstream is(t);
  for (std::string l; std::getline(is, l);) {
    if (l.rfind("v ", 0) == 0) ++v;
    if (l.rfind("f ", 0) == 0) ++f;
  }
  CHECK(v == 16);
  CHECK(f == 9 - 4);
  CHECK_THROWS_AS(write_obj(os, s, {0, 1, 9}), ValidationError);
}

TEST_CASE("JSON reports") {
  const json C = json::parse(constants_json(exis_constants(1.0, 1.0, kPi / 3, kPi / 6)));
  CHECK(C.at("A1").get<double>() == doctest::Approx(0.25));
  CHECK(C.at("case") == "sine-sine");

  const BacklundSolution sol = sine_instance(9);
  const json B = json::parse(backlund_report_json(sol, pair_residual(sol), sine_gordon_residual(sol)));
  CHECK(B.contains("pair_residual"));
  CHECK(B.at("grid").at("nu") == 9);

  const json A = json::parse(angle_report_json(angle_constancy(slice_sample(1.0, 1.0, Factor::First, 9))));
  CHECK(A.at("theta1_median").get<double>() == 0.0);
  const json R = json::parse(compat_report_json(compatibility_residuals(frame_data_totally_geodesic(1.0, 1.0,
                                                                                                 Grid2D::make(9, 9, 0, 0.5, 0, 0.5)))));
  CHECK(R.contains("gauss"));
}
