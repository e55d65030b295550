#include "casurf/error.hpp"
#include "casurf/families.hpp"
#include "casurf/verify.hpp"

#include "../support.hpp"

#include <doctest.h>

#include <cmath>

using namespace casurf;
using namespace casurf::testing;

namespace {

double max_abs(const Field2D& f, double target) {
  double m = 0.0;
  for (double x : f.data()) m = std::max(m, std::abs(x - target));
  return m;
}

}  // namespace

TEST_CASE("slices") {
  for (auto [c1, c2] : {std::pair{1.0, 1.0}, std::pair{-1.0, 2.0}}) {
    const ImmersionGrid first = slice_sample(c1, c2, Factor::First, 65);
    const AngleReport r1 = angle_constancy(first);
    CHECK(r1.theta1_median == 0.0);
    CHECK(r1.theta2_median == 0.0);
    CHECK(r1.max_dev1 == 0.0);
    CHECK(max_interior_error(r1.K, c1, first.excluded) < 1e-4);
    CHECK(r1.sigma_max < 1e-10);

    const ImmersionGrid second = slice_sample(c1, c2, Factor::Second, 65);
    const AngleReport r2 = angle_constancy(second);
    CHECK(r2.theta1_median == doctest::Approx(kPi / 2));
    CHECK(r2.theta2_median == doctest::Approx(kPi / 2));
    CHECK(max_interior_error(r2.K, c2, second.excluded) < 1e-4);
    CHECK(r2.Kperp_max_err < 1e-10);
  }
}

TEST_CASE("product of geodesics") {
  const ProductSpace P(1.0, -1.0);
  const CurveSample g1 = geodesic_curve(P.M1(), 0.5, 1e-3);
  const CurveSample g2 = geodesic_curve(P.M2(), 0.5, 1e-3);
  const ImmersionGrid s = product_of_curves(g1, g2, Grid2D::make(33, 33, 0.0, 0.5, 0.0, 0.5));
  const MetricGrid m = first_fundamental_form(s);
  CHECK(max_abs(m.E, 1.0) < 1e-12);
  CHECK(max_abs(m.F, 0.0) < 1e-12);
  CHECK(max_abs(m.G, 1.0) < 1e-12);
  const AngleReport r = angle_constancy(s);
  CHECK(r.theta1_median == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(r.theta2_median == doctest::Approx(0.0));
  CHECK(r.sigma_max < 1e-10);
  CHECK(max_interior_error(r.K, 0.0, s.excluded) < 1e-5);
}

TEST_CASE("totally geodesic family") {
  const ImmersionGrid s = totally_geodesic_sample(1.0, 1.0, 33);
  const MetricGrid m = first_fundamental_form(s);
  const double k = std::sqrt(0.5);
  double err = 0.0;
  for (int i = 0; i < s.grid.nu; ++i)
    for (int j = 0; j < s.grid.nv; ++j) err = std::max(err, std::abs(m.G(i, j) - std::pow(std::cos(k * s.grid.u(i)), 2)));
  CHECK(err < 1e-6);
  const AngleReport r = angle_constancy(totally_geodesic_sample(2.0, 2.0, 65));
  CHECK(r.theta1_median == doctest::Approx(kPi / 4));
  CHECK(r.theta2_median == doctest::Approx(kPi / 4));
  CHECK(r.sigma_max < 1e-6);
  CHECK(r.K_predicted.value() == doctest::Approx(1.0));
  CHECK(r.K_max_err < 1e-4);
  CHECK(r.dominant_class == FClass::ComplexLagrangian);
  CHECK(angle_constancy(totally_geodesic_sample(1.0, 3.0, 17)).dominant_class == FClass::Complex);

  const ProductSpace Pm(1.0, -1.0);
  CHECK_THROWS_AS(totally_geodesic_mixed(Pm, geodesic_curve(Pm.M1(), 1.0, 1e-3), geodesic_curve(Pm.M2(), 1.0, 1e-3),
                                         Grid2D::make(9, 9, 0, 0.5, 0, 0.5)),
                  ValidationError);
}

TEST_CASE("angle (pi/2, theta) family") {
  const double th = kPi / 6;
  const ImmersionGrid s = theta_halfpi_sample(1.0, 1.0, th, 33);
  CHECK(s.family.theta1.value() == doctest::Approx(kPi / 2));
  CHECK(s.family.theta2.value() == doctest::Approx(th));
  const AngleReport r = angle_constancy(s);
  CHECK(r.max_dev1 < 1e-6);
  CHECK(r.max_dev2 < 1e-6);
  CHECK(r.K_max_err < 1e-4);
  CHECK(r.Kperp_max_err < 1e-6);
  CHECK(r.shape_pattern_max < 1e-4);
  const MetricGrid m = first_fundamental_form(s);
  CHECK(max_abs(m.F, 0.0) < 1e-10);
  CHECK(max_abs(m.G, 1.0) < 1e-10);
}

TEST_CASE("angle (theta, 0) family") {
  const double th = kPi / 3;
  const ImmersionGrid s = zero_theta_sample(1.0, 1.0, th, 33);
  const AngleReport r = angle_constancy(s);
  CHECK(r.theta1_median == doctest::Approx(th));
  CHECK(r.theta2_median == doctest::Approx(0.0));
  CHECK(r.K_predicted.value() == doctest::Approx(0.25));
  CHECK(r.K_max_err < 1e-4);
  // f eigenvalues (cos 2 theta, 1) at an interior node.
  const ImmersionGrid& g = s;
  const std::size_t k = g.node(10, 20);
  const FHSTensors T = extract_fhst(make_frame(g.P, g.psi[k], g.psi_u[k], g.psi_v[k]), g.P);
  const Eigen2 e = self_adjoint_eigen(T.f, T.g);
  CHECK(e.lambda1 == doctest::Approx(std::cos(2 * th)).epsilon(1e-8));
  CHECK(e.lambda2 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("flat factor forms") {
  const double th = 0.7;
  const Grid2D grid = Grid2D::make(17, 17, 0.0, 0.5, 0.0, 0.5);
  {
    const ProductSpace P(1.0, 0.0);
    const CurveSample ft = curve_in(P.M1(), wavy_kappa(), 0.5, std::cos(th));
    const ImmersionGrid s = family_theta_halfpi(P, th, ft, nullptr, grid);
    const AngleReport r = angle_constancy(s);
    CHECK(r.theta1_median == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(r.theta2_median == doctest::Approx(th).epsilon(1e-12));
    CHECK(r.max_dev2 < 1e-10);
    CHECK(!r.two_value_max_dev.has_value());
  }
  {
    const ProductSpace P(0.0, -1.0);
    const CurveSample fb = curve_in(P.M2(), wavy_kappa(), 0.5, std::sin(th));
    const ImmersionGrid s = family_zero_theta(P, th, nullptr, fb, grid);
    const AngleReport r = angle_constancy(s);
    CHECK(r.theta1_median == doctest::Approx(th).epsilon(1e-12));
    CHECK(r.theta2_median == doctest::Approx(0.0));
  }
  {
    const ProductSpace P(1.0, 0.0);
    const CurveSample ft = curve_in(P.M1(), wavy_kappa(), 0.5, std::cos(th));
    FlatFactorForm ruled;
    ruled.ruled = true;
    ruled.C = [](double w) { return 0.5 + 0.2 * w; };
    const AngleReport r = angle_constancy(family_theta_halfpi(P, th, ft, nullptr, grid, ruled));
    CHECK(r.max_dev1 < 1e-6);
    CHECK(r.max_dev2 < 1e-6);
    CHECK(r.theta2_median == doctest::Approx(th).epsilon(1e-6));
  }
}

TEST_CASE("two-angle family") {
  const double th = kPi / 3;
  CHECK(companion_angle(1.0, 1.0) == doctest::Approx(kPi / 4));
  const AngleReport r = angle_constancy(two_angle_sample(1.0, 1.0, th, 33));
  CHECK(r.max_dev1 < 1e-6);
  CHECK(r.max_dev2 < 1e-6);
  CHECK(r.theta1_median == doctest::Approx(th));
  CHECK(r.theta2_median == doctest::Approx(kPi / 4));
  CHECK(r.K_max_err < 1e-4);
  CHECK(r.Kperp_max_err < 1e-3);

  // Zero curvatures: same invariants as the totally geodesic family.
  const ProductSpace P(1.0, 1.0);
  const CurveSample ft = curve_in(P.M1(), CurvatureSpec::constant(0.0), 0.5, std::cos(th));
  const CurveSample fb = curve_in(P.M2(), CurvatureSpec::constant(0.0), 0.5, std::sin(th));
  const AngleReport z = angle_constancy(two_angle_case1(P, th, ft, fb, Grid2D::make(33, 33, 0, 0.5, 0, 0.5)));
  CHECK(z.theta1_median == doctest::Approx(th));
  CHECK(z.theta2_median == doctest::Approx(kPi / 4));
  CHECK(z.max_dev1 < 1e-6);
  const double K = std::cos(th) * std::cos(th) * 0.5 + std::sin(th) * std::sin(th) * 0.5;
  CHECK(max_interior_error(z.K, K, {}) < 1e-4);
}

TEST_CASE("family preconditions") {
  const ProductSpace P(1.0, 1.0);
  const CurveSample c = curve_in(P.M1(), wavy_kappa(), 0.5, 1.0);
  const Grid2D grid = Grid2D::make(9, 9, 0.0, 0.5, 0.0, 0.5);
  CHECK_THROWS_AS(family_theta_halfpi(P, 0.0, c, &c, grid), ValidationError);
  CHECK_THROWS_AS(family_theta_halfpi(P, 0.5, c, nullptr, grid), ValidationError);
  // Curve too short for the grid.
  CHECK_THROWS_AS(product_of_curves(c, c, Grid2D::make(9, 9, 0.0, 5.0, 0.0, 0.5)), ValidationError);
}

TEST_CASE("degenerate nodes are excluded") {
  ImmersionGrid s = slice_sample(1.0, 1.0, Factor::First, 17, 1.6);
  exclude_degenerate(s, 0.2);
  CHECK(s.excluded_count() > 0);
  CHECK(max_quadric_defect(s) < 1e-14);
}
