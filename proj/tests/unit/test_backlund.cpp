#include "casurf/backlund.hpp"
#include "casurf/error.hpp"
#include "casurf/verify.hpp"

#include "../support.hpp"

#include <doctest.h>

#include <cmath>

using namespace casurf;
using namespace casurf::testing;

namespace {

Grid2D square(int n, double L = 1.0) { return Grid2D::make(n, n, 0.0, L, 0.0, L); }

}  // namespace

TEST_CASE("constants") {
  const ExisConstants C = exis_constants(1.0, 1.0, kPi / 3, kPi / 6);
  CHECK(std::abs(C.a1 + std::sqrt(3.0) / 2) < 1e-14);
  CHECK(std::abs(C.a2 - std::sqrt(3.0) / 2) < 1e-14);
  CHECK(std::abs(C.A1 - 0.25) < 1e-14);
  CHECK(std::abs(C.A2 - 0.25) < 1e-14);
  CHECK(C.sign_case == BacklundCase::SineSine);
  CHECK(C.gauss_curvature() == doctest::Approx(3.0 / 8));

  const ExisConstants M = exis_constants(1.0, -1.0, kPi / 3, kPi / 6);
  CHECK(std::abs(M.A1 - 0.5) < 1e-14);
  CHECK(std::abs(M.A2 + 0.5) < 1e-14);
  CHECK(M.sign_case == BacklundCase::Mixed);
  CHECK(exis_constants(-1.0, -1.0, kPi / 3, kPi / 6).sign_case == BacklundCase::SinhSinh);
  CHECK(to_string(BacklundCase::Mixed) == "mixed");

  for (double t1 : {0.3, 0.8, 1.4})
    for (double t2 : {0.05, 0.2, 0.25}) {
      const ExisConstants X = exis_constants(2.0, 0.5, t1, t2);
      CHECK(std::abs(X.a1 * (std::cos(2 * t1) - std::cos(2 * t2)) - std::sin(2 * t1)) < 1e-14);
    }

  CHECK_THROWS_AS(exis_constants(1.0, 1.0, kPi / 6, kPi / 3), ValidationError);
  CHECK_THROWS_AS(exis_constants(1.0, 1.0, kPi / 2, kPi / 6), ValidationError);
  CHECK_THROWS_AS(exis_constants(0.0, 0.0, kPi / 3, kPi / 6), ValidationError);
  // c1 cos^2 t2 = c2 sin^2 t2 makes A1 vanish.
  CHECK_THROWS_AS(exis_constants(1.0, 3.0, kPi / 3, kPi / 6), ValidationError);
}

TEST_CASE("Goursat solve satisfies the pair") {
  const BacklundSolution sol = sine_instance(33);
  CHECK(sol.scheme_residual < 1e-8);
  CHECK(sol.sweeps <= GoursatParams{}.max_sweeps);
  CHECK(sol.excluded_count() == 0);
  CHECK(sol.theta1(0, 10) == doctest::Approx(kPi / 2));
  CHECK(sol.theta2(10, 0) == doctest::Approx(kPi / 2));

  const PairResidual r33 = pair_residual(sol);
  const PairResidual r65 = pair_residual(sine_instance(65));
  CHECK(r33.max() < 1e-3);
  CHECK(r33.max() / r65.max() > 3.0);

  const SineGordonResidual s65 = sine_gordon_residual(sine_instance(65));
  const SineGordonResidual s129 = sine_gordon_residual(sine_instance(129));
  CHECK(std::max(s65.r_plus, s65.r_minus) < 5e-3);
  CHECK(s65.r_plus / s129.r_plus > 3.0);
  CHECK(s65.r_minus / s129.r_minus > 3.0);
}

TEST_CASE("theta1 is integrated from its own derivative") {
  const BacklundSolution sol = sine_instance(65);
  const ExisConstants& C = sol.constants;
  const double k1 = C.a1 * std::sqrt(C.A1 / C.A2);
  const Grid2D& g = sol.grid;
  for (int j : {0, 32, 64}) {
    double acc = sol.theta1(0, j);
    for (int i = 1; i < g.nu; ++i)
      acc += 0.5 * g.hu() * k1 * (std::sin(sol.theta2(i - 1, j)) + std::sin(sol.theta2(i, j)));
    CHECK(std::abs(acc - sol.theta1(g.nu - 1, j)) < 1e-3);
  }
}

TEST_CASE("zero theta2 data decouples") {
  const ExisConstants C = exis_constants(1.0, 1.0, kPi / 3, kPi / 6);
  const BacklundSolution sol =
      solve_backlund(C, [](double v) { return 1.0 + 0.2 * v; }, [](double) { return 0.0; }, square(17));
  for (int i = 0; i < 17; ++i) {
    CHECK(sol.theta1(i, 0) == 1.0);
    CHECK(sol.theta2(i, 0) == 0.0);
  }
  CHECK(sol.theta2(5, 5) != 0.0);
}

TEST_CASE("zero fields have zero residuals") {
  for (const ExisConstants& C :
       {exis_constants(1.0, 1.0, kPi / 3, kPi / 6), exis_constants(-1.0, -1.0, kPi / 3, kPi / 6)}) {
    const BacklundSolution sol = solve_backlund(C, [](double) { return 0.0; }, [](double) { return 0.0; }, square(9));
    for (double x : sol.theta1.data()) CHECK(x == 0.0);
    for (double x : sol.theta2.data()) CHECK(x == 0.0);
    const SineGordonResidual sg = sine_gordon_residual(sol);
    CHECK(sg.r_plus == 0.0);
    CHECK(sg.r_minus == 0.0);
    CHECK(pair_residual(sol).max() == 0.0);
    CHECK(sol.excluded_count() == sol.grid.size());
  }
}

TEST_CASE("solver input validation") {
  const ExisConstants S = exis_constants(-1.0, -1.0, kPi / 3, kPi / 6);
  CHECK_THROWS_AS(solve_backlund(S, [](double) { return -1.0; }, [](double) { return 1.0; }, square(9)), ValidationError);
  CHECK_THROWS_AS(solve_backlund(S, [](double) { return NAN; }, [](double) { return 1.0; }, square(9)), ValidationError);
  CHECK_THROWS_AS(solve_backlund(S, {}, [](double) { return 1.0; }, square(9)), ValidationError);
  GoursatParams tight;
  tight.max_sweeps = 1;
  CHECK_THROWS_AS(sine_instance(3), ValidationError);
  CHECK_THROWS_AS(solve_backlund(exis_constants(1.0, 1.0, kPi / 3, kPi / 6), [](double) { return kPi / 2; },
                                 [](double) { return kPi / 2; }, square(17), tight),
                  NumericalError);
}

TEST_CASE("Exis1 metric") {
  const BacklundSolution sol = sine_instance(65);
  const MetricGrid m = assemble_metric(sol);
  for (std::size_t k = 0; k < m.E.data().size(); ++k) {
    CHECK(m.E.data()[k] > 0.0);
    CHECK(m.G.data()[k] > 0.0);
  }
  CHECK(max_interior_error(gauss_curvature(m), 3.0 / 8, m.excluded) < 1e-3);
  const ExisFields f = exis1_fields(sol);
  CHECK(f.variant == ExisVariant::Exis1);
  // E = 1/(mu2^2 + A2).
  const std::size_t k = sol.grid.index(20, 30);
  CHECK(f.E.data()[k] == doctest::Approx(1.0 / (sol.mu2.data()[k] * sol.mu2.data()[k] + sol.constants.A2)));
}

TEST_CASE("sinh and mixed cases") {
  const ExisConstants H = exis_constants(-1.0, -1.0, kPi / 3, kPi / 6);
  const BacklundSolution sh = solve_backlund(H, [](double) { return 1.0; }, [](double) { return 0.5; }, square(33, 0.5));
  CHECK(sh.sign_case == BacklundCase::SinhSinh);
  CHECK(pair_residual(sh).max() < 1e-3);
  const MetricGrid mh = assemble_metric(sh);
  CHECK(max_interior_error(gauss_curvature(mh), H.gauss_curvature(), mh.excluded) < 1e-3);

  const ExisConstants M = exis_constants(1.0, -1.0, kPi / 3, kPi / 6);
  const BacklundSolution mx =
      solve_backlund(M, [](double) { return kPi / 2; }, [](double) { return 0.5; }, square(33, 0.5));
  CHECK(mx.sign_case == BacklundCase::Mixed);
  CHECK(pair_residual(mx).max() < 1e-3);
  const MetricGrid mm = assemble_metric(mx);
  CHECK(max_interior_error(gauss_curvature(mm), M.gauss_curvature(), mm.excluded) < 1e-3);
}

TEST_CASE("Exis2 and Exis3 metrics") {
  const ExisConstants C2 = exis_constants(-1.0, 1.0, kPi / 3, kPi / 6);
  REQUIRE(C2.A1 < 0);
  const ExisFields f2 = solve_exis2(C2, [](double v) { return 1.0 + 0.1 * v; }, [](double u) { return 0.3 + 0.1 * u; },
                                    square(33, 0.5));
  CHECK(f2.variant == ExisVariant::Exis2);
  CHECK(f2.mu1(3, 4) == doctest::Approx(std::sqrt(-C2.A1)));
  const MetricGrid m2 = assemble_metric(f2);
  CHECK(max_interior_error(gauss_curvature(m2), C2.gauss_curvature(), m2.excluded) < 1e-3);

  const ExisConstants C3 = exis_constants(-1.0, -1.0, kPi / 3, kPi / 6);
  const ExisFields f3 = solve_exis3(C3, [](double) { return 1.0; }, [](double) { return 1.0; }, square(33, 0.5));
  CHECK(f3.variant == ExisVariant::Exis3);
  const MetricGrid m3 = assemble_metric(f3);
  CHECK(max_interior_error(gauss_curvature(m3), C3.gauss_curvature(), m3.excluded) < 1e-3);

  CHECK_THROWS_AS(solve_exis2(exis_constants(1.0, 1.0, kPi / 3, kPi / 6), [](double) { return 1.0; },
                              [](double) { return 0.3; }, square(9)),
                  ValidationError);
  CHECK_THROWS_AS(solve_exis3(C2, [](double) { return 1.0; }, [](double) { return 1.0; }, square(9)), ValidationError);
  CHECK_THROWS_AS(solve_exis2(C2, [](double) { return -1.0; }, [](double) { return 0.3; }, square(9)), ValidationError);
}

TEST_CASE("variant dispatch") {
  const ExisConstants C = exis_constants(-1.0, -1.0, kPi / 3, kPi / 6);
  const double r1 = std::sqrt(-C.A1), r2 = std::sqrt(-C.A2);
  CHECK(dispatch_variant(C, 0.7, 0.9) == ExisVariant::Exis1);
  CHECK(dispatch_variant(C, r1, 0.9) == ExisVariant::Exis2);
  CHECK(dispatch_variant(C, -r1, -r2) == ExisVariant::Exis3);
  CHECK_THROWS_AS(dispatch_variant(C, 0.7, r2), ValidationError);
  CHECK(to_string(ExisVariant::Exis3) == "exis3");
}

TEST_CASE("frame data from the Backlund solution") {
  const FrameData fd = build_frame_data(exis1_fields(sine_instance(33)));
  const double t1 = kPi / 3, t2 = kPi / 6;
  for (std::size_t k = 0; k < fd.grid.size(); ++k) {
    CHECK(fd.sigma_vec(k, 0, 1).norm() == 0.0);
    CHECK(fd.f[k](0, 0) == doctest::Approx(std::cos(2 * t1)));
    CHECK(fd.f[k](1, 1) == doctest::Approx(std::cos(2 * t2)));
    CHECK((fd.t[k] + fd.f[k]).norm() == 0.0);
    CHECK((fd.h[k] - Mat2::Identity()).norm() == 0.0);
  }
  const CompatReport coarse = compatibility_residuals(fd);
  const CompatReport fine = compatibility_residuals(build_frame_data(exis1_fields(sine_instance(65))));
  CHECK(fine.gauss < 1e-3);
  CHECK(coarse.gauss / fine.gauss > 3.0);
  CHECK(coarse.codazzi / fine.codazzi > 3.0);
  CHECK(coarse.ricci / fine.ricci > 3.0);
  CHECK(fine.algebraic.max() < 1e-12);

  const ExisConstants C = exis_constants(1.0, 1.0, kPi / 3, kPi / 6);
  CHECK(compatibility_residuals(fd, C).gauss == coarse.gauss);
}

TEST_CASE("reconstruction from Exis1 data") {
  const BacklundSolution sol = sine_instance(33, 0.5);
  const FrameData fd = build_frame_data(exis1_fields(sol));
  const ProductSpace P(1.0, 1.0);
  const ReconstructResult r = reconstruct_immersion(fd, P);
  CHECK(r.quadric_max_defect < 1e-6);
  CHECK(r.metric_max_rel_err < 1e-3);
  const AngleReport a = angle_constancy(r.immersion);
  CHECK(a.theta1_median == doctest::Approx(kPi / 3).epsilon(1e-3));
  CHECK(a.theta2_median == doctest::Approx(kPi / 6).epsilon(1e-3));

  const ReconstructResult fine = reconstruct_immersion(build_frame_data(exis1_fields(sine_instance(65, 0.5))), P);
  CHECK(r.metric_max_rel_err / fine.metric_max_rel_err > 3.0);
  CHECK(fine.commutation_defect < r.commutation_defect);
}

TEST_CASE("reconstruction of totally geodesic data") {
  const FrameData fd = frame_data_totally_geodesic(1.0, 3.0, square(33, 0.5));
  const ReconstructResult r = reconstruct_immersion(fd, ProductSpace(1.0, 3.0));
  const AngleReport rec = angle_constancy(r.immersion);
  const AngleReport ref = angle_constancy(totally_geodesic_sample(1.0, 3.0, 33));
  CHECK(rec.theta1_median == doctest::Approx(ref.theta1_median).epsilon(1e-3));
  CHECK(rec.theta2_median == doctest::Approx(ref.theta2_median).epsilon(1e-3));
  CHECK(max_interior_error(rec.K, 0.75, {}) < 1e-3);
  CHECK(rec.sigma_max < 1e-3);
}

TEST_CASE("reconstruction preconditions") {
  const FrameData fd = frame_data_totally_geodesic(1.0, 1.0, square(9, 0.5));
  try {
    reconstruct_immersion(fd, ProductSpace(1.0, -1.0));
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()) == "reconstruction requires positive curvatures");
  }
  CHECK_THROWS_AS(reconstruct_immersion(fd, ProductSpace(1.0, 2.0)), ValidationError);
  FrameData holes = fd;
  holes.excluded.assign(fd.grid.size(), 0);
  holes.excluded[3] = 1;
  CHECK_THROWS_AS(reconstruct_immersion(holes, ProductSpace(1.0, 1.0)), ValidationError);
  CHECK_THROWS_AS(frame_data_totally_geodesic(1.0, -1.0, square(9)), ValidationError);
}

TEST_CASE("Exis3 frame data is compatible") {
  const ExisConstants C = exis_constants(-1.0, -1.0, kPi / 3, kPi / 6);
  auto residuals = [&](int n) {
    return compatibility_residuals(
        build_frame_data(solve_exis3(C, [](double) { return 1.0; }, [](double) { return 1.0; }, square(n, 0.5))), C);
  };
  const CompatReport a = residuals(33), b = residuals(65);
  CHECK(a.gauss / b.gauss > 3.0);
  CHECK(a.codazzi / b.codazzi > 3.0);
  CHECK(a.ricci / b.ricci > 3.0);
  CHECK(b.max() < 1e-4);
}
