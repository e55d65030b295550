#pragma once

// Shared fixtures: standard curves, family samples and Bäcklund runs.

#include "casurf/backlund.hpp"
#include "casurf/families.hpp"
#include "casurf/verify.hpp"

#include <numbers>

namespace casurf::testing {

inline constexpr double kPi = std::numbers::pi;

/// Curve through the base point of M with initial tangent e2, traversed at
/// `speed` for parameters [0, t_max].
inline CurveSample curve_in(const SpaceForm& M, const CurvatureSpec& kappa, double t_max, double speed,
                            double h = 1e-3) {
  const Vec p0 = M.base_point();
  Vec T0 = Vec::Zero(M.ambient_dim());
  T0[1] = 1.0;
  const CurveSample c = integrate_curve(M, kappa, p0, T0, t_max * speed + 2 * h, h);
  return reparameterize_speed(c, speed);
}

inline CurvatureSpec wavy_kappa() {
  return CurvatureSpec::callable([](double s) { return 0.3 + 0.2 * std::sin(s); });
}

inline ImmersionGrid theta_halfpi_sample(double c1, double c2, double theta, int n, double L = 0.5) {
  const ProductSpace P(c1, c2);
  const CurveSample ft = curve_in(P.M1(), wavy_kappa(), L, std::cos(theta));
  const CurveSample fb = curve_in(P.M2(), wavy_kappa(), L, 1.0);
  return family_theta_halfpi(P, theta, ft, &fb, Grid2D::make(n, n, 0.0, L, 0.0, L));
}

inline ImmersionGrid zero_theta_sample(double c1, double c2, double theta, int n, double L = 0.5) {
  const ProductSpace P(c1, c2);
  const CurveSample ft = curve_in(P.M1(), wavy_kappa(), L, 1.0);
  const CurveSample fb = curve_in(P.M2(), wavy_kappa(), L, std::sin(theta));
  return family_zero_theta(P, theta, &ft, fb, Grid2D::make(n, n, 0.0, L, 0.0, L));
}

/// Matched curvatures kappa~(v)/sqrt|c1| = kappa-(v)/sqrt|c2| with
/// kappa~(v) = sqrt|c1| (0.2 + 0.1 v).
inline ImmersionGrid two_angle_sample(double c1, double c2, double theta, int n, double L = 0.5) {
  const ProductSpace P(c1, c2);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double r1 = std::sqrt(std::abs(c1)), r2 = std::sqrt(std::abs(c2));
  const CurveSample ft = curve_in(
      P.M1(), CurvatureSpec::callable([=](double s) { return r1 * (0.2 + 0.1 * s / ct); }), L, ct);
  const CurveSample fb = curve_in(
      P.M2(), CurvatureSpec::callable([=](double s) { return r2 * (0.2 + 0.1 * s / st); }), L, st);
  return two_angle_case1(P, theta, ft, fb, Grid2D::make(n, n, 0.0, L, 0.0, L));
}

inline ImmersionGrid totally_geodesic_sample(double c1, double c2, int n, double L = 0.5) {
  const ProductSpace P(c1, c2);
  const CurveSample ft = curve_in(P.M1(), CurvatureSpec::constant(0.0), L, std::sqrt(c2 / (c1 + c2)));
  const CurveSample fb = curve_in(P.M2(), CurvatureSpec::constant(0.0), L, std::sqrt(c1 / (c1 + c2)));
  return totally_geodesic_mixed(P, ft, fb, Grid2D::make(n, n, 0.0, L, 0.0, L));
}

inline ImmersionGrid slice_sample(double c1, double c2, Factor which, int n, double L = 0.5) {
  const ProductSpace P(c1, c2);
  const Vec fixed = which == Factor::First ? P.M2().base_point() : P.M1().base_point();
  return slice_surface(P, which, fixed, Grid2D::make(n, n, 0.0, L, 0.0, L));
}

/// Sine-sine instance used throughout: c1 = c2 = 1, angles (pi/3, pi/6),
/// constant data pi/2 on [0, 1]^2.
inline BacklundSolution sine_instance(int n, double L = 1.0) {
  const ExisConstants C = exis_constants(1.0, 1.0, kPi / 3, kPi / 6);
  return solve_backlund(C, [](double) { return kPi / 2; }, [](double) { return kPi / 2; },
                        Grid2D::make(n, n, 0.0, L, 0.0, L));
}

}  // namespace casurf::testing
