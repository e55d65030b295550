#pragma once

// Curves of prescribed geodesic curvature in M^2(c), integrated through the
// Frenet system  T' = kappa N - c alpha,  N = J T.

#include "casurf/ambient.hpp"

#include <functional>
#include <vector>

namespace casurf {

/// Geodesic curvature as a function of arc length. A callable takes
/// precedence over a sampled table (linearly interpolated, clamped at ends).
struct CurvatureSpec {
  std::function<double(double)> fn;
  std::vector<double> table_s;
  std::vector<double> table_kappa;

  static CurvatureSpec constant(double kappa);
  static CurvatureSpec callable(std::function<double(double)> f);
  static CurvatureSpec table(std::vector<double> s, std::vector<double> kappa);

  bool valid() const;
  double operator()(double s) const;
};

/// Uniformly sampled arc-length curve with its Frenet frame.
struct CurveSample {
  SpaceForm space{1.0};
  double h = 0.0;                   ///< arc-length step
  double speed = 1.0;               ///< traversal speed: parameter t = s / speed
  std::vector<double> s;            ///< arc length at each sample
  std::vector<Vec> alpha;           ///< points on the quadric
  std::vector<Vec> T;               ///< unit tangents
  std::vector<Vec> N;               ///< J T
  std::vector<double> kappa;        ///< geodesic curvature (unit-speed)

  std::size_t size() const { return s.size(); }
  /// Parameter value of sample k.
  double param(std::size_t k) const { return s[k] / speed; }
  double param_min() const { return s.front() / speed; }
  double param_max() const { return s.back() / speed; }
};

/// Position and parameter derivatives up to third order at one parameter value.
struct CurveJet {
  Vec pos;
  Vec d1;
  Vec d2;
  Vec d3;
};

/// RK4 on (alpha, T) with N = J T recomputed at each stage and a projection
/// back onto the quadric / unit tangent bundle after every step. Samples
/// s = 0, h, 2h, ... up to the first multiple of h that reaches s_max.
CurveSample integrate_curve(const SpaceForm& M, const CurvatureSpec& kappa, const Vec& p0,
                            const Vec& T0, double s_max, double h);

/// Same trace traversed at constant speed rho (> 0).
CurveSample reparameterize_speed(const CurveSample& curve, double rho);

/// kappa_hat = <dT/ds, N> with second-order differences of the stored tangents.
std::vector<double> estimate_geodesic_curvature(const CurveSample& curve, const SpaceForm& M);

/// C^2 quintic Hermite interpolation of the sampled curve in its parameter t,
/// using alpha, alpha' = speed T and alpha'' = speed^2 (kappa N - c alpha).
/// Throws ValidationError outside [param_min, param_max].
CurveJet evaluate(const CurveSample& curve, double t);

/// kappa interpolated linearly at parameter t.
double curvature_at(const CurveSample& curve, double t);

}  // namespace casurf
