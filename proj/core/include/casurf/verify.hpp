#pragma once

// Measurements on sampled immersions and abstract frame data: fundamental
// forms, curvatures, angle constancy and the compatibility equations.

#include "casurf/exis.hpp"
#include "casurf/families.hpp"
#include "casurf/frame_data.hpp"
#include "casurf/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace casurf {

/// E, F, G from the partials (differences are used when the grid has none).
MetricGrid first_fundamental_form(const ImmersionGrid& grid);

/// Gaussian curvature from E, F, G alone (Brioschi; the Liouville form when
/// F vanishes identically). Excluded nodes hold NaN. Needs at least 5x5 nodes.
Field2D gauss_curvature(const MetricGrid& m);

/// True for interior nodes whose 3x3 neighbourhood contains no excluded node.
bool stencil_usable(const Grid2D& g, const std::vector<unsigned char>& excluded, int i, int j);

/// Max |field - target| over stencil-usable nodes (0 when there are none).
double max_interior_error(const Field2D& field, double target, const std::vector<unsigned char>& excluded);

struct SecondFormReport {
  Grid2D grid;
  /// sigma[k][a](i, j): component along the orthonormal normal xi_a.
  std::vector<std::array<Mat2, 2>> sigma;
  /// Shape operators S_{xi_1}, S_{xi_2} in the adapted orthonormal frame
  /// (f-eigenvectors e_i, t-eigenvectors xi_i with t xi_i = -lambda_i xi_i).
  std::vector<std::array<Mat2, 2>> shape;
  Field2D Kperp;
  /// Right-hand side of the Gauss equation: sum det S + c1 det((I+f)/2) + c2 det((I-f)/2).
  Field2D K_gauss_equation;
  double sigma_max = 0.0;
  /// Largest entry of the shape operators outside the diag(0, mu1) / diag(mu2, 0) pattern.
  double shape_pattern_max = 0.0;
  double Kperp_max = 0.0;
};

SecondFormReport second_fundamental_form(const ImmersionGrid& grid);

struct AngleOptions {
  double class_tol = 1e-6;
};

struct AngleReport {
  std::string family;
  Grid2D grid;
  Field2D theta1;
  Field2D theta2;
  double theta1_median = 0.0;
  double theta2_median = 0.0;
  double max_dev1 = 0.0;
  double max_dev2 = 0.0;
  std::optional<double> theta1_expected;
  std::optional<double> theta2_expected;

  Field2D K;  ///< Brioschi curvature of the induced metric
  std::optional<double> K_predicted;
  double K_max_err = 0.0;
  double K_gauss_eq_max_err = 0.0;  ///< Brioschi vs Gauss-equation curvature

  Field2D Kperp;
  std::optional<double> Kperp_predicted;
  double Kperp_max_err = 0.0;

  double sigma_max = 0.0;
  double shape_pattern_max = 0.0;
  double algebraic_max = 0.0;
  /// Distance of |g(J~ e1, e2)| to {cos(t1 - t2), |cos(t1 + t2)|}; absent with a flat factor.
  std::optional<double> two_value_max_dev;

  std::vector<FClass> classification;
  FClass dominant_class = FClass::Generic;
  std::size_t excluded = 0;
};

AngleReport angle_constancy(const ImmersionGrid& grid, const AngleOptions& opts = {});

/// Frame data measured on an immersion: Christoffels and sigma from the
/// second partials, normal connection from differences of a smooth normal frame.
FrameData frame_data_from_immersion(const ImmersionGrid& grid);

struct CompatReport {
  double gauss = 0.0;
  double codazzi = 0.0;
  double ricci = 0.0;
  double par_f = 0.0;
  double par_h = 0.0;
  double par_s = 0.0;
  double par_t = 0.0;
  AlgebraicResiduals algebraic;
  std::size_t nodes = 0;  ///< interior nodes entering the maxima

  double max() const;
};

/// Interior maxima of the Gauss, Codazzi and Ricci equations, the four
/// parallelism relations of f, h, s, t and (pointwise) the algebraic ones.
CompatReport compatibility_residuals(const FrameData& fd);
/// Same, after checking that fd was built for the curvatures in C.
CompatReport compatibility_residuals(const FrameData& fd, const ExisConstants& C);

}  // namespace casurf
