#pragma once

// Closed-form constant angle surfaces in M^2(c1) x M^2(c2), sampled on a
// (u, v) grid together with their first and second partial derivatives.

#include "casurf/curves.hpp"
#include "casurf/grid.hpp"
#include "casurf/product.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace casurf {

/// Family tag plus the invariants the construction guarantees.
struct FamilyInfo {
  std::string name;
  std::map<std::string, double> params;
  std::optional<double> theta1;
  std::optional<double> theta2;
  std::optional<double> K;
  std::optional<double> Kperp;
};

struct ImmersionGrid {
  ImmersionGrid(ProductSpace P_, Grid2D grid_) : P(P_), grid(grid_) {}

  ProductSpace P;
  Grid2D grid;
  std::vector<Vec> psi;
  std::vector<Vec> psi_u;
  std::vector<Vec> psi_v;
  std::vector<Vec> psi_uu;
  std::vector<Vec> psi_uv;
  std::vector<Vec> psi_vv;
  /// Nodes dropped from measurements (metric degeneracy). Empty means none.
  std::vector<unsigned char> excluded;
  FamilyInfo family;
  /// True when the partials come from the closed form rather than differences.
  bool analytic = false;

  bool has_partials() const { return psi_u.size() == grid.size() && psi_v.size() == grid.size(); }
  bool has_second_partials() const {
    return psi_uu.size() == grid.size() && psi_uv.size() == grid.size() && psi_vv.size() == grid.size();
  }
  std::size_t node(int i, int j) const { return grid.index(i, j); }
  bool is_excluded(int i, int j) const { return !excluded.empty() && excluded[grid.index(i, j)] != 0; }
  std::size_t excluded_count() const;
};

/// Fills missing partials by second-order differences of psi. First partials
/// are projected onto the tangent space of the product.
void fill_fd_partials(ImmersionGrid& grid);

/// Marks nodes where sqrt(EG - F^2) < threshold as excluded.
void exclude_degenerate(ImmersionGrid& grid, double threshold = 1e-3);

/// Max over nodes of the relative quadric defect of psi.
double max_quadric_defect(const ImmersionGrid& grid);

/// Arc-length geodesic through the model's base point, traversed at `speed`
/// for parameter values [0, t_max].
CurveSample geodesic_curve(const SpaceForm& M, double t_max, double h, double speed = 1.0);

enum class Factor { First, Second };

/// Open part of M^2(c1) x {p2} (Factor::First) or {p1} x M^2(c2) using the
/// standard chart of the varying factor:
///   sphere      (cos u cos v, cos u sin v, sin u) / sqrt(c)
///   hyperbolic  (cosh u cosh v, cosh u sinh v, sinh u) / sqrt(-c)
///   plane       (u, v)
ImmersionGrid slice_surface(const ProductSpace& P, Factor which, const Vec& fixed_point,
                            const Grid2D& grid);

/// psi(u, v) = (curve1(u), curve2(v)) for unit-speed curves.
ImmersionGrid product_of_curves(const CurveSample& curve1, const CurveSample& curve2,
                                const Grid2D& grid);

/// Totally geodesic surface with f proportional to the identity (c1 c2 > 0):
/// geodesics of speed sqrt(c2/(c1+c2)) in M1 and sqrt(c1/(c1+c2)) in M2.
ImmersionGrid totally_geodesic_mixed(const ProductSpace& P, const CurveSample& ftilde,
                                     const CurveSample& fbar, const Grid2D& grid);

/// Options for the forms used when the swept factor is flat.
struct FlatFactorForm {
  /// false: the straight form; true: the ruled form driven by C.
  bool ruled = false;
  /// Drives g' = +-trig(theta) C(w) (-sin w, cos w). Defaults to C = 0.
  std::function<double(double)> C;
};

/// Angles (pi/2, theta). ftilde has speed cos(theta) in M1 (parameter v), fbar
/// unit speed in M2 (parameter u). For c2 = 0 fbar is unused.
ImmersionGrid family_theta_halfpi(const ProductSpace& P, double theta, const CurveSample& ftilde,
                                  const CurveSample* fbar, const Grid2D& grid,
                                  const FlatFactorForm& flat = {});

/// Angles (theta, 0). ftilde unit speed in M1 (parameter v), fbar speed
/// sin(theta) in M2 (parameter u). For c1 = 0 ftilde is unused.
ImmersionGrid family_zero_theta(const ProductSpace& P, double theta, const CurveSample* ftilde,
                                const CurveSample& fbar, const Grid2D& grid,
                                const FlatFactorForm& flat = {});

/// Two angles in (0, pi/2): theta and its companion theta' with
/// cos^2 theta' = c2/(c1+c2). ftilde has speed cos(theta), fbar speed
/// sin(theta), both parameterized by v, with matched curvatures
/// kappa~/sqrt|c1| = kappa-/sqrt|c2|.
ImmersionGrid two_angle_case1(const ProductSpace& P, double theta, const CurveSample& ftilde,
                              const CurveSample& fbar, const Grid2D& grid);

/// Companion angle of the totally geodesic / two-angle families.
double companion_angle(double c1, double c2);

}  // namespace casurf
