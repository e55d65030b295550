#pragma once

// Goursat integration of the Backlund pair behind the two-angle existence
// results, the metric and frame data it produces, and reconstruction of the
// immersion from frame data by marching the ambient structure equations.

#include "casurf/exis.hpp"
#include "casurf/families.hpp"
#include "casurf/frame_data.hpp"
#include "casurf/grid.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace casurf {

struct GoursatParams {
  double tol = 1e-10;
  int max_sweeps = 50;
};

/// Solution of
///   (th1)_u =  a1 sqrt(|A1|/|A2|) sn2(th2),   (th2)_v = a2 sqrt(|A2|/|A1|) sn1(th1)
/// where sn_i is sin when A_i > 0 and sinh when A_i < 0, with
/// mu_i = sqrt(A_i) cot th_i or sqrt(-A_i) coth th_i.
struct BacklundSolution {
  Grid2D grid;
  ExisConstants constants;
  BacklundCase sign_case = BacklundCase::SineSine;
  Field2D theta1;
  Field2D theta2;
  Field2D mu1;  ///< NaN on excluded nodes
  Field2D mu2;
  /// Nodes where some th_i is within 1e-3 of a zero of sn_i (or past it).
  std::vector<unsigned char> excluded;
  int sweeps = 0;
  /// Largest change of the last sweep (the fixed-point residual of the scheme).
  double scheme_residual = 0.0;
  /// Set when |a1 a2| * area >= 1, where the sweeps may converge slowly.
  std::string warning;

  std::size_t excluded_count() const;
};

/// Goursat data: th1 along u = u0 as a function of v and th2 along v = v0 as a
/// function of u. Alternating RK4 sweeps until the change drops below tol.
/// Throws ValidationError on non-finite data (or negative data for a coth
/// field) and NumericalError when the sweeps do not converge.
BacklundSolution solve_backlund(const ExisConstants& C, const std::function<double(double)>& bdata1,
                                const std::function<double(double)>& bdata2, const Grid2D& grid,
                                const GoursatParams& params = {});

/// Central-difference residuals of the two equations of the pair.
struct PairResidual {
  double eq_u = 0.0;
  double eq_v = 0.0;
  double max() const { return eq_u > eq_v ? eq_u : eq_v; }
};
PairResidual pair_residual(const BacklundSolution& sol);

/// Interior maxima with the 4-point mixed stencil. SineSine / SinhSinh:
/// (th1 +- th2)_uv - a1 a2 sn(th1 +- th2). Mixed: the two cross identities
/// (th1)_uv - a1 a2 cn2(th2) sn1(th1) and (th2)_uv - a1 a2 cn1(th1) sn2(th2).
struct SineGordonResidual {
  double r_plus = 0.0;
  double r_minus = 0.0;
};
SineGordonResidual sine_gordon_residual(const BacklundSolution& sol);

enum class ExisVariant { Exis1, Exis2, Exis3 };
std::string to_string(ExisVariant v);

/// Metric coefficients and the functions mu1, mu2 entering sigma and the
/// normal connection. For Exis2 mu1 = sqrt(-A1); for Exis3 also mu2 = sqrt(-A2).
struct ExisFields {
  ExisVariant variant = ExisVariant::Exis1;
  ExisConstants constants;
  Grid2D grid;
  Field2D E;
  Field2D G;
  Field2D mu1;
  Field2D mu2;
  std::vector<unsigned char> excluded;
  int sweeps = 0;
  double scheme_residual = 0.0;
};

/// E = 1/(mu2^2 + A2) = sn2(th2)^2/|A2|, G = sn1(th1)^2/|A1|.
ExisFields exis1_fields(const BacklundSolution& sol);

/// mu_v = -a2 sqrt(G) (mu^2 + A2), G_u = 2 a1 G sqrt(-A1/(mu^2 + A2)), from
/// G on u = u0 (function of v, positive) and mu on v = v0 (function of u).
/// Requires A1 < 0.
ExisFields solve_exis2(const ExisConstants& C, const std::function<double(double)>& G0,
                       const std::function<double(double)>& mu0, const Grid2D& grid,
                       const GoursatParams& params = {});

/// E_v = 2 a2 E sqrt(-A2 G), G_u = 2 a1 G sqrt(-A1 E), from positive G on
/// u = u0 and E on v = v0. Requires A1, A2 < 0.
ExisFields solve_exis3(const ExisConstants& C, const std::function<double(double)>& G0,
                       const std::function<double(double)>& E0, const Grid2D& grid,
                       const GoursatParams& params = {});

/// Variant whose metric is defined for constant mu1, mu2: mu_i^2 + A_i = 0
/// switches the corresponding factor to the auxiliary system.
ExisVariant dispatch_variant(const ExisConstants& C, double mu1, double mu2, double tol = 1e-12);

/// Diagonal metric; throws NumericalError at a non-excluded node with a
/// non-positive or non-finite coefficient.
MetricGrid assemble_metric(const ExisFields& fields);
MetricGrid assemble_metric(const BacklundSolution& sol);

/// Frame data in the bases {d_u, d_v} and {h d_u, h d_v}: f = diag(cos 2t1,
/// cos 2t2), t = -f, h = I, sigma(d_u, d_v) = 0. Nodes next to an excluded
/// node are excluded as well so difference stencils stay clean.
FrameData build_frame_data(const ExisFields& fields);

/// Totally geodesic data with f = lambda I, lambda = (c2 - c1)/(c1 + c2):
/// g = du^2 + cos^2(k u) dv^2 (cosh when the curvature is negative),
/// k^2 = |c1 c2/(c1 + c2)|. Requires c1 c2 > 0.
FrameData frame_data_totally_geodesic(double c1, double c2, const Grid2D& grid);

/// Ambient data at the base node: point, coordinate tangents and the normals
/// h d_u, h d_v.
struct InitialFrame {
  Vec psi;
  Vec psi_u;
  Vec psi_v;
  std::array<Vec, 2> normals;
};

/// Closed-form frame at node (i, j): the f-eigenvectors become
/// cos(t_k) a_k + sin(t_k) b_k with {a_k} and {b_k} orthonormal in the two
/// factors at the base points. Requires c1, c2 > 0 and h invertible.
InitialFrame initial_frame(const FrameData& fd, const ProductSpace& P, int i = 0, int j = 0);

struct ReconstructOptions {
  double drift_tol = 1e-4;
  std::optional<InitialFrame> initial;
};

struct ReconstructResult {
  ImmersionGrid immersion;
  /// max(|dE|/E, |dG|/G, |dF|/sqrt(EG)) of the induced metric per node.
  Field2D metric_rel_err;
  double metric_max_rel_err = 0.0;
  double quadric_max_defect = 0.0;
  double frame_drift_max = 0.0;
  /// Largest difference between marching u-then-v and v-then-u.
  double commutation_defect = 0.0;
};

/// Marches (psi, psi_u, psi_v, n_1, n_2) with RK4 along u on the base line,
/// then along v on every u-node, reprojecting psi after each step. Throws
/// ValidationError unless c1, c2 > 0 and fd has no excluded node, and
/// NumericalError (with the node) when the frame drifts beyond drift_tol.
ReconstructResult reconstruct_immersion(const FrameData& fd, const ProductSpace& P,
                                        const ReconstructOptions& opts = {});

}  // namespace casurf
