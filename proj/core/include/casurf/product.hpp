#pragma once

// M^2(c1) x M^2(c2) inside its flat ambient, the product structure F and the
// tensors f, h, s, t it induces on an immersed surface.

#include "casurf/ambient.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>

namespace casurf {

using Mat2 = Eigen::Matrix2d;

class ProductSpace {
 public:
  /// Throws ValidationError when both factors are flat.
  ProductSpace(double c1, double c2);

  const SpaceForm& M1() const { return m1_; }
  const SpaceForm& M2() const { return m2_; }
  double c1() const { return m1_.c(); }
  double c2() const { return m2_.c(); }
  double a() const { return (c1() + c2()) / 4.0; }
  double b() const { return (c1() - c2()) / 4.0; }
  int dim1() const { return m1_.ambient_dim(); }
  int dim2() const { return m2_.ambient_dim(); }
  int ambient_dim() const { return dim1() + dim2(); }
  const Signature& signature() const { return sig_; }

  Vec first(const Vec& w) const { return w.head(dim1()); }
  Vec second(const Vec& w) const { return w.tail(dim2()); }
  Vec join(const Vec& x, const Vec& y) const;

  /// Both blocks on their quadrics (relative tolerance).
  bool on_quadrics(const Vec& p, double tol = 1e-8) const;
  /// Largest relative quadric defect of the two blocks.
  double quadric_defect(const Vec& p) const;
  Vec project(const Vec& p) const;
  /// Quadric normals (p1, 0) and (0, p2); zero vector for a flat factor.
  Vec xi_tilde(const Vec& p) const;
  Vec xi_bar(const Vec& p) const;
  /// Component of w tangent to the product at p.
  Vec tangent_part(const Vec& p, const Vec& w) const;

 private:
  SpaceForm m1_;
  SpaceForm m2_;
  Signature sig_;
};

/// F(x, y) = (x, -y).
Vec apply_F(const ProductSpace& P, const Vec& w);

/// Surface point, coordinate tangents and an orthonormal pair of normals
/// tangent to the product.
struct ProductTangentFrame {
  Vec point;
  Vec psi_u;
  Vec psi_v;
  std::array<Vec, 2> xi;
  /// Ambient coordinate directions the normals were built from.
  std::array<int, 2> pivots{-1, -1};
};

/// Completes (point, psi_u, psi_v) with normals obtained by Gram-Schmidt on the
/// ambient coordinate directions projected to the normal space (largest
/// remaining component first). Throws NumericalError on a degenerate plane.
ProductTangentFrame make_frame(const ProductSpace& P, const Vec& point, const Vec& psi_u,
                               const Vec& psi_v);
/// Same, building the normals from fixed ambient directions so that frames
/// at neighbouring nodes vary smoothly.
ProductTangentFrame make_frame(const ProductSpace& P, const Vec& point, const Vec& psi_u,
                               const Vec& psi_v, const std::array<int, 2>& pivots);

/// Residual norms (max abs entry) of the algebraic relations between f, h, s, t.
struct AlgebraicResiduals {
  double f2_sh = 0.0;   ///< f^2 + s h - I
  double t2_hs = 0.0;   ///< t^2 + h s - I
  double adjoint = 0.0; ///< gn h - s^T g, i.e. g~(hX, xi) = g(X, s xi)
  double fs_st = 0.0;   ///< f s + s t
  double hf_th = 0.0;   ///< h f + t h
  double max() const;
};

/// Matrices of f, h, s, t in the bases {psi_u, psi_v} and {xi_1, xi_2}:
/// column j of f holds the coordinates of f(d_j); h(a, j) the xi_a-coordinate
/// of h(d_j); s(i, b), t(a, b) likewise for xi_b.
struct FHSTensors {
  Mat2 f = Mat2::Zero();
  Mat2 h = Mat2::Zero();
  Mat2 s = Mat2::Zero();
  Mat2 t = Mat2::Zero();
  Mat2 g = Mat2::Identity();   ///< tangent metric
  Mat2 gn = Mat2::Identity();  ///< normal metric

  AlgebraicResiduals residuals() const;
};

FHSTensors extract_fhst(const ProductTangentFrame& frame, const ProductSpace& P);

/// Eigen-decomposition of a 2x2 map that is self-adjoint for `metric`.
/// Eigenvalues ascending; columns of `vectors` metric-orthonormal. Equal
/// eigenvalues return the metric-orthonormalized coordinate basis.
struct Eigen2 {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Mat2 vectors = Mat2::Identity();
  bool degenerate = false;
};
Eigen2 self_adjoint_eigen(const Mat2& map, const Mat2& metric, double sym_tol = 1e-8);

struct AnglePair {
  double theta1 = 0.0;  ///< from the smaller eigenvalue, so theta1 >= theta2
  double theta2 = 0.0;
  Eigen2 eig;
};

/// theta_i = arccos(lambda_i) / 2. Eigenvalues beyond [-1, 1] by more than
/// 1e-6 throw NumericalError; smaller excursions are clamped, and eigenvalues
/// within 1e-14 of +-1 are snapped so that 0 and pi/2 come out exactly.
AnglePair angle_functions(const Mat2& f, const Mat2& metric = Mat2::Identity());

enum class Variant { Tilde, Bar };

/// J~ v = (J1 v1, J2 v2), J- v = (J1 v1, -J2 v2). A flat factor uses the
/// planar rotation.
Vec complex_structure_tilde_bar(const ProductSpace& P, const Vec& p, const Vec& v, Variant variant);

enum class FClass { Generic, Complex, Lagrangian, ComplexLagrangian };
std::string to_string(FClass c);

/// Complex / Lagrangian classification of f given in an orthonormal basis.
FClass classify_f(const Mat2& f, double tol);

/// Matrix of f in an orthonormal basis (symmetric), given its matrix in a
/// basis with metric g.
Mat2 orthonormal_form(const Mat2& map, const Mat2& metric);

}  // namespace casurf
