#pragma once

// Flat ambient spaces E^n / R^n_1 and the 2-dimensional space-form models
// living in them (sphere, upper hyperboloid sheet, plane).

#include <Eigen/Dense>

#include <initializer_list>
#include <string>
#include <vector>

namespace casurf {

using Vec = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

/// Diagonal metric coefficients (+1 / -1) of a flat ambient space.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<int> signs);
  Signature(std::initializer_list<int> signs);

  static Signature euclidean(int dim);
  /// (-,+,+) : the Minkowski space R^3_1 housing the hyperboloid model.
  static Signature lorentzian3();

  int dim() const { return static_cast<int>(signs_.size()); }
  int operator[](int k) const { return signs_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& signs() const { return signs_; }

  bool is_euclidean() const;
  /// Concatenation (used for product ambients).
  Signature concat(const Signature& other) const;

  bool operator==(const Signature& o) const = default;

  std::string to_string() const;

 private:
  std::vector<int> signs_;
};

/// sum_i sign_i * u_i * v_i. Throws ValidationError on dimension mismatch.
double inner(const Signature& sig, const Vec& u, const Vec& v);

/// inner(u,u).
double norm_sq(const Signature& sig, const Vec& u);

/// Euclidean (x) or Lorentzian cross product in dimension 3: the unique w with
/// inner(w, x) = det(u, v, x) for every x.
Vec cross(const Signature& sig, const Vec& u, const Vec& v);

enum class Model { Sphere, Hyperboloid, Plane };

/// A 2-dimensional space form M^2(c) in its standard flat model.
///   c > 0 : sphere  p1^2+p2^2+p3^2 = 1/c in E^3
///   c < 0 : upper sheet of -p1^2+p2^2+p3^2 = 1/c in R^3_1 (p1 > 0)
///   c = 0 : the plane E^2
class SpaceForm {
 public:
  explicit SpaceForm(double c);

  double c() const { return c_; }
  Model model() const { return model_; }
  int ambient_dim() const { return model_ == Model::Plane ? 2 : 3; }
  const Signature& signature() const { return sig_; }
  bool flat() const { return model_ == Model::Plane; }

  /// inner(p,p) - 1/c (zero on the quadric). Always 0 for the plane.
  double quadric_defect(const Vec& p) const;
  /// Relative on-quadric test with tolerance `tol` (default 1e-8).
  bool on_quadric(const Vec& p, double tol = 1e-8) const;
  /// Removes the component of v along the position vector p.
  Vec tangent_part(const Vec& p, const Vec& v) const;

  /// Model point used as a default base point: e1/sqrt|c| or the origin.
  Vec base_point() const;

 private:
  double c_;
  Model model_;
  Signature sig_;
};

/// The complex structure J of M^2(c):
///   sphere       v -> sqrt(c)  (p x v)
///   hyperboloid  v -> sqrt(-c) (p [x]_1 v)
///   plane        (x, y) -> (-y, x)
/// Validates that p is on the quadric and v is tangent (tolerance 1e-8).
Vec complex_structure_J(const SpaceForm& M, const Vec& p, const Vec& v);

/// Same formula without precondition checks; used inside integrators where
/// stage points are slightly off the quadric.
Vec complex_structure_J_unchecked(const SpaceForm& M, const Vec& p, const Vec& v);

/// Rescales p along itself onto the quadric. The hyperboloid sheet p1 > 0 is
/// preserved; points on the wrong side of the light cone are rejected.
Vec project_to_quadric(const SpaceForm& M, const Vec& p);

}  // namespace casurf
