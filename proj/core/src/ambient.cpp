#include "casurf/ambient.hpp"

#include "casurf/error.hpp"

#include <cmath>
#include <sstream>

namespace casurf {

namespace {

constexpr double kQuadricTol = 1e-8;

void require_same_dim(const Signature& sig, const Vec& u, const Vec& v) {
  if (u.size() != sig.dim() || v.size() != sig.dim()) {
    std::ostringstream os;
    os << "ambient dimension mismatch: signature " << sig.dim() << ", vectors "
       << u.size() << " and " << v.size();
    throw ValidationError(os.str());
  }
}

}  // namespace

Signature::Signature(std::vector<int> signs) : signs_(std::move(signs)) {
  for (int s : signs_) {
    if (s != 1 && s != -1) throw ValidationError("signature entries must be +1 or -1");
  }
}

Signature::Signature(std::initializer_list<int> signs)
    : Signature(std::vector<int>(signs)) {}

Signature Signature::euclidean(int dim) { return Signature(std::vector<int>(dim, 1)); }

Signature Signature::lorentzian3() { return Signature{-1, 1, 1}; }

bool Signature::is_euclidean() const {
  for (int s : signs_)
    if (s != 1) return false;
  return true;
}

Signature Signature::concat(const Signature& other) const {
  std::vector<int> all = signs_;
  all.insert(all.end(), other.signs_.begin(), other.signs_.end());
  return Signature(std::move(all));
}

std::string Signature::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < signs_.size(); ++k) {
    if (k) os << ',';
    os << signs_[k];
  }
  return os.str();
}

double inner(const Signature& sig, const Vec& u, const Vec& v) {
  require_same_dim(sig, u, v);
  double acc = 0.0;
  for (int k = 0; k < sig.dim(); ++k) acc += sig[k] * u[k] * v[k];
  return acc;
}

double norm_sq(const Signature& sig, const Vec& u) { return inner(sig, u, u); }

Vec cross(const Signature& sig, const Vec& u, const Vec& v) {
  if (sig.dim() != 3) throw ValidationError("cross product requires a 3-dimensional ambient");
  require_same_dim(sig, u, v);
  const Vec3 a = u.head<3>();
  const Vec3 b = v.head<3>();
  const Vec3 e = a.cross(b);
  // inner(w, x) = sum sign_i w_i x_i must equal e . x, hence w_i = sign_i e_i.
  Vec w(3);
  for (int k = 0; k < 3; ++k) w[k] = sig[k] * e[k];
  return w;
}

SpaceForm::SpaceForm(double c) : c_(c) {
  if (!std::isfinite(c)) throw ValidationError("space form curvature must be finite");
  if (c > 0) {
    model_ = Model::Sphere;
    sig_ = Signature::euclidean(3);
  } else if (c < 0) {
    model_ = Model::Hyperboloid;
    sig_ = Signature::lorentzian3();
  } else {
    model_ = Model::Plane;
    sig_ = Signature::euclidean(2);
  }
}

double SpaceForm::quadric_defect(const Vec& p) const {
  if (flat()) return 0.0;
  return norm_sq(sig_, p) - 1.0 / c_;
}

bool SpaceForm::on_quadric(const Vec& p, double tol) const {
  if (p.size() != ambient_dim()) return false;
  if (flat()) return true;
  if (model_ == Model::Hyperboloid && p[0] <= 0) return false;
  return std::abs(quadric_defect(p)) <= tol * std::abs(1.0 / c_);
}

Vec SpaceForm::tangent_part(const Vec& p, const Vec& v) const {
  if (flat()) return v;
  return v - (inner(sig_, p, v) / inner(sig_, p, p)) * p;
}

Vec SpaceForm::base_point() const {
  Vec p = Vec::Zero(ambient_dim());
  if (!flat()) p[0] = 1.0 / std::sqrt(std::abs(c_));
  return p;
}

Vec complex_structure_J_unchecked(const SpaceForm& M, const Vec& p, const Vec& v) {
  switch (M.model()) {
    case Model::Sphere:
      return std::sqrt(M.c()) * cross(M.signature(), p, v);
    case Model::Hyperboloid:
      return std::sqrt(-M.c()) * cross(M.signature(), p, v);
    case Model::Plane: {
      Vec w(2);
      w << -v[1], v[0];
      return w;
    }
  }
  return v;  // unreachable
}

Vec complex_structure_J(const SpaceForm& M, const Vec& p, const Vec& v) {
  if (p.size() != M.ambient_dim() || v.size() != M.ambient_dim())
    throw ValidationError("complex structure: dimension mismatch");
  if (!M.flat()) {
    if (!M.on_quadric(p, kQuadricTol))
      throw ValidationError("complex structure: base point is off the quadric");
    const double scale = p.norm() * v.norm();
    if (std::abs(inner(M.signature(), p, v)) > kQuadricTol * std::max(scale, 1.0))
      throw ValidationError("complex structure: vector is not tangent at the base point");
  }
  return complex_structure_J_unchecked(M, p, v);
}

Vec project_to_quadric(const SpaceForm& M, const Vec& p) {
  if (p.size() != M.ambient_dim()) throw ValidationError("projection: dimension mismatch");
  if (M.flat()) return p;
  const double q = norm_sq(M.signature(), p);
  const double target = 1.0 / M.c();
  if (q == 0.0 || !std::isfinite(q))
    throw ValidationError("projection: null or zero vector cannot be rescaled onto the quadric");
  if ((q > 0) != (target > 0))
    throw ValidationError("projection: point lies on the wrong side of the light cone");
  Vec out = std::sqrt(target / q) * p;
  if (M.model() == Model::Hyperboloid && out[0] <= 0)
    throw ValidationError("projection: point is on the lower hyperboloid sheet");
  return out;
}

}  // namespace casurf
