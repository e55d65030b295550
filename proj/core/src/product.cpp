#include "casurf/product.hpp"

#include "casurf/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace casurf {

namespace {

constexpr double kGramTol = 1e-12;
constexpr double kEigenSlack = 1e-6;
constexpr double kRoundoffSnap = 1e-14;

double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

Mat2 cholesky(const Mat2& g) {
  if (!(g(0, 0) > 0)) throw NumericalError("metric is not positive definite");
  const double l00 = std::sqrt(g(0, 0));
  const double l10 = g(1, 0) / l00;
  const double r = g(1, 1) - l10 * l10;
  if (!(r > 0)) throw NumericalError("metric is not positive definite");
  Mat2 L;
  L << l00, 0.0, l10, std::sqrt(r);
  return L;
}

Mat2 tangent_gram(const Signature& sig, const Vec& xu, const Vec& xv) {
  Mat2 g;
  g(0, 0) = inner(sig, xu, xu);
  g(0, 1) = g(1, 0) = inner(sig, xu, xv);
  g(1, 1) = inner(sig, xv, xv);
  return g;
}

void check_plane(const Mat2& g) {
  if (!(g.determinant() >= kGramTol)) {
    std::ostringstream os;
    os << "degenerate tangent plane (Gram determinant " << g.determinant() << ")";
    throw NumericalError(os.str());
  }
}

}  // namespace

ProductSpace::ProductSpace(double c1, double c2) : m1_(c1), m2_(c2) {
  if (c1 == 0.0 && c2 == 0.0) throw ValidationError("product space needs at least one non-flat factor");
  sig_ = m1_.signature().concat(m2_.signature());
}

Vec ProductSpace::join(const Vec& x, const Vec& y) const {
  if (x.size() != dim1() || y.size() != dim2()) throw ValidationError("product join: block size mismatch");
  Vec w(ambient_dim());
  w << x, y;
  return w;
}

bool ProductSpace::on_quadrics(const Vec& p, double tol) const {
  if (p.size() != ambient_dim()) return false;
  return m1_.on_quadric(first(p), tol) && m2_.on_quadric(second(p), tol);
}

double ProductSpace::quadric_defect(const Vec& p) const {
  double d = 0.0;
  if (!m1_.flat()) d = std::max(d, std::abs(m1_.quadric_defect(first(p)) * c1()));
  if (!m2_.flat()) d = std::max(d, std::abs(m2_.quadric_defect(second(p)) * c2()));
  return d;
}

Vec ProductSpace::project(const Vec& p) const {
  if (p.size() != ambient_dim()) throw ValidationError("product projection: dimension mismatch");
  return join(project_to_quadric(m1_, first(p)), project_to_quadric(m2_, second(p)));
}

Vec ProductSpace::xi_tilde(const Vec& p) const {
  Vec n = Vec::Zero(ambient_dim());
  if (!m1_.flat()) n.head(dim1()) = first(p);
  return n;
}

Vec ProductSpace::xi_bar(const Vec& p) const {
  Vec n = Vec::Zero(ambient_dim());
  if (!m2_.flat()) n.tail(dim2()) = second(p);
  return n;
}

Vec ProductSpace::tangent_part(const Vec& p, const Vec& w) const {
  return join(m1_.tangent_part(first(p), first(w)), m2_.tangent_part(second(p), second(w)));
}

Vec apply_F(const ProductSpace& P, const Vec& w) {
  if (w.size() != P.ambient_dim()) throw ValidationError("F: dimension mismatch");
  Vec out = w;
  out.tail(P.dim2()) *= -1.0;
  return out;
}

namespace {

ProductTangentFrame build_frame(const ProductSpace& P, const Vec& point, const Vec& psi_u,
                                const Vec& psi_v, const std::array<int, 2>* fixed) {
  const Signature& sig = P.signature();
  const Mat2 g = tangent_gram(sig, psi_u, psi_v);
  check_plane(g);
  const Mat2 ginv = g.inverse();

  ProductTangentFrame fr{point, psi_u, psi_v, {}, {-1, -1}};
  auto normal_part = [&](const Vec& w, int found) {
    Vec r = P.tangent_part(point, w);
    const Eigen::Vector2d c = ginv * Eigen::Vector2d(inner(sig, r, psi_u), inner(sig, r, psi_v));
    r -= c[0] * psi_u + c[1] * psi_v;
    for (int a = 0; a < found; ++a) r -= inner(sig, r, fr.xi[a]) * fr.xi[a];
    return r;
  };
  auto candidate = [&](int k, int found) {
    const Vec r = normal_part(Vec::Unit(P.ambient_dim(), k), found);
    return normal_part(r, found);  // second pass for orthogonality
  };
  for (int a = 0; a < 2; ++a) {
    Vec best;
    double best_n2 = -1.0;
    int best_k = -1;
    if (fixed) {
      best_k = (*fixed)[a];
      if (best_k < 0 || best_k >= P.ambient_dim()) throw ValidationError("frame pivot out of range");
      best = candidate(best_k, a);
      best_n2 = norm_sq(sig, best);
    } else {
      for (int k = 0; k < P.ambient_dim(); ++k) {
        Vec r = candidate(k, a);
        const double n2 = norm_sq(sig, r);
        if (n2 > best_n2) {
          best_n2 = n2;
          best = r;
          best_k = k;
        }
      }
    }
    if (!(best_n2 > 1e-12)) throw NumericalError("normal frame is degenerate");
    fr.xi[a] = best / std::sqrt(best_n2);
    fr.pivots[a] = best_k;
  }
  return fr;
}

}  // namespace

ProductTangentFrame make_frame(const ProductSpace& P, const Vec& point, const Vec& psi_u,
                               const Vec& psi_v) {
  return build_frame(P, point, psi_u, psi_v, nullptr);
}

ProductTangentFrame make_frame(const ProductSpace& P, const Vec& point, const Vec& psi_u,
                               const Vec& psi_v, const std::array<int, 2>& pivots) {
  return build_frame(P, point, psi_u, psi_v, &pivots);
}

double AlgebraicResiduals::max() const {
  return std::max({f2_sh, t2_hs, adjoint, fs_st, hf_th});
}

AlgebraicResiduals FHSTensors::residuals() const {
  const Mat2 I = Mat2::Identity();
  AlgebraicResiduals r;
  r.f2_sh = max_abs(f * f + s * h - I);
  r.t2_hs = max_abs(t * t + h * s - I);
  r.adjoint = max_abs(gn * h - s.transpose() * g);
  r.fs_st = max_abs(f * s + s * t);
  r.hf_th = max_abs(h * f + t * h);
  return r;
}

FHSTensors extract_fhst(const ProductTangentFrame& frame, const ProductSpace& P) {
  const Signature& sig = P.signature();
  FHSTensors out;
  out.g = tangent_gram(sig, frame.psi_u, frame.psi_v);
  check_plane(out.g);
  const Mat2 ginv = out.g.inverse();
  const std::array<const Vec*, 2> d{&frame.psi_u, &frame.psi_v};

  Mat2 B;  // B(k, j) = <psi_k, F psi_j>
  Mat2 C;  // C(k, b) = <psi_k, F xi_b>
  for (int j = 0; j < 2; ++j) {
    const Vec Fd = apply_F(P, *d[j]);
    const Vec Fxi = apply_F(P, frame.xi[j]);
    for (int k = 0; k < 2; ++k) {
      B(k, j) = inner(sig, *d[k], Fd);
      C(k, j) = inner(sig, *d[k], Fxi);
      out.h(k, j) = inner(sig, Fd, frame.xi[k]);
      out.t(k, j) = inner(sig, Fxi, frame.xi[k]);
      out.gn(k, j) = inner(sig, frame.xi[k], frame.xi[j]);
    }
  }
  out.f = ginv * B;
  out.s = ginv * C;
  return out;
}

Eigen2 self_adjoint_eigen(const Mat2& map, const Mat2& metric, double sym_tol) {
  const Mat2 B = metric * map;
  if (std::abs(B(0, 1) - B(1, 0)) > sym_tol * std::max(1.0, max_abs(B)))
    throw ValidationError("map is not self-adjoint for the supplied metric");
  const Mat2 L = cholesky(metric);
  const Mat2 Linv = L.inverse();
  const Mat2 A = Linv * B * Linv.transpose();

  const double m = 0.5 * (A(0, 0) + A(1, 1));
  const double q = 0.5 * (A(0, 0) - A(1, 1));
  const double off = 0.5 * (A(0, 1) + A(1, 0));
  const double r = std::hypot(q, off);

  Eigen2 e;
  e.lambda1 = m - r;
  e.lambda2 = m + r;
  Eigen::Vector2d y1;
  if (r <= 1e-10 * std::max(1.0, std::abs(m))) {
    e.degenerate = true;
    y1 << 1.0, 0.0;
  } else {
    const Eigen::Vector2d c1(off, e.lambda1 - A(0, 0));
    const Eigen::Vector2d c2(e.lambda1 - A(1, 1), off);
    y1 = c1.norm() >= c2.norm() ? c1 : c2;
    y1.normalize();
  }
  const Eigen::Vector2d y2(-y1[1], y1[0]);
  Mat2 Y;
  Y.col(0) = y1;
  Y.col(1) = y2;
  e.vectors = Linv.transpose() * Y;
  return e;
}

Mat2 orthonormal_form(const Mat2& map, const Mat2& metric) {
  const Mat2 L = cholesky(metric);
  return L.transpose() * map * L.transpose().inverse();
}

AnglePair angle_functions(const Mat2& f, const Mat2& metric) {
  AnglePair out;
  out.eig = self_adjoint_eigen(f, metric);
  auto angle = [](double lambda) {
    if (lambda < -1.0 - kEigenSlack || lambda > 1.0 + kEigenSlack) {
      std::ostringstream os;
      os << "eigenvalue " << lambda << " of f lies outside [-1, 1]";
      throw NumericalError(os.str());
    }
    if (std::abs(std::abs(lambda) - 1.0) <= kRoundoffSnap) lambda = lambda > 0 ? 1.0 : -1.0;
    return 0.5 * std::acos(std::clamp(lambda, -1.0, 1.0));
  };
  out.theta1 = angle(out.eig.lambda1);
  out.theta2 = angle(out.eig.lambda2);
  return out;
}

Vec complex_structure_tilde_bar(const ProductSpace& P, const Vec& p, const Vec& v, Variant variant) {
  if (p.size() != P.ambient_dim() || v.size() != P.ambient_dim())
    throw ValidationError("product complex structure: dimension mismatch");
  const Vec x = complex_structure_J(P.M1(), P.first(p), P.first(v));
  Vec y = complex_structure_J(P.M2(), P.second(p), P.second(v));
  if (variant == Variant::Bar) y = -y;
  return P.join(x, y);
}

std::string to_string(FClass c) {
  switch (c) {
    case FClass::Generic: return "generic";
    case FClass::Complex: return "complex";
    case FClass::Lagrangian: return "lagrangian";
    case FClass::ComplexLagrangian: return "complex+lagrangian";
  }
  return "generic";
}

FClass classify_f(const Mat2& f, double tol) {
  const double tr = f.trace();
  const bool complex = (f - 0.5 * tr * Mat2::Identity()).norm() < tol;
  const bool lagrangian = std::abs(tr) < tol;
  if (complex && lagrangian) return FClass::ComplexLagrangian;
  if (complex) return FClass::Complex;
  if (lagrangian) return FClass::Lagrangian;
  return FClass::Generic;
}

}  // namespace casurf
