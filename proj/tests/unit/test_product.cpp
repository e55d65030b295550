#include "casurf/error.hpp"
#include "casurf/product.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace casurf;

namespace {

constexpr double kPi = std::numbers::pi;

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  int k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

/// Random point of P with a random tangent plane.
ProductTangentFrame random_frame(const ProductSpace& P, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Vec p(P.ambient_dim());
  for (int k = 0; k < p.size(); ++k) p[k] = U(rng);
  if (P.c1() < 0) p[0] = 2.0;
  if (P.c2() < 0) p[P.dim1()] = 2.0;
  p = P.project(p);
  Vec a(P.ambient_dim()), b(P.ambient_dim());
  for (int k = 0; k < a.size(); ++k) {
    a[k] = U(rng);
    b[k] = U(rng);
  }
  return make_frame(P, p, P.tangent_part(p, a), P.tangent_part(p, b));
}

}  // namespace

TEST_CASE("product space basics") {
  const ProductSpace P(1.0, -1.0);
  CHECK(P.ambient_dim() == 6);
  CHECK(P.signature() == Signature({1, 1, 1, -1, 1, 1}));
  CHECK(P.a() == 0.0);
  CHECK(P.b() == 0.5);
  CHECK_THROWS_AS(ProductSpace(0.0, 0.0), ValidationError);
  const ProductSpace Q(1.0, 0.0);
  CHECK(Q.ambient_dim() == 5);
  const Vec p = Q.join(vec({1, 0, 0}), vec({0.3, 0.4}));
  CHECK(Q.on_quadrics(p));
  CHECK(Q.xi_bar(p).norm() == 0.0);
}

TEST_CASE("product structure F") {
  const ProductSpace P(1.0, 1.0);
  const Vec w = vec({1, 2, 3, 4, 5, 6});
  CHECK((apply_F(P, w) - vec({1, 2, 3, -4, -5, -6})).norm() == 0.0);
  const Vec first = vec({1, 2, 3, 0, 0, 0});
  CHECK((apply_F(P, first) - first).norm() == 0.0);
  std::mt19937 rng(3);
  std::normal_distribution<double> N;
  Vec r(6);
  for (int k = 0; k < 6; ++k) r[k] = N(rng);
  CHECK((apply_F(P, apply_F(P, r)) - r).norm() == 0.0);
}

TEST_CASE("f h s t on slices and products of curves") {
  const ProductSpace P(1.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  // Tangent plane of M1 x {p2} at ((0,0,1), (1,0,0)).
  const Vec p = vec({0, 0, 1, 1, 0, 0});
  const ProductTangentFrame slice = make_frame(P, p, vec({1, 0, 0, 0, 0, 0}), vec({0, 1, 0, 0, 0, 0}));
  const FHSTensors T = extract_fhst(slice, P);
  CHECK((T.f - Mat2::Identity()).norm() < 1e-14);
  CHECK(T.h.norm() < 1e-14);
  CHECK(T.residuals().max() < 1e-14);

  const ProductTangentFrame prod = make_frame(P, p, vec({r, r, 0, 0, 0, 0}), vec({0, 0, 0, 0, 1, 0}));
  const FHSTensors Q = extract_fhst(prod, P);
  CHECK((Q.f - Mat2(Eigen::Vector2d(1, -1).asDiagonal())).norm() < 1e-14);
  const AnglePair ang = angle_functions(Q.f, Q.g);
  CHECK(ang.theta1 == doctest::Approx(kPi / 2));
  CHECK(ang.theta2 == doctest::Approx(0.0));
}

TEST_CASE("algebraic relations on random frames") {
  std::mt19937 rng(11);
  for (auto [c1, c2] : {std::pair{1.0, 1.0}, std::pair{1.0, -2.0}, std::pair{-1.0, -1.0}, std::pair{0.0, 3.0}}) {
    const ProductSpace P(c1, c2);
    for (int trial = 0; trial < 10; ++trial) {
      const FHSTensors T = extract_fhst(random_frame(P, rng), P);
      // Direct multiplication, independent of residuals().
      const Mat2 lhs = T.f * T.f + T.s * T.h;
      CHECK((lhs - Mat2::Identity()).norm() < 1e-10);
      CHECK((T.t * T.t + T.h * T.s - Mat2::Identity()).norm() < 1e-10);
      CHECK(T.residuals().max() < 1e-10);
    }
  }
}

TEST_CASE("angle functions") {
  const double th = 0.4;
  const AnglePair a = angle_functions(Eigen::Vector2d(-1.0, std::cos(2 * th)).asDiagonal().toDenseMatrix());
  CHECK(a.theta1 == doctest::Approx(kPi / 2));
  CHECK(a.theta2 == doctest::Approx(th));
  const AnglePair b = angle_functions(Mat2::Identity());
  CHECK(b.theta1 == 0.0);
  CHECK(b.theta2 == 0.0);
  CHECK(b.eig.degenerate);
  const AnglePair c = angle_functions(Mat2::Zero());
  CHECK(c.theta1 == doctest::Approx(kPi / 4));
  CHECK(c.theta2 == doctest::Approx(kPi / 4));
  CHECK_THROWS_AS(angle_functions(2.0 * Mat2::Identity()), NumericalError);

  // Self-adjoint for a non-Euclidean metric: f = g^{-1} A with A symmetric.
  Mat2 g;
  g << 2.0, 0.3, 0.3, 1.0;
  Mat2 A;
  A << 0.2, 0.1, 0.1, -0.5;
  const Eigen2 e = self_adjoint_eigen(g.inverse() * A, g);
  CHECK(e.lambda1 <= e.lambda2);
  const Mat2 gram = e.vectors.transpose() * g * e.vectors;
  CHECK((gram - Mat2::Identity()).norm() < 1e-12);
}

TEST_CASE("complex structures of the product") {
  const ProductSpace P(1.0, 1.0);
  const Vec p = vec({0, 0, 1, 1, 0, 0});
  const Vec v = vec({0.3, -0.2, 0, 0, 0, 0});
  for (Variant var : {Variant::Tilde, Variant::Bar}) {
    const Vec Jv = complex_structure_tilde_bar(P, p, v, var);
    CHECK(P.second(Jv).norm() == 0.0);
    CHECK((P.first(Jv) - complex_structure_J(P.M1(), P.first(p), P.first(v))).norm() < 1e-15);
  }
  const Vec w = vec({0.3, -0.2, 0, 0, 0.5, 0.7});
  CHECK((complex_structure_tilde_bar(P, p, complex_structure_tilde_bar(P, p, w, Variant::Tilde), Variant::Tilde) + w)
            .norm() < 1e-14);
  CHECK((complex_structure_tilde_bar(P, p, complex_structure_tilde_bar(P, p, w, Variant::Bar), Variant::Bar) + w)
            .norm() < 1e-14);
}

TEST_CASE("Kahler angle values on random planes") {
  std::mt19937 rng(5);
  const ProductSpace P(1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const ProductTangentFrame fr = random_frame(P, rng);
    const FHSTensors T = extract_fhst(fr, P);
    const AnglePair ang = angle_functions(T.f, T.g);
    if (ang.eig.degenerate) continue;
    const Eigen::Vector2d c1 = ang.eig.vectors.col(0), c2 = ang.eig.vectors.col(1);
    const Vec e1 = c1[0] * fr.psi_u + c1[1] * fr.psi_v;
    const Vec e2 = c2[0] * fr.psi_u + c2[1] * fr.psi_v;
    const double val =
        std::abs(inner(P.signature(), complex_structure_tilde_bar(P, fr.point, e1, Variant::Tilde), e2));
    const double d = std::min(std::abs(val - std::cos(ang.theta1 - ang.theta2)),
                              std::abs(val - std::abs(std::cos(ang.theta1 + ang.theta2))));
    CHECK(d < 1e-10);
  }
}

TEST_CASE("classification of f") {
  CHECK(classify_f(0.3 * Mat2::Identity(), 1e-9) == FClass::Complex);
  CHECK(classify_f(Eigen::Vector2d(0.5, -0.5).asDiagonal().toDenseMatrix(), 1e-9) == FClass::Lagrangian);
  CHECK(classify_f(Eigen::Vector2d(1.0, 0.2).asDiagonal().toDenseMatrix(), 1e-9) == FClass::Generic);
  CHECK(classify_f(Mat2::Zero(), 1e-9) == FClass::ComplexLagrangian);
  CHECK(to_string(FClass::Lagrangian) == "lagrangian");
}

TEST_CASE("orthonormal form is symmetric") {
  Mat2 g;
  g << 3.0, 0.5, 0.5, 1.0;
  Mat2 A;
  A << 0.4, -0.2, -0.2, 0.1;
  const Mat2 f = g.inverse() * A;
  const Mat2 o = orthonormal_form(f, g);
  CHECK(std::abs(o(0, 1) - o(1, 0)) < 1e-14);
  CHECK(o.trace() == doctest::Approx(f.trace()));
  CHECK(o.determinant() == doctest::Approx(f.determinant()));
}
