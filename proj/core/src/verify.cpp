#include "casurf/verify.hpp"

#include "casurf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace casurf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

/// Returns `in` when it carries all partials, otherwise a filled copy kept in `holder`.
const ImmersionGrid& with_partials(const ImmersionGrid& in, std::optional<ImmersionGrid>& holder) {
  if (in.has_partials() && in.has_second_partials()) return in;
  holder.emplace(in);
  fill_fd_partials(*holder);
  return *holder;
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

struct NodeGeometry {
  FHSTensors fh;
  AnglePair ang;
  std::array<Mat2, 2> sigma;
  std::array<Mat2, 2> shape_adapted;
  bool adapted = false;
  double pattern = 0.0;
  double Kperp = 0.0;
  double K_gauss_eq = 0.0;
  std::optional<double> two_value;
};

NodeGeometry analyze_node(const ImmersionGrid& g, std::size_t k) {
  const ProductSpace& P = g.P;
  const Signature& sig = P.signature();
  const ProductTangentFrame fr = make_frame(P, g.psi[k], g.psi_u[k], g.psi_v[k]);
  NodeGeometry n;
  n.fh = extract_fhst(fr, P);
  n.ang = angle_functions(n.fh.f, n.fh.g);

  const std::array<const Vec*, 3> second{&g.psi_uu[k], &g.psi_uv[k], &g.psi_vv[k]};
  for (int a = 0; a < 2; ++a) {
    Mat2 s;
    s(0, 0) = inner(sig, *second[0], fr.xi[a]);
    s(0, 1) = s(1, 0) = inner(sig, *second[1], fr.xi[a]);
    s(1, 1) = inner(sig, *second[2], fr.xi[a]);
    n.sigma[a] = s;
  }
  const Mat2 ginv = n.fh.g.inverse();
  const std::array<Mat2, 2> S{ginv * n.sigma[0], ginv * n.sigma[1]};  // symmetric sigma, gn = I
  const Mat2 E = n.ang.eig.vectors;

  // Adapted normals: t xi_i = -lambda_i xi_i, so xi_1 takes the larger t-eigenvalue.
  const Eigen2 te = self_adjoint_eigen(n.fh.t, n.fh.gn);
  Mat2 Xi;
  Xi.col(0) = te.vectors.col(1);
  Xi.col(1) = te.vectors.col(0);
  const Mat2 Einv = E.inverse();
  for (int al = 0; al < 2; ++al)
    n.shape_adapted[al] = Einv * (Xi(0, al) * S[0] + Xi(1, al) * S[1]) * E;
  n.adapted = !n.ang.eig.degenerate && !te.degenerate;
  if (n.adapted) {
    const Mat2& S1 = n.shape_adapted[0];
    const Mat2& S2 = n.shape_adapted[1];
    n.pattern = std::max({std::abs(S1(0, 0)), std::abs(S1(0, 1)), std::abs(S1(1, 0)), std::abs(S2(0, 1)),
                          std::abs(S2(1, 0)), std::abs(S2(1, 1))});
  }

  // Normal curvature from the algebraic right-hand side of the Ricci equation.
  const Mat2& h = n.fh.h;
  const Mat2& gn = n.fh.gn;
  const Eigen::Vector2d e1 = E.col(0);
  const Eigen::Vector2d e2 = E.col(1);
  auto sig_vec = [&](const Eigen::Vector2d& x, const Eigen::Vector2d& y) {
    return Eigen::Vector2d(x.dot(n.sigma[0] * y), x.dot(n.sigma[1] * y));
  };
  const Eigen::Vector2d he1 = h * e1;
  const Eigen::Vector2d he2 = h * e2;
  const int a = 1;
  const Eigen::Vector2d R = P.a() * (he2.dot(gn.col(a)) * he1 - he1.dot(gn.col(a)) * he2) -
                            sig_vec(S[a] * e1, e2) + sig_vec(S[a] * e2, e1);
  n.Kperp = std::abs(R.dot(gn.col(0)));

  const Mat2 fo = orthonormal_form(n.fh.f, n.fh.g);
  const Mat2 I = Mat2::Identity();
  n.K_gauss_eq = (n.sigma[0].determinant() + n.sigma[1].determinant()) / n.fh.g.determinant() +
                 P.c1() * (0.5 * (I + fo)).determinant() + P.c2() * (0.5 * (I - fo)).determinant();

  if (P.c1() != 0.0 && P.c2() != 0.0) {
    const Vec a1 = P.tangent_part(g.psi[k], E(0, 0) * g.psi_u[k] + E(1, 0) * g.psi_v[k]);
    const Vec a2 = P.tangent_part(g.psi[k], E(0, 1) * g.psi_u[k] + E(1, 1) * g.psi_v[k]);
    const double x = std::abs(inner(sig, complex_structure_tilde_bar(P, g.psi[k], a1, Variant::Tilde), a2));
    const double t1 = n.ang.theta1;
    const double t2 = n.ang.theta2;
    n.two_value = std::min(std::abs(x - std::cos(t1 - t2)), std::abs(x - std::abs(std::cos(t1 + t2))));
  }
  return n;
}

template <class Fn>
auto at_node(int i, int j, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalError& e) {
    if (e.has_location()) throw;
    throw NumericalError(e.what(), i, j);
  }
}

/// Entrywise derivative of a matrix field along u (dir 0) or v (dir 1).
std::vector<Mat2> diff_mat(const std::vector<Mat2>& m, const Grid2D& g, int dir) {
  std::vector<Mat2> out(m.size(), Mat2::Zero());
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      Field2D f(g);
      for (std::size_t k = 0; k < m.size(); ++k) f.data()[k] = m[k](r, c);
      const Field2D d = dir == 0 ? diff_u(f) : diff_v(f);
      for (std::size_t k = 0; k < m.size(); ++k) out[k](r, c) = d.data()[k];
    }
  }
  return out;
}

}  // namespace

MetricGrid first_fundamental_form(const ImmersionGrid& in) {
  std::optional<ImmersionGrid> holder;
  const ImmersionGrid& g = with_partials(in, holder);
  const Signature& sig = g.P.signature();
  MetricGrid m{Field2D(g.grid), Field2D(g.grid), Field2D(g.grid), g.excluded};
  for (std::size_t k = 0; k < g.grid.size(); ++k) {
    m.E.data()[k] = inner(sig, g.psi_u[k], g.psi_u[k]);
    m.F.data()[k] = inner(sig, g.psi_u[k], g.psi_v[k]);
    m.G.data()[k] = inner(sig, g.psi_v[k], g.psi_v[k]);
  }
  return m;
}

Field2D gauss_curvature(const MetricGrid& m) {
  const Grid2D& g = m.grid();
  if (g.nu < 5 || g.nv < 5) throw ValidationError("curvature needs a grid of at least 5x5 nodes");
  double fmax = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    fmax = std::max(fmax, std::abs(m.F.data()[k]));
    scale = std::max({scale, std::abs(m.E.data()[k]), std::abs(m.G.data()[k])});
  }
  const bool orthogonal = fmax <= 1e-14 * std::max(scale, 1.0);

  const Field2D Eu = diff_u(m.E), Ev = diff_v(m.E), Evv = diff_vv(m.E);
  const Field2D Gu = diff_u(m.G), Gv = diff_v(m.G), Guu = diff_uu(m.G);
  Field2D Fu, Fv, Fuv;
  if (!orthogonal) {
    Fu = diff_u(m.F);
    Fv = diff_v(m.F);
    Fuv = diff_uv(m.F);
  }
  Field2D K(g, kNaN);
  for (int i = 0; i < g.nu; ++i) {
    for (int j = 0; j < g.nv; ++j) {
      if (m.is_excluded(i, j)) continue;
      const double E = m.E(i, j), G = m.G(i, j);
      if (orthogonal) {
        const double W = std::sqrt(E * G);
        const double Wu = (Eu(i, j) * G + E * Gu(i, j)) / (2.0 * W);
        const double Wv = (Ev(i, j) * G + E * Gv(i, j)) / (2.0 * W);
        const double du = Guu(i, j) / W - Gu(i, j) * Wu / (W * W);
        const double dv = Evv(i, j) / W - Ev(i, j) * Wv / (W * W);
        K(i, j) = -(du + dv) / (2.0 * W);
        continue;
      }
      const double F = m.F(i, j);
      Eigen::Matrix3d M1, M2;
      M1 << -0.5 * Evv(i, j) + Fuv(i, j) - 0.5 * Guu(i, j), 0.5 * Eu(i, j), Fu(i, j) - 0.5 * Ev(i, j),
          Fv(i, j) - 0.5 * Gu(i, j), E, F, 0.5 * Gv(i, j), F, G;
      M2 << 0.0, 0.5 * Ev(i, j), 0.5 * Gu(i, j), 0.5 * Ev(i, j), E, F, 0.5 * Gu(i, j), F, G;
      const double det = E * G - F * F;
      K(i, j) = (M1.determinant() - M2.determinant()) / (det * det);
    }
  }
  return K;
}

bool stencil_usable(const Grid2D& g, const std::vector<unsigned char>& excluded, int i, int j) {
  if (!g.interior(i, j)) return false;
  if (excluded.empty()) return true;
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj)
      if (excluded[g.index(i + di, j + dj)]) return false;
  return true;
}

double max_interior_error(const Field2D& field, double target, const std::vector<unsigned char>& excluded) {
  const Grid2D& g = field.grid();
  double m = 0.0;
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j)
      if (stencil_usable(g, excluded, i, j)) m = std::max(m, std::abs(field(i, j) - target));
  return m;
}

SecondFormReport second_fundamental_form(const ImmersionGrid& in) {
  std::optional<ImmersionGrid> holder;
  const ImmersionGrid& g = with_partials(in, holder);
  SecondFormReport r;
  r.grid = g.grid;
  r.sigma.resize(g.grid.size());
  r.shape.resize(g.grid.size());
  r.Kperp = Field2D(g.grid, kNaN);
  r.K_gauss_equation = Field2D(g.grid, kNaN);
  for (int i = 0; i < g.grid.nu; ++i) {
    for (int j = 0; j < g.grid.nv; ++j) {
      if (g.is_excluded(i, j)) continue;
      const std::size_t k = g.grid.index(i, j);
      const NodeGeometry n = at_node(i, j, [&] { return analyze_node(g, k); });
      r.sigma[k] = n.sigma;
      r.shape[k] = n.shape_adapted;
      r.Kperp(i, j) = n.Kperp;
      r.K_gauss_equation(i, j) = n.K_gauss_eq;
      r.sigma_max = std::max({r.sigma_max, max_abs(n.sigma[0]), max_abs(n.sigma[1])});
      r.shape_pattern_max = std::max(r.shape_pattern_max, n.pattern);
      r.Kperp_max = std::max(r.Kperp_max, n.Kperp);
    }
  }
  return r;
}

AngleReport angle_constancy(const ImmersionGrid& in, const AngleOptions& opts) {
  std::optional<ImmersionGrid> holder;
  const ImmersionGrid& g = with_partials(in, holder);
  const Grid2D& G = g.grid;
  AngleReport r;
  r.family = g.family.name;
  r.grid = G;
  r.theta1 = Field2D(G, kNaN);
  r.theta2 = Field2D(G, kNaN);
  r.Kperp = Field2D(G, kNaN);
  r.theta1_expected = g.family.theta1;
  r.theta2_expected = g.family.theta2;
  r.K_predicted = g.family.K;
  r.Kperp_predicted = g.family.Kperp;
  r.classification.assign(G.size(), FClass::Generic);
  r.excluded = g.excluded_count();

  Field2D Kgeq(G, kNaN);
  std::vector<double> t1s, t2s;
  std::map<FClass, std::size_t> counts;
  for (int i = 0; i < G.nu; ++i) {
    for (int j = 0; j < G.nv; ++j) {
      if (g.is_excluded(i, j)) continue;
      const std::size_t k = G.index(i, j);
      const NodeGeometry n = at_node(i, j, [&] { return analyze_node(g, k); });
      r.theta1(i, j) = n.ang.theta1;
      r.theta2(i, j) = n.ang.theta2;
      t1s.push_back(n.ang.theta1);
      t2s.push_back(n.ang.theta2);
      r.Kperp(i, j) = n.Kperp;
      Kgeq(i, j) = n.K_gauss_eq;
      r.sigma_max = std::max({r.sigma_max, max_abs(n.sigma[0]), max_abs(n.sigma[1])});
      r.shape_pattern_max = std::max(r.shape_pattern_max, n.pattern);
      r.algebraic_max = std::max(r.algebraic_max, n.fh.residuals().max());
      if (n.two_value) r.two_value_max_dev = std::max(r.two_value_max_dev.value_or(0.0), *n.two_value);
      const FClass c = classify_f(orthonormal_form(n.fh.f, n.fh.g), opts.class_tol);
      r.classification[k] = c;
      ++counts[c];
      if (r.Kperp_predicted)
        r.Kperp_max_err = std::max(r.Kperp_max_err, std::abs(n.Kperp - *r.Kperp_predicted));
    }
  }
  r.theta1_median = median(t1s);
  r.theta2_median = median(t2s);
  for (double t : t1s) r.max_dev1 = std::max(r.max_dev1, std::abs(t - r.theta1_median));
  for (double t : t2s) r.max_dev2 = std::max(r.max_dev2, std::abs(t - r.theta2_median));
  std::size_t best = 0;
  for (const auto& [c, n] : counts)
    if (n > best) {
      best = n;
      r.dominant_class = c;
    }

  r.K = gauss_curvature(first_fundamental_form(g));
  if (r.K_predicted) r.K_max_err = max_interior_error(r.K, *r.K_predicted, g.excluded);
  for (int i = 0; i < G.nu; ++i)
    for (int j = 0; j < G.nv; ++j)
      if (stencil_usable(G, g.excluded, i, j))
        r.K_gauss_eq_max_err = std::max(r.K_gauss_eq_max_err, std::abs(r.K(i, j) - Kgeq(i, j)));
  return r;
}

FrameData frame_data_from_immersion(const ImmersionGrid& in) {
  std::optional<ImmersionGrid> holder;
  const ImmersionGrid& g = with_partials(in, holder);
  const Grid2D& G = g.grid;
  const ProductSpace& P = g.P;
  const Signature& sig = P.signature();
  FrameData fd(G, P.c1(), P.c2());
  if (!g.excluded.empty()) fd.excluded = g.excluded;

  // Pivots chosen at the central node keep the normal frame smooth.
  const std::size_t centre = G.index(G.nu / 2, G.nv / 2);
  const std::array<int, 2> pivots = at_node(G.nu / 2, G.nv / 2, [&] {
    return make_frame(P, g.psi[centre], g.psi_u[centre], g.psi_v[centre]).pivots;
  });
  const int dim = P.ambient_dim();
  std::array<std::vector<Vec>, 2> xi{std::vector<Vec>(G.size(), Vec::Zero(dim)),
                                     std::vector<Vec>(G.size(), Vec::Zero(dim))};
  for (std::size_t k = 0; k < G.size(); ++k) {
    if (fd.excluded[k]) continue;
    ProductTangentFrame fr;
    try {
      fr = make_frame(P, g.psi[k], g.psi_u[k], g.psi_v[k], pivots);
    } catch (const NumericalError&) {
      fd.excluded[k] = 1;
      continue;
    }
    const FHSTensors fh = extract_fhst(fr, P);
    fd.g[k] = fh.g;
    fd.gn[k] = fh.gn;
    fd.f[k] = fh.f;
    fd.h[k] = fh.h;
    fd.s[k] = fh.s;
    fd.t[k] = fh.t;
    xi[0][k] = fr.xi[0];
    xi[1][k] = fr.xi[1];
    const std::array<const Vec*, 4> second{&g.psi_uu[k], &g.psi_uv[k], &g.psi_uv[k], &g.psi_vv[k]};
    const std::array<const Vec*, 2> first{&g.psi_u[k], &g.psi_v[k]};
    const Mat2 ginv = fh.g.inverse();
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const Vec& d2 = *second[2 * i + j];
        for (int a = 0; a < 2; ++a) fd.sigma[a][k](i, j) = inner(sig, d2, fr.xi[a]);
        const Eigen::Vector2d proj(inner(sig, d2, *first[0]), inner(sig, d2, *first[1]));
        const Eigen::Vector2d gam = ginv * proj;
        for (int m = 0; m < 2; ++m) fd.gamma[m][k](i, j) = gam[m];
      }
    }
  }

  // omega_i(b, a) = <d_i xi_a, xi_b>
  for (int a = 0; a < 2; ++a) {
    std::vector<Field2D> comp(static_cast<std::size_t>(dim), Field2D(G));
    for (int c = 0; c < dim; ++c)
      for (std::size_t k = 0; k < G.size(); ++k) comp[c].data()[k] = xi[a][k][c];
    for (int dir = 0; dir < 2; ++dir) {
      std::vector<Field2D> d;
      for (const Field2D& f : comp) d.push_back(dir == 0 ? diff_u(f) : diff_v(f));
      for (std::size_t k = 0; k < G.size(); ++k) {
        if (fd.excluded[k]) continue;
        Vec dx(dim);
        for (int c = 0; c < dim; ++c) dx[c] = d[c].data()[k];
        for (int b = 0; b < 2; ++b) fd.omega[dir][k](b, a) = inner(sig, dx, xi[b][k]);
      }
    }
  }
  return fd;
}

double CompatReport::max() const {
  return std::max({gauss, codazzi, ricci, par_f, par_h, par_s, par_t, algebraic.max()});
}

CompatReport compatibility_residuals(const FrameData& fd, const ExisConstants& C) {
  if (fd.c1 != C.c1 || fd.c2 != C.c2)
    throw ValidationError("frame data and constants disagree on the curvatures c1, c2");
  return compatibility_residuals(fd);
}

CompatReport compatibility_residuals(const FrameData& fd) {
  const Grid2D& G = fd.grid;
  if (G.nu < 5 || G.nv < 5) throw ValidationError("compatibility residuals need at least 5x5 nodes");
  const std::size_t n = G.size();
  if (fd.g.size() != n || fd.f.size() != n) throw ValidationError("frame data fields do not match the grid");
  const double a = (fd.c1 + fd.c2) / 4.0;
  const double b = (fd.c1 - fd.c2) / 4.0;
  const Mat2 I = Mat2::Identity();

  std::vector<Mat2> gam0(n), gam1(n);
  for (std::size_t k = 0; k < n; ++k) {
    gam0[k] = fd.gamma_matrix(k, 0);
    gam1[k] = fd.gamma_matrix(k, 1);
  }
  const std::array<std::vector<Mat2>, 2> dgam{diff_mat(gam1, G, 0), diff_mat(gam0, G, 1)};
  const std::array<std::vector<Mat2>, 2> df{diff_mat(fd.f, G, 0), diff_mat(fd.f, G, 1)};
  const std::array<std::vector<Mat2>, 2> dh{diff_mat(fd.h, G, 0), diff_mat(fd.h, G, 1)};
  const std::array<std::vector<Mat2>, 2> ds{diff_mat(fd.s, G, 0), diff_mat(fd.s, G, 1)};
  const std::array<std::vector<Mat2>, 2> dt{diff_mat(fd.t, G, 0), diff_mat(fd.t, G, 1)};
  const std::array<std::vector<Mat2>, 2> dsig0{diff_mat(fd.sigma[0], G, 0), diff_mat(fd.sigma[0], G, 1)};
  const std::array<std::vector<Mat2>, 2> dsig1{diff_mat(fd.sigma[1], G, 0), diff_mat(fd.sigma[1], G, 1)};
  const std::vector<Mat2> dom1_u = diff_mat(fd.omega[1], G, 0);
  const std::vector<Mat2> dom0_v = diff_mat(fd.omega[0], G, 1);

  CompatReport r;
  for (int i0 = 0; i0 < G.nu; ++i0) {
    for (int j0 = 0; j0 < G.nv; ++j0) {
      const std::size_t k = G.index(i0, j0);
      if (!fd.excluded[k]) {
        FHSTensors alg;
        alg.f = fd.f[k];
        alg.h = fd.h[k];
        alg.s = fd.s[k];
        alg.t = fd.t[k];
        alg.g = fd.g[k];
        alg.gn = fd.gn[k];
        const AlgebraicResiduals ar = alg.residuals();
        r.algebraic.f2_sh = std::max(r.algebraic.f2_sh, ar.f2_sh);
        r.algebraic.t2_hs = std::max(r.algebraic.t2_hs, ar.t2_hs);
        r.algebraic.adjoint = std::max(r.algebraic.adjoint, ar.adjoint);
        r.algebraic.fs_st = std::max(r.algebraic.fs_st, ar.fs_st);
        r.algebraic.hf_th = std::max(r.algebraic.hf_th, ar.hf_th);
      }
      if (!stencil_usable(G, fd.excluded, i0, j0)) continue;
      ++r.nodes;

      const Mat2& g = fd.g[k];
      const Mat2& gn = fd.gn[k];
      const Mat2& f = fd.f[k];
      const Mat2& h = fd.h[k];
      const Mat2& s = fd.s[k];
      const Mat2& t = fd.t[k];
      const std::array<Mat2, 2> Gm{gam0[k], gam1[k]};
      const std::array<Mat2, 2> Om{fd.omega[0][k], fd.omega[1][k]};
      const std::array<Mat2, 2> S{fd.shape(k, 0), fd.shape(k, 1)};
      const double detg = g.determinant();
      auto sv = [&](int i, int j) { return fd.sigma_vec(k, i, j); };
      auto sig_xy = [&](const Eigen::Vector2d& x, const Eigen::Vector2d& y) {
        return Eigen::Vector2d(x.dot(fd.sigma[0][k] * y), x.dot(fd.sigma[1][k] * y));
      };

      // Gauss: intrinsic curvature from the Christoffel symbols vs the extrinsic expression.
      const Mat2 R = dgam[0][k] - dgam[1][k] + Gm[0] * Gm[1] - Gm[1] * Gm[0];
      const double K_int = (g * R)(0, 1) / detg;
      double sum_det = 0.0;
      for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
          const Mat2& A = fd.sigma[p][k];
          const Mat2& B = fd.sigma[q][k];
          const double Q = 0.5 * (A(0, 0) * B(1, 1) + B(0, 0) * A(1, 1)) - A(0, 1) * B(0, 1);
          sum_det += gn(p, q) * Q;
        }
      }
      const double K_ext = sum_det / detg + fd.c1 * (0.5 * (I + f)).determinant() +
                           fd.c2 * (0.5 * (I - f)).determinant();
      r.gauss = std::max(r.gauss, std::abs(K_int - K_ext));

      // Codazzi with X = d_u, Y = d_v.
      auto nabla_sigma = [&](int i, int j, int l) {
        const std::array<const std::array<std::vector<Mat2>, 2>*, 2> dsg{&dsig0, &dsig1};
        Eigen::Vector2d out;
        for (int c = 0; c < 2; ++c) out[c] = (*dsg[c])[i][k](j, l);
        out += Om[i] * sv(j, l);
        for (int m = 0; m < 2; ++m) out -= Gm[i](m, j) * sv(m, l) + Gm[i](m, l) * sv(j, m);
        return out;
      };
      const Mat2 gf = g * f;
      for (int l = 0; l < 2; ++l) {
        const Eigen::Vector2d lhs = nabla_sigma(0, 1, l) - nabla_sigma(1, 0, l);
        const Eigen::Vector2d rhs = a * (gf(l, 1) * h.col(0) - gf(l, 0) * h.col(1)) +
                                    b * (g(1, l) * h.col(0) - g(0, l) * h.col(1));
        r.codazzi = std::max(r.codazzi, (lhs - rhs).cwiseAbs().maxCoeff());
      }

      // Ricci with X = d_u, Y = d_v.
      const Mat2 Rn = dom1_u[k] - dom0_v[k] + Om[0] * Om[1] - Om[1] * Om[0];
      const Mat2 hg = h.transpose() * gn;  // hg(j, a) = g~(h d_j, xi_a)
      const Eigen::Vector2d e0(1, 0), e1(0, 1);
      for (int al = 0; al < 2; ++al) {
        const Eigen::Vector2d rhs = a * (hg(1, al) * h.col(0) - hg(0, al) * h.col(1)) -
                                    sig_xy(S[al] * e0, e1) + sig_xy(S[al] * e1, e0);
        r.ricci = std::max(r.ricci, (Rn.col(al) - rhs).cwiseAbs().maxCoeff());
      }

      // Parallelism of f, h, s, t along d_i.
      for (int i = 0; i < 2; ++i) {
        Mat2 rf = df[i][k] + Gm[i] * f - f * Gm[i];
        Mat2 rh = dh[i][k] + Om[i] * h - h * Gm[i];
        Mat2 rs = ds[i][k] + Gm[i] * s - s * Om[i];
        Mat2 rt = dt[i][k] + Om[i] * t - t * Om[i];
        for (int j = 0; j < 2; ++j) {
          rf.col(j) -= h(0, j) * S[0].col(i) + h(1, j) * S[1].col(i) + s * sv(i, j);
          rh.col(j) -= t * sv(i, j) - (f(0, j) * sv(i, 0) + f(1, j) * sv(i, 1));
          rs.col(j) -= -f * S[j].col(i) + t(0, j) * S[0].col(i) + t(1, j) * S[1].col(i);
          rt.col(j) -= -(s(0, j) * sv(0, i) + s(1, j) * sv(1, i)) - h * S[j].col(i);
        }
        r.par_f = std::max(r.par_f, max_abs(rf));
        r.par_h = std::max(r.par_h, max_abs(rh));
        r.par_s = std::max(r.par_s, max_abs(rs));
        r.par_t = std::max(r.par_t, max_abs(rt));
      }
    }
  }
  return r;
}

}  // namespace casurf
