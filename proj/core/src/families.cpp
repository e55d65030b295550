#include "casurf/families.hpp"

#include "casurf/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace casurf {

namespace {

constexpr double kSpeedTol = 1e-6;
constexpr double kPi = std::numbers::pi;

/// Value and partials of a parameterized block at one node.
struct BlockJet {
  Vec p, w, t, ww, wt, tt;
};

/// Phi(w, t) = C(k w) beta(t) + S(k w) lambda (beta x beta')(t) with C, S the
/// circular (c > 0) or hyperbolic (c < 0) pair and x the matching cross product.
BlockJet swept(const SpaceForm& M, const CurveSample& beta, double k, double lambda, double w,
               double t) {
  const CurveJet j = evaluate(beta, t);
  const Signature& sig = M.signature();
  const bool sphere = M.c() > 0;
  const double C = sphere ? std::cos(k * w) : std::cosh(k * w);
  const double S = sphere ? std::sin(k * w) : std::sinh(k * w);
  const double dC = sphere ? -S : S;
  const double dS = C;
  const double ww_sign = sphere ? -1.0 : 1.0;

  const Vec b_b1 = cross(sig, j.pos, j.d1);
  const Vec b_b2 = cross(sig, j.pos, j.d2);
  const Vec b1_b2 = cross(sig, j.d1, j.d2);
  const Vec b_b3 = cross(sig, j.pos, j.d3);

  BlockJet out;
  out.p = C * j.pos + S * lambda * b_b1;
  out.w = k * (dC * j.pos + dS * lambda * b_b1);
  out.t = C * j.d1 + S * lambda * b_b2;
  out.ww = ww_sign * k * k * out.p;
  out.wt = k * (dC * j.d1 + dS * lambda * b_b2);
  out.tt = C * j.d2 + S * lambda * (b1_b2 + b_b3);
  return out;
}

/// Block depending on a single parameter (the curve itself).
BlockJet curve_block(const CurveSample& beta, double t, bool along_w) {
  const CurveJet j = evaluate(beta, t);
  const Vec z = Vec::Zero(j.pos.size());
  if (along_w) return {j.pos, j.d1, z, j.d2, z, z};
  return {j.pos, z, j.d1, z, z, j.d2};
}

/// Antiderivative of coef * C(x) (-sin x, cos x) from x0, tabulated on nodes
/// x0 + n*h, with its first two derivatives there.
struct RuledTrace {
  std::vector<Vec> g, dg, ddg;
};

RuledTrace ruled_trace(const std::function<double(double)>& Cfn, double coef, double x0, double h,
                       int n) {
  auto C = Cfn ? Cfn : [](double) { return 0.0; };
  auto integrand = [&](double x) {
    Vec r(2);
    r << -std::sin(x), std::cos(x);
    return Vec(coef * C(x) * r);
  };
  RuledTrace tr;
  Vec acc = Vec::Zero(2);
  constexpr int kSub = 64;  // Simpson panels per grid interval
  for (int k = 0; k < n; ++k) {
    const double x = x0 + k * h;
    if (k > 0) {
      const double a = x - h;
      const double d = h / kSub;
      Vec s = integrand(a) + integrand(x);
      for (int m = 1; m < kSub; ++m) s += (m % 2 ? 4.0 : 2.0) * integrand(a + m * d);
      acc += (d / 3.0) * s;
    }
    const double eps = 1e-5;
    const double dC = (C(x + eps) - C(x - eps)) / (2.0 * eps);
    Vec r(2), rp(2);
    r << -std::sin(x), std::cos(x);
    rp << -std::cos(x), -std::sin(x);
    tr.g.push_back(acc);
    tr.dg.push_back(coef * C(x) * r);
    tr.ddg.push_back(coef * (dC * r + C(x) * rp));
  }
  return tr;
}

void require_speed(const CurveSample& c, double expected, const char* what) {
  if (std::abs(c.speed - expected) > kSpeedTol) {
    std::ostringstream os;
    os << what << " must have speed " << expected << ", got " << c.speed;
    throw ValidationError(os.str());
  }
}

void require_space(const CurveSample& c, const SpaceForm& M, const char* what) {
  if (c.space.c() != M.c()) {
    std::ostringstream os;
    os << what << " lives in M^2(" << c.space.c() << "), expected M^2(" << M.c() << ")";
    throw ValidationError(os.str());
  }
}

void require_range(const CurveSample& c, double lo, double hi, const char* what) {
  const double slack = 1e-9 * std::max(1.0, std::abs(hi));
  if (lo < c.param_min() - slack || hi > c.param_max() + slack) {
    std::ostringstream os;
    os << what << " covers parameters [" << c.param_min() << ", " << c.param_max()
       << "] but the grid needs [" << lo << ", " << hi << "]";
    throw ValidationError(os.str());
  }
}

void require_angle(double theta) {
  if (!(theta > 0 && theta < kPi / 2)) throw ValidationError("theta must lie in (0, pi/2)");
}

/// Fills psi and all partials from the two block evaluators. `first_w` tells
/// whether the first block's w-parameter is u (else v); likewise `second_w`.
template <class F1, class F2>
ImmersionGrid assemble(const ProductSpace& P, const Grid2D& grid, F1&& first, bool first_w_is_u,
                       F2&& second, bool second_w_is_u) {
  ImmersionGrid out(P, grid);
  const std::size_t n = grid.size();
  out.psi.resize(n);
  out.psi_u.resize(n);
  out.psi_v.resize(n);
  out.psi_uu.resize(n);
  out.psi_uv.resize(n);
  out.psi_vv.resize(n);
  auto place = [](const BlockJet& b, bool w_is_u, Vec& u, Vec& v, Vec& uu, Vec& uv, Vec& vv) {
    u = w_is_u ? b.w : b.t;
    v = w_is_u ? b.t : b.w;
    uu = w_is_u ? b.ww : b.tt;
    vv = w_is_u ? b.tt : b.ww;
    uv = b.wt;
  };
  for (int i = 0; i < grid.nu; ++i) {
    for (int j = 0; j < grid.nv; ++j) {
      const double u = grid.u(i);
      const double v = grid.v(j);
      const BlockJet a = first(u, v);
      const BlockJet b = second(u, v);
      Vec au, av, auu, auv, avv, bu, bv, buu, buv, bvv;
      place(a, first_w_is_u, au, av, auu, auv, avv);
      place(b, second_w_is_u, bu, bv, buu, buv, bvv);
      const std::size_t k = grid.index(i, j);
      out.psi[k] = P.join(a.p, b.p);
      out.psi_u[k] = P.join(au, bu);
      out.psi_v[k] = P.join(av, bv);
      out.psi_uu[k] = P.join(auu, buu);
      out.psi_uv[k] = P.join(auv, buv);
      out.psi_vv[k] = P.join(avv, bvv);
    }
  }
  out.analytic = true;
  exclude_degenerate(out);
  return out;
}

BlockJet constant_block(const Vec& p) {
  const Vec z = Vec::Zero(p.size());
  return {p, z, z, z, z, z};
}

/// Chart of M^2(c) with w = u, t = v.
BlockJet chart_block(const SpaceForm& M, double u, double v) {
  BlockJet b;
  if (M.flat()) {
    Vec p(2), du(2), dv(2);
    p << u, v;
    du << 1, 0;
    dv << 0, 1;
    const Vec z = Vec::Zero(2);
    return {p, du, dv, z, z, z};
  }
  const bool sphere = M.c() > 0;
  const double r = 1.0 / std::sqrt(std::abs(M.c()));
  const double A = sphere ? std::cos(u) : std::cosh(u);
  const double dA = sphere ? -std::sin(u) : std::sinh(u);
  const double ddA = sphere ? -A : A;
  const double B = sphere ? std::sin(u) : std::sinh(u);
  const double dB = sphere ? std::cos(u) : std::cosh(u);
  const double ddB = sphere ? -B : B;
  const double Cv = sphere ? std::cos(v) : std::cosh(v);
  const double Sv = sphere ? std::sin(v) : std::sinh(v);
  const double dCv = sphere ? -Sv : Sv;
  const double dSv = Cv;
  const double vv_sign = sphere ? -1.0 : 1.0;
  auto vec = [r](double x, double y, double z) {
    Vec p(3);
    p << x, y, z;
    return Vec(r * p);
  };
  b.p = vec(A * Cv, A * Sv, B);
  b.w = vec(dA * Cv, dA * Sv, dB);
  b.t = vec(A * dCv, A * dSv, 0.0);
  b.ww = vec(ddA * Cv, ddA * Sv, ddB);
  b.wt = vec(dA * dCv, dA * dSv, 0.0);
  b.tt = vec(vv_sign * A * Cv, vv_sign * A * Sv, 0.0);
  return b;
}

}  // namespace

std::size_t ImmersionGrid::excluded_count() const {
  std::size_t n = 0;
  for (unsigned char e : excluded) n += e ? 1 : 0;
  return n;
}

void fill_fd_partials(ImmersionGrid& g) {
  const Grid2D& G = g.grid;
  if (g.psi.size() != G.size()) throw ValidationError("immersion grid has the wrong number of points");
  if (g.has_partials() && g.has_second_partials()) return;
  const int dim = g.P.ambient_dim();
  std::vector<Field2D> comp(static_cast<std::size_t>(dim), Field2D(G));
  for (int c = 0; c < dim; ++c)
    for (int i = 0; i < G.nu; ++i)
      for (int j = 0; j < G.nv; ++j) comp[c](i, j) = g.psi[G.index(i, j)][c];

  auto gather = [&](Field2D (*op)(const Field2D&)) {
    std::vector<Field2D> d;
    d.reserve(comp.size());
    for (const Field2D& f : comp) d.push_back(op(f));
    std::vector<Vec> out(G.size(), Vec(dim));
    for (std::size_t k = 0; k < G.size(); ++k)
      for (int c = 0; c < dim; ++c) out[k][c] = d[c].data()[k];
    return out;
  };
  if (!g.has_partials()) {
    g.psi_u = gather(diff_u);
    g.psi_v = gather(diff_v);
    for (std::size_t k = 0; k < G.size(); ++k) {
      g.psi_u[k] = g.P.tangent_part(g.psi[k], g.psi_u[k]);
      g.psi_v[k] = g.P.tangent_part(g.psi[k], g.psi_v[k]);
    }
    g.analytic = false;
  }
  if (!g.has_second_partials()) {
    g.psi_uu = gather(diff_uu);
    g.psi_uv = gather(diff_uv);
    g.psi_vv = gather(diff_vv);
  }
}

void exclude_degenerate(ImmersionGrid& g, double threshold) {
  if (!g.has_partials()) throw ValidationError("degeneracy check needs first partials");
  const Signature& sig = g.P.signature();
  g.excluded.assign(g.grid.size(), 0);
  for (std::size_t k = 0; k < g.grid.size(); ++k) {
    const double E = inner(sig, g.psi_u[k], g.psi_u[k]);
    const double F = inner(sig, g.psi_u[k], g.psi_v[k]);
    const double G = inner(sig, g.psi_v[k], g.psi_v[k]);
    const double det = E * G - F * F;
    if (!(det > 0) || std::sqrt(det) < threshold) g.excluded[k] = 1;
  }
}

double max_quadric_defect(const ImmersionGrid& g) {
  double m = 0.0;
  for (const Vec& p : g.psi) m = std::max(m, g.P.quadric_defect(p));
  return m;
}

CurveSample geodesic_curve(const SpaceForm& M, double t_max, double h, double speed) {
  if (!(speed > 0)) throw ValidationError("curve speed must be positive");
  const Vec p0 = M.base_point();
  Vec T0 = Vec::Zero(M.ambient_dim());
  T0[1] = 1.0;
  CurveSample c = integrate_curve(M, CurvatureSpec::constant(0.0), p0, T0, t_max * speed, h);
  return reparameterize_speed(c, speed);
}

ImmersionGrid slice_surface(const ProductSpace& P, Factor which, const Vec& fixed_point,
                            const Grid2D& grid) {
  const SpaceForm& other = which == Factor::First ? P.M2() : P.M1();
  if (!other.on_quadric(fixed_point))
    throw ValidationError("slice: fixed point is not on the other factor's quadric");
  const SpaceForm& M = which == Factor::First ? P.M1() : P.M2();
  auto moving = [&M](double u, double v) { return chart_block(M, u, v); };
  auto fixed = [&fixed_point](double, double) { return constant_block(fixed_point); };
  ImmersionGrid out = which == Factor::First ? assemble(P, grid, moving, true, fixed, true)
                                             : assemble(P, grid, fixed, true, moving, true);
  const bool first = which == Factor::First;
  out.family.name = first ? "slice_first" : "slice_second";
  out.family.theta1 = first ? 0.0 : kPi / 2;
  out.family.theta2 = first ? 0.0 : kPi / 2;
  out.family.K = first ? P.c1() : P.c2();
  out.family.Kperp = 0.0;
  return out;
}

ImmersionGrid product_of_curves(const CurveSample& curve1, const CurveSample& curve2,
                                const Grid2D& grid) {
  const ProductSpace P(curve1.space.c(), curve2.space.c());
  require_speed(curve1, 1.0, "first curve");
  require_speed(curve2, 1.0, "second curve");
  require_range(curve1, grid.u0, grid.u1, "first curve");
  require_range(curve2, grid.v0, grid.v1, "second curve");
  ImmersionGrid out = assemble(
      P, grid, [&](double u, double) { return curve_block(curve1, u, true); }, true,
      [&](double, double v) { return curve_block(curve2, v, false); }, true);
  out.family.name = "product_of_curves";
  out.family.theta1 = kPi / 2;
  out.family.theta2 = 0.0;
  out.family.K = 0.0;
  return out;
}

double companion_angle(double c1, double c2) {
  if (!(c1 * c2 > 0)) throw ValidationError("companion angle needs c1 c2 > 0");
  return std::acos(std::sqrt(c2 / (c1 + c2)));
}

ImmersionGrid two_angle_case1(const ProductSpace& P, double theta, const CurveSample& ftilde,
                              const CurveSample& fbar, const Grid2D& grid) {
  const double c1 = P.c1();
  const double c2 = P.c2();
  if (!(c1 * c2 > 0)) throw ValidationError("two-angle family requires c1 c2 > 0");
  require_angle(theta);
  require_space(ftilde, P.M1(), "first curve");
  require_space(fbar, P.M2(), "second curve");
  require_speed(ftilde, std::cos(theta), "first curve");
  require_speed(fbar, std::sin(theta), "second curve");
  require_range(ftilde, grid.v0, grid.v1, "first curve");
  require_range(fbar, grid.v0, grid.v1, "second curve");
  for (int j = 0; j < grid.nv; ++j) {
    const double v = grid.v(j);
    const double lhs = curvature_at(ftilde, v) / std::sqrt(std::abs(c1));
    const double rhs = curvature_at(fbar, v) / std::sqrt(std::abs(c2));
    if (std::abs(lhs - rhs) > 1e-6) {
      std::ostringstream os;
      os << "curvature matching kappa~/sqrt|c1| = kappa-/sqrt|c2| fails at v = " << v << " (" << lhs
         << " vs " << rhs << ")";
      throw ValidationError(os.str());
    }
  }
  const double k = std::sqrt(std::abs(c1 * c2 / (c1 + c2)));
  const double l1 = 1.0 / std::cos(theta);
  const double l2 = 1.0 / std::sin(theta);
  ImmersionGrid out = assemble(
      P, grid, [&](double u, double v) { return swept(P.M1(), ftilde, k, l1, u, v); }, true,
      [&](double u, double v) { return swept(P.M2(), fbar, k, l2, u, v); }, true);
  const double other = companion_angle(c1, c2);
  const double t1 = std::max(theta, other);
  const double t2 = std::min(theta, other);
  out.family.name = "two_angle";
  out.family.params = {{"theta", theta}, {"theta_companion", other}};
  out.family.theta1 = t1;
  out.family.theta2 = t2;
  out.family.K = c1 * std::pow(std::cos(t1) * std::cos(t2), 2) + c2 * std::pow(std::sin(t1) * std::sin(t2), 2);
  out.family.Kperp = std::abs(P.a()) * std::sin(2 * t1) * std::sin(2 * t2);
  return out;
}

ImmersionGrid totally_geodesic_mixed(const ProductSpace& P, const CurveSample& ftilde,
                                     const CurveSample& fbar, const Grid2D& grid) {
  const double c1 = P.c1();
  const double c2 = P.c2();
  if (!(c1 * c2 > 0)) throw ValidationError("totally geodesic family requires c1 c2 > 0");
  require_speed(ftilde, std::sqrt(c2 / (c1 + c2)), "first curve");
  require_speed(fbar, std::sqrt(c1 / (c1 + c2)), "second curve");
  for (double kap : ftilde.kappa)
    if (std::abs(kap) > 1e-6) throw ValidationError("first curve must be a geodesic");
  for (double kap : fbar.kappa)
    if (std::abs(kap) > 1e-6) throw ValidationError("second curve must be a geodesic");
  ImmersionGrid out = two_angle_case1(P, companion_angle(c1, c2), ftilde, fbar, grid);
  out.family.name = "totally_geodesic";
  out.family.params = {};
  out.family.K = c1 * c2 / (c1 + c2);
  return out;
}

ImmersionGrid family_theta_halfpi(const ProductSpace& P, double theta, const CurveSample& ftilde,
                                  const CurveSample* fbar, const Grid2D& grid,
                                  const FlatFactorForm& flat) {
  require_angle(theta);
  require_space(ftilde, P.M1(), "first curve");
  require_speed(ftilde, std::cos(theta), "first curve");
  require_range(ftilde, grid.v0, grid.v1, "first curve");
  auto first = [&](double, double v) { return curve_block(ftilde, v, false); };
  const double c2 = P.c2();
  const double st = std::sin(theta);

  ImmersionGrid out = [&] {
    if (c2 != 0.0) {
      if (!fbar) throw ValidationError("theta_halfpi family needs a curve in the second factor");
      require_space(*fbar, P.M2(), "second curve");
      require_speed(*fbar, 1.0, "second curve");
      require_range(*fbar, grid.u0, grid.u1, "second curve");
      const double k = std::sqrt(std::abs(c2)) * st;
      return assemble(
          P, grid, first, true, [&](double u, double v) { return swept(P.M2(), *fbar, k, 1.0, v, u); },
          false);
    }
    if (!flat.ruled) {
      auto second = [st](double u, double v) {
        Vec p(2), du(2), dv(2);
        p << u, st * v;
        du << 1, 0;
        dv << 0, st;
        const Vec z = Vec::Zero(2);
        return BlockJet{p, du, dv, z, z, z};
      };
      return assemble(P, grid, first, true, second, true);
    }
    const RuledTrace tr = ruled_trace(flat.C, std::cos(theta), grid.u0, grid.hu(), grid.nu);
    auto second = [&, st](double u, double v) {
      const int i = static_cast<int>(std::lround((u - grid.u0) / grid.hu()));
      Vec e(2), de(2);
      e << std::cos(u), std::sin(u);
      de << -std::sin(u), std::cos(u);
      const Vec z = Vec::Zero(2);
      return BlockJet{Vec(v * st * e + tr.g[i]), Vec(v * st * de + tr.dg[i]), Vec(st * e),
                      Vec(-v * st * e + tr.ddg[i]), Vec(st * de), z};
    };
    return assemble(P, grid, first, true, second, true);
  }();
  out.family.name = "theta_halfpi";
  out.family.params = {{"theta", theta}};
  if (c2 == 0.0) out.family.params["ruled"] = flat.ruled ? 1.0 : 0.0;
  out.family.theta1 = kPi / 2;
  out.family.theta2 = theta;
  out.family.K = c2 * st * st;
  out.family.Kperp = 0.0;
  return out;
}

ImmersionGrid family_zero_theta(const ProductSpace& P, double theta, const CurveSample* ftilde,
                                const CurveSample& fbar, const Grid2D& grid,
                                const FlatFactorForm& flat) {
  require_angle(theta);
  require_space(fbar, P.M2(), "second curve");
  require_speed(fbar, std::sin(theta), "second curve");
  require_range(fbar, grid.u0, grid.u1, "second curve");
  auto second = [&](double u, double) { return curve_block(fbar, u, true); };
  const double c1 = P.c1();
  const double ct = std::cos(theta);

  ImmersionGrid out = [&] {
    if (c1 != 0.0) {
      if (!ftilde) throw ValidationError("zero_theta family needs a curve in the first factor");
      require_space(*ftilde, P.M1(), "first curve");
      require_speed(*ftilde, 1.0, "first curve");
      require_range(*ftilde, grid.v0, grid.v1, "first curve");
      const double k = std::sqrt(std::abs(c1)) * ct;
      return assemble(
          P, grid, [&](double u, double v) { return swept(P.M1(), *ftilde, k, 1.0, u, v); }, true,
          second, true);
    }
    if (!flat.ruled) {
      auto first = [ct](double u, double v) {
        Vec p(2), du(2), dv(2);
        p << ct * u, v;
        du << ct, 0;
        dv << 0, 1;
        const Vec z = Vec::Zero(2);
        return BlockJet{p, du, dv, z, z, z};
      };
      return assemble(P, grid, first, true, second, true);
    }
    const RuledTrace tr = ruled_trace(flat.C, -std::sin(theta), grid.v0, grid.hv(), grid.nv);
    auto first = [&, ct](double u, double v) {
      const int j = static_cast<int>(std::lround((v - grid.v0) / grid.hv()));
      Vec e(2), de(2);
      e << std::cos(v), std::sin(v);
      de << -std::sin(v), std::cos(v);
      const Vec z = Vec::Zero(2);
      return BlockJet{Vec(u * ct * e + tr.g[j]), Vec(ct * e), Vec(u * ct * de + tr.dg[j]), z,
                      Vec(ct * de), Vec(-u * ct * e + tr.ddg[j])};
    };
    return assemble(P, grid, first, true, second, true);
  }();
  out.family.name = "zero_theta";
  out.family.params = {{"theta", theta}};
  if (c1 == 0.0) out.family.params["ruled"] = flat.ruled ? 1.0 : 0.0;
  out.family.theta1 = theta;
  out.family.theta2 = 0.0;
  out.family.K = c1 * ct * ct;
  out.family.Kperp = 0.0;
  return out;
}

}  // namespace casurf
