#include "casurf/curves.hpp"

#include "casurf/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace casurf {

namespace {

constexpr double kFrameTol = 1e-8;

struct FrenetState {
  Vec alpha;
  Vec T;
};

double checked_kappa(const CurvatureSpec& kappa, double s) {
  const double k = kappa(s);
  if (!std::isfinite(k)) {
    std::ostringstream os;
    os << "geodesic curvature is not finite at s = " << s;
    throw ValidationError(os.str());
  }
  return k;
}

FrenetState frenet_rhs(const SpaceForm& M, const FrenetState& y, double kappa) {
  const Vec N = complex_structure_J_unchecked(M, y.alpha, y.T);
  FrenetState d;
  d.alpha = y.T;
  d.T = kappa * N;
  if (!M.flat()) d.T -= M.c() * y.alpha;
  return d;
}

FrenetState axpy(const FrenetState& y, double a, const FrenetState& k) {
  return {y.alpha + a * k.alpha, y.T + a * k.T};
}

void reproject(const SpaceForm& M, FrenetState& y) {
  y.alpha = project_to_quadric(M, y.alpha);
  y.T = M.tangent_part(y.alpha, y.T);
  const double n2 = norm_sq(M.signature(), y.T);
  if (!(n2 > 0)) throw NumericalError("curve integration: tangent degenerated");
  y.T /= std::sqrt(n2);
}

Vec second_derivative(const CurveSample& c, std::size_t k) {
  Vec acc = c.kappa[k] * c.N[k];
  if (!c.space.flat()) acc -= c.space.c() * c.alpha[k];
  return c.speed * c.speed * acc;
}

}  // namespace

CurvatureSpec CurvatureSpec::constant(double kappa) {
  return callable([kappa](double) { return kappa; });
}

CurvatureSpec CurvatureSpec::callable(std::function<double(double)> f) {
  CurvatureSpec spec;
  spec.fn = std::move(f);
  return spec;
}

CurvatureSpec CurvatureSpec::table(std::vector<double> s, std::vector<double> kappa) {
  if (s.size() != kappa.size() || s.empty())
    throw ValidationError("curvature table: arc-length and curvature columns must match and be non-empty");
  for (std::size_t k = 1; k < s.size(); ++k)
    if (!(s[k] > s[k - 1])) throw ValidationError("curvature table: arc length must be increasing");
  CurvatureSpec spec;
  spec.table_s = std::move(s);
  spec.table_kappa = std::move(kappa);
  return spec;
}

bool CurvatureSpec::valid() const { return static_cast<bool>(fn) || !table_s.empty(); }

double CurvatureSpec::operator()(double s) const {
  if (fn) return fn(s);
  if (table_s.empty()) throw ValidationError("curvature spec is empty");
  if (s <= table_s.front()) return table_kappa.front();
  if (s >= table_s.back()) return table_kappa.back();
  const auto it = std::upper_bound(table_s.begin(), table_s.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - table_s.begin());
  const double t = (s - table_s[k - 1]) / (table_s[k] - table_s[k - 1]);
  return (1.0 - t) * table_kappa[k - 1] + t * table_kappa[k];
}

CurveSample integrate_curve(const SpaceForm& M, const CurvatureSpec& kappa, const Vec& p0,
                            const Vec& T0, double s_max, double h) {
  if (!(h > 0) || !std::isfinite(h)) throw ValidationError("curve integration: step must be positive");
  if (!(s_max > 0) || !std::isfinite(s_max))
    throw ValidationError("curve integration: length must be positive");
  if (!kappa.valid()) throw ValidationError("curve integration: no curvature given");
  if (p0.size() != M.ambient_dim() || T0.size() != M.ambient_dim())
    throw ValidationError("curve integration: initial frame has the wrong dimension");
  if (!M.on_quadric(p0, kFrameTol))
    throw ValidationError("curve integration: initial point is off the quadric");
  if (!M.flat() && std::abs(inner(M.signature(), p0, T0)) > kFrameTol * std::max(1.0, p0.norm()))
    throw ValidationError("curve integration: initial tangent is not tangent to the space form");
  if (std::abs(norm_sq(M.signature(), T0) - 1.0) > kFrameTol)
    throw ValidationError("curve integration: initial tangent must have unit length");

  const auto steps = static_cast<std::size_t>(std::ceil(s_max / h - 1e-9));
  CurveSample out;
  out.space = M;
  out.h = h;
  out.speed = 1.0;
  out.s.reserve(steps + 1);
  out.alpha.reserve(steps + 1);
  out.T.reserve(steps + 1);
  out.N.reserve(steps + 1);
  out.kappa.reserve(steps + 1);

  FrenetState y{p0, T0};
  auto record = [&](double s) {
    out.s.push_back(s);
    out.alpha.push_back(y.alpha);
    out.T.push_back(y.T);
    out.N.push_back(complex_structure_J_unchecked(M, y.alpha, y.T));
    out.kappa.push_back(checked_kappa(kappa, s));
  };
  record(0.0);
  for (std::size_t n = 0; n < steps; ++n) {
    const double s = static_cast<double>(n) * h;
    const double k_mid = checked_kappa(kappa, s + 0.5 * h);
    const FrenetState k1 = frenet_rhs(M, y, checked_kappa(kappa, s));
    const FrenetState k2 = frenet_rhs(M, axpy(y, 0.5 * h, k1), k_mid);
    const FrenetState k3 = frenet_rhs(M, axpy(y, 0.5 * h, k2), k_mid);
    const FrenetState k4 = frenet_rhs(M, axpy(y, h, k3), checked_kappa(kappa, s + h));
    y.alpha += (h / 6.0) * (k1.alpha + 2.0 * k2.alpha + 2.0 * k3.alpha + k4.alpha);
    y.T += (h / 6.0) * (k1.T + 2.0 * k2.T + 2.0 * k3.T + k4.T);
    reproject(M, y);
    record(static_cast<double>(n + 1) * h);
  }
  return out;
}

CurveSample reparameterize_speed(const CurveSample& curve, double rho) {
  if (!(rho > 0) || !std::isfinite(rho)) throw ValidationError("reparameterization speed must be positive");
  CurveSample out = curve;
  out.speed = rho;
  return out;
}

std::vector<double> estimate_geodesic_curvature(const CurveSample& curve, const SpaceForm& M) {
  if (curve.size() < 5) throw ValidationError("curvature estimate needs at least 5 samples");
  if (M.c() != curve.space.c()) throw ValidationError("curvature estimate: space form mismatch");
  const std::size_t n = curve.size();
  const double h = curve.h;
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Vec dT;
    if (k == 0)
      dT = (-3.0 * curve.T[0] + 4.0 * curve.T[1] - curve.T[2]) / (2.0 * h);
    else if (k == n - 1)
      dT = (3.0 * curve.T[n - 1] - 4.0 * curve.T[n - 2] + curve.T[n - 3]) / (2.0 * h);
    else
      dT = (curve.T[k + 1] - curve.T[k - 1]) / (2.0 * h);
    out[k] = inner(M.signature(), dT, curve.N[k]);
  }
  return out;
}

CurveJet evaluate(const CurveSample& curve, double t) {
  if (curve.size() < 2) throw ValidationError("curve evaluation needs at least 2 samples");
  const double t0 = curve.param_min();
  const double t1 = curve.param_max();
  const double dt = curve.h / curve.speed;
  const double slack = 1e-9 * std::max(1.0, std::abs(t1));
  if (t < t0 - slack || t > t1 + slack) {
    std::ostringstream os;
    os << "curve evaluated at t = " << t << " outside its parameter range [" << t0 << ", " << t1 << "]";
    throw ValidationError(os.str());
  }
  auto k = static_cast<std::size_t>(std::floor((t - t0) / dt));
  k = std::min(k, curve.size() - 2);
  const double x = (t - curve.param(k)) / dt;

  const Vec& p0 = curve.alpha[k];
  const Vec& p1 = curve.alpha[k + 1];
  const Vec m0 = dt * curve.speed * curve.T[k];
  const Vec m1 = dt * curve.speed * curve.T[k + 1];
  const Vec a0 = dt * dt * second_derivative(curve, k);
  const Vec a1 = dt * dt * second_derivative(curve, k + 1);

  // Quintic matching value, first and second derivative at both ends.
  const Vec dp = p1 - p0;
  const Vec c0 = p0;
  const Vec c1 = m0;
  const Vec c2 = 0.5 * a0;
  const Vec c3 = 10.0 * dp - 6.0 * m0 - 4.0 * m1 - 1.5 * a0 + 0.5 * a1;
  const Vec c4 = -15.0 * dp + 8.0 * m0 + 7.0 * m1 + 1.5 * a0 - a1;
  const Vec c5 = 6.0 * dp - 3.0 * m0 - 3.0 * m1 - 0.5 * a0 + 0.5 * a1;

  CurveJet jet;
  jet.pos = c0 + x * (c1 + x * (c2 + x * (c3 + x * (c4 + x * c5))));
  jet.d1 = (c1 + x * (2.0 * c2 + x * (3.0 * c3 + x * (4.0 * c4 + x * 5.0 * c5)))) / dt;
  jet.d2 = (2.0 * c2 + x * (6.0 * c3 + x * (12.0 * c4 + x * 20.0 * c5))) / (dt * dt);
  jet.d3 = (6.0 * c3 + x * (24.0 * c4 + x * 60.0 * c5)) / (dt * dt * dt);
  return jet;
}

double curvature_at(const CurveSample& curve, double t) {
  const double dt = curve.h / curve.speed;
  const double pos = (t - curve.param_min()) / dt;
  if (pos <= 0) return curve.kappa.front();
  auto k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= curve.size()) return curve.kappa.back();
  const double x = pos - static_cast<double>(k);
  return (1.0 - x) * curve.kappa[k] + x * curve.kappa[k + 1];
}

}  // namespace casurf
