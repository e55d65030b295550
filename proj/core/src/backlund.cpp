#include "casurf/backlund.hpp"

#include "casurf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace casurf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSingularGap = 1e-3;
constexpr double kPi = 3.14159265358979323846;

double sq(double x) { return x * x; }

double sn(bool trig, double x) { return trig ? std::sin(x) : std::sinh(x); }
double cn(bool trig, double x) { return trig ? std::cos(x) : std::cosh(x); }

/// True when th is close to a zero of sn (or on the wrong side of it).
bool near_singular(bool trig, double th) {
  if (!std::isfinite(th)) return true;
  if (trig) return th < kSingularGap || th > kPi - kSingularGap;
  return th < kSingularGap;
}

std::vector<double> sample(const std::function<double(double)>& fn, int n, double x0, double h,
                           const char* what) {
  if (!fn) throw ValidationError(std::string(what) + ": no boundary data given");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    out[k] = fn(x0 + k * h);
    if (!std::isfinite(out[k])) {
      std::ostringstream os;
      os << what << ": boundary value at " << x0 + k * h << " is not finite";
      throw ValidationError(os.str());
    }
  }
  return out;
}

struct GoursatResult {
  Field2D X;
  Field2D Y;
  int sweeps = 0;
  double change = 0.0;
};

/// Right-hand side f(marched value, value of the other field).
using Rhs = std::function<double(double self, double other)>;

double rk4_step(const Rhs& f, double x, double h, double c0, double cm, double c1) {
  const double k1 = f(x, c0);
  const double k2 = f(x + 0.5 * h * k1, cm);
  const double k3 = f(x + 0.5 * h * k2, cm);
  const double k4 = f(x + h * k3, c1);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// X_u = fx(X, Y), Y_v = fy(Y, X) with X(u0, .) = X0 and Y(., v0) = Y0.
GoursatResult goursat(const Grid2D& g, const std::vector<double>& X0, const std::vector<double>& Y0,
                      const Rhs& fx, const Rhs& fy, const GoursatParams& p) {
  if (p.max_sweeps < 1 || !(p.tol > 0)) throw ValidationError("sweep parameters must be positive");
  if (g.nu < 4 || g.nv < 4) throw ValidationError("Goursat grid needs at least 4x4 nodes");
  GoursatResult r{Field2D(g), Field2D(g), 0, 0.0};
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) {
      r.X(i, j) = X0[j];
      r.Y(i, j) = Y0[i];
    }
  const double hu = g.hu(), hv = g.hv();
  std::vector<double> line;
  auto check = [](double x, int i, int j) {
    if (!std::isfinite(x)) throw NumericalError("Goursat sweep produced a non-finite value", i, j);
  };
  for (int sweep = 1; sweep <= p.max_sweeps; ++sweep) {
    double change = 0.0;
    for (int j = 0; j < g.nv; ++j) {
      line.assign(static_cast<std::size_t>(g.nu), 0.0);
      for (int i = 0; i < g.nu; ++i) line[i] = r.Y(i, j);
      double x = X0[j];
      for (int i = 0; i + 1 < g.nu; ++i) {
        x = rk4_step(fx, x, hu, line[i], lagrange4(line, i + 0.5), line[i + 1]);
        check(x, i + 1, j);
        change = std::max(change, std::abs(x - r.X(i + 1, j)));
        r.X(i + 1, j) = x;
      }
    }
    for (int i = 0; i < g.nu; ++i) {
      line.assign(static_cast<std::size_t>(g.nv), 0.0);
      for (int j = 0; j < g.nv; ++j) line[j] = r.X(i, j);
      double y = Y0[i];
      for (int j = 0; j + 1 < g.nv; ++j) {
        y = rk4_step(fy, y, hv, line[j], lagrange4(line, j + 0.5), line[j + 1]);
        check(y, i, j + 1);
        change = std::max(change, std::abs(y - r.Y(i, j + 1)));
        r.Y(i, j + 1) = y;
      }
    }
    r.sweeps = sweep;
    r.change = change;
    if (change < p.tol) return r;
  }
  std::ostringstream os;
  os << "Goursat sweeps did not converge after " << p.max_sweeps << " sweeps (last change " << r.change
     << ")";
  throw NumericalError(os.str());
}

bool trig1(const ExisConstants& C) { return C.A1 > 0; }
bool trig2(const ExisConstants& C) { return C.A2 > 0; }

}  // namespace

std::string to_string(BacklundCase c) {
  switch (c) {
    case BacklundCase::SineSine: return "sine-sine";
    case BacklundCase::SinhSinh: return "sinh-sinh";
    case BacklundCase::Mixed: return "mixed";
  }
  return "sine-sine";
}

std::string to_string(ExisVariant v) {
  switch (v) {
    case ExisVariant::Exis1: return "exis1";
    case ExisVariant::Exis2: return "exis2";
    case ExisVariant::Exis3: return "exis3";
  }
  return "exis1";
}

double ExisConstants::gauss_curvature() const {
  return c1 * sq(std::cos(theta1)) * sq(std::cos(theta2)) + c2 * sq(std::sin(theta1)) * sq(std::sin(theta2));
}

double ExisConstants::normal_curvature() const {
  return std::abs((c1 + c2) / 4.0) * std::sin(2.0 * theta1) * std::sin(2.0 * theta2);
}

ExisConstants exis_constants(double c1, double c2, double theta1, double theta2) {
  if (!std::isfinite(c1) || !std::isfinite(c2) || !std::isfinite(theta1) || !std::isfinite(theta2))
    throw ValidationError("constants: inputs must be finite");
  if (c1 == 0.0 && c2 == 0.0) throw ValidationError("constants: c1 and c2 cannot both vanish");
  if (!(theta2 > 0.0 && theta1 < kPi / 2))
    throw ValidationError("constants: angles must lie in (0, pi/2)");
  if (!(theta1 > theta2)) throw ValidationError("constants: theta1 must exceed theta2");
  ExisConstants C;
  C.c1 = c1;
  C.c2 = c2;
  C.theta1 = theta1;
  C.theta2 = theta2;
  const double d = std::cos(2.0 * theta1) - std::cos(2.0 * theta2);
  C.a1 = std::sin(2.0 * theta1) / d;
  C.a2 = std::sin(2.0 * theta2) / -d;
  const double k1 = sq(std::cos(theta1)), k2 = sq(std::cos(theta2));
  C.A1 = (k2 - k1) * (c1 * k2 - c2 * sq(std::sin(theta2)));
  C.A2 = (k1 - k2) * (c1 * k1 - c2 * sq(std::sin(theta1)));
  if (std::abs(C.A1) <= 1e-14 || std::abs(C.A2) <= 1e-14)
    throw ValidationError("constants: A1 or A2 vanishes, no substitution applies");
  if (C.A1 > 0 && C.A2 > 0)
    C.sign_case = BacklundCase::SineSine;
  else if (C.A1 < 0 && C.A2 < 0)
    C.sign_case = BacklundCase::SinhSinh;
  else
    C.sign_case = BacklundCase::Mixed;
  return C;
}

std::size_t BacklundSolution::excluded_count() const {
  return static_cast<std::size_t>(std::count(excluded.begin(), excluded.end(), 1));
}

BacklundSolution solve_backlund(const ExisConstants& C, const std::function<double(double)>& bdata1,
                                const std::function<double(double)>& bdata2, const Grid2D& grid,
                                const GoursatParams& params) {
  const bool t1 = trig1(C), t2 = trig2(C);
  const std::vector<double> X0 = sample(bdata1, grid.nv, grid.v0, grid.hv(), "theta1 data");
  const std::vector<double> Y0 = sample(bdata2, grid.nu, grid.u0, grid.hu(), "theta2 data");
  if (!t1 && *std::min_element(X0.begin(), X0.end()) < 0)
    throw ValidationError("theta1 data must be non-negative where coth is used");
  if (!t2 && *std::min_element(Y0.begin(), Y0.end()) < 0)
    throw ValidationError("theta2 data must be non-negative where coth is used");

  const double k1 = C.a1 * std::sqrt(std::abs(C.A1) / std::abs(C.A2));
  const double k2 = C.a2 * std::sqrt(std::abs(C.A2) / std::abs(C.A1));
  const Rhs fx = [=](double, double th2) { return k1 * sn(t2, th2); };
  const Rhs fy = [=](double, double th1) { return k2 * sn(t1, th1); };
  GoursatResult r = goursat(grid, X0, Y0, fx, fy, params);

  BacklundSolution s;
  s.grid = grid;
  s.constants = C;
  s.sign_case = C.sign_case;
  s.theta1 = std::move(r.X);
  s.theta2 = std::move(r.Y);
  s.sweeps = r.sweeps;
  s.scheme_residual = r.change;
  s.mu1 = Field2D(grid, kNaN);
  s.mu2 = Field2D(grid, kNaN);
  s.excluded.assign(grid.size(), 0);
  const double r1 = std::sqrt(std::abs(C.A1)), r2 = std::sqrt(std::abs(C.A2));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double th1 = s.theta1.data()[k], th2 = s.theta2.data()[k];
    if (near_singular(t1, th1) || near_singular(t2, th2)) {
      s.excluded[k] = 1;
      continue;
    }
    s.mu1.data()[k] = r1 * cn(t1, th1) / sn(t1, th1);
    s.mu2.data()[k] = r2 * cn(t2, th2) / sn(t2, th2);
  }
  const double area = (grid.u1 - grid.u0) * (grid.v1 - grid.v0);
  if (std::abs(C.a1 * C.a2) * area >= 1.0) {
    std::ostringstream os;
    os << "|a1 a2| * area = " << std::abs(C.a1 * C.a2) * area << " >= 1; sweeps may converge slowly";
    s.warning = os.str();
  }
  return s;
}

PairResidual pair_residual(const BacklundSolution& sol) {
  const ExisConstants& C = sol.constants;
  const bool t1 = trig1(C), t2 = trig2(C);
  const double k1 = C.a1 * std::sqrt(std::abs(C.A1) / std::abs(C.A2));
  const double k2 = C.a2 * std::sqrt(std::abs(C.A2) / std::abs(C.A1));
  const Field2D d1 = diff_u(sol.theta1);
  const Field2D d2 = diff_v(sol.theta2);
  PairResidual r;
  const Grid2D& g = sol.grid;
  for (int i = 1; i + 1 < g.nu; ++i)
    for (int j = 1; j + 1 < g.nv; ++j) {
      r.eq_u = std::max(r.eq_u, std::abs(d1(i, j) - k1 * sn(t2, sol.theta2(i, j))));
      r.eq_v = std::max(r.eq_v, std::abs(d2(i, j) - k2 * sn(t1, sol.theta1(i, j))));
    }
  return r;
}

SineGordonResidual sine_gordon_residual(const BacklundSolution& sol) {
  const Grid2D& g = sol.grid;
  if (g.nu < 3 || g.nv < 3) throw ValidationError("Sine-Gordon residual needs at least 3x3 nodes");
  const ExisConstants& C = sol.constants;
  const double aa = C.a1 * C.a2;
  SineGordonResidual r;
  if (C.sign_case == BacklundCase::Mixed) {
    const bool t1 = trig1(C), t2 = trig2(C);
    const Field2D d1 = diff_uv(sol.theta1);
    const Field2D d2 = diff_uv(sol.theta2);
    for (int i = 1; i + 1 < g.nu; ++i)
      for (int j = 1; j + 1 < g.nv; ++j) {
        const double th1 = sol.theta1(i, j), th2 = sol.theta2(i, j);
        r.r_plus = std::max(r.r_plus, std::abs(d1(i, j) - aa * cn(t2, th2) * sn(t1, th1)));
        r.r_minus = std::max(r.r_minus, std::abs(d2(i, j) - aa * cn(t1, th1) * sn(t2, th2)));
      }
    return r;
  }
  const bool trig = C.sign_case == BacklundCase::SineSine;
  Field2D plus(g), minus(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    plus.data()[k] = sol.theta1.data()[k] + sol.theta2.data()[k];
    minus.data()[k] = sol.theta1.data()[k] - sol.theta2.data()[k];
  }
  const Field2D dp = diff_uv(plus);
  const Field2D dm = diff_uv(minus);
  for (int i = 1; i + 1 < g.nu; ++i)
    for (int j = 1; j + 1 < g.nv; ++j) {
      r.r_plus = std::max(r.r_plus, std::abs(dp(i, j) - aa * sn(trig, plus(i, j))));
      r.r_minus = std::max(r.r_minus, std::abs(dm(i, j) - aa * sn(trig, minus(i, j))));
    }
  return r;
}

ExisFields exis1_fields(const BacklundSolution& sol) {
  const ExisConstants& C = sol.constants;
  const bool t1 = trig1(C), t2 = trig2(C);
  ExisFields f;
  f.variant = ExisVariant::Exis1;
  f.constants = C;
  f.grid = sol.grid;
  f.E = Field2D(sol.grid, kNaN);
  f.G = Field2D(sol.grid, kNaN);
  f.mu1 = sol.mu1;
  f.mu2 = sol.mu2;
  f.excluded = sol.excluded;
  f.sweeps = sol.sweeps;
  f.scheme_residual = sol.scheme_residual;
  for (std::size_t k = 0; k < sol.grid.size(); ++k) {
    if (f.excluded[k]) continue;
    f.E.data()[k] = sq(sn(t2, sol.theta2.data()[k])) / std::abs(C.A2);
    f.G.data()[k] = sq(sn(t1, sol.theta1.data()[k])) / std::abs(C.A1);
  }
  return f;
}

ExisFields solve_exis2(const ExisConstants& C, const std::function<double(double)>& G0,
                       const std::function<double(double)>& mu0, const Grid2D& grid,
                       const GoursatParams& params) {
  if (!(C.A1 < 0)) throw ValidationError("the Exis2 system requires A1 < 0");
  const std::vector<double> X0 = sample(G0, grid.nv, grid.v0, grid.hv(), "G data");
  const std::vector<double> Y0 = sample(mu0, grid.nu, grid.u0, grid.hu(), "mu data");
  if (*std::min_element(X0.begin(), X0.end()) <= 0) throw ValidationError("G data must be positive");
  for (double m : Y0)
    if (!(m * m + C.A2 > 0)) throw ValidationError("mu data must satisfy mu^2 + A2 > 0");
  const double A1 = C.A1, A2 = C.A2, a1 = C.a1, a2 = C.a2;
  const Rhs fx = [=](double G, double mu) { return 2.0 * a1 * G * std::sqrt(-A1 / (mu * mu + A2)); };
  const Rhs fy = [=](double mu, double G) { return -a2 * std::sqrt(G) * (mu * mu + A2); };
  GoursatResult r = goursat(grid, X0, Y0, fx, fy, params);

  ExisFields f;
  f.variant = ExisVariant::Exis2;
  f.constants = C;
  f.grid = grid;
  f.G = std::move(r.X);
  f.mu2 = std::move(r.Y);
  f.E = Field2D(grid, kNaN);
  f.mu1 = Field2D(grid, std::sqrt(-A1));
  f.excluded.assign(grid.size(), 0);
  f.sweeps = r.sweeps;
  f.scheme_residual = r.change;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double d = sq(f.mu2.data()[k]) + A2;
    if (d > 0) f.E.data()[k] = 1.0 / d;
    else f.excluded[k] = 1;
  }
  return f;
}

ExisFields solve_exis3(const ExisConstants& C, const std::function<double(double)>& G0,
                       const std::function<double(double)>& E0, const Grid2D& grid,
                       const GoursatParams& params) {
  if (!(C.A1 < 0 && C.A2 < 0)) throw ValidationError("the Exis3 system requires A1 < 0 and A2 < 0");
  const std::vector<double> X0 = sample(G0, grid.nv, grid.v0, grid.hv(), "G data");
  const std::vector<double> Y0 = sample(E0, grid.nu, grid.u0, grid.hu(), "E data");
  if (*std::min_element(X0.begin(), X0.end()) <= 0) throw ValidationError("G data must be positive");
  if (*std::min_element(Y0.begin(), Y0.end()) <= 0) throw ValidationError("E data must be positive");
  const double A1 = C.A1, A2 = C.A2, a1 = C.a1, a2 = C.a2;
  const Rhs fx = [=](double G, double E) { return 2.0 * a1 * G * std::sqrt(-A1 * E); };
  const Rhs fy = [=](double E, double G) { return 2.0 * a2 * E * std::sqrt(-A2 * G); };
  GoursatResult r = goursat(grid, X0, Y0, fx, fy, params);

  ExisFields f;
  f.variant = ExisVariant::Exis3;
  f.constants = C;
  f.grid = grid;
  f.G = std::move(r.X);
  f.E = std::move(r.Y);
  f.mu1 = Field2D(grid, std::sqrt(-A1));
  f.mu2 = Field2D(grid, std::sqrt(-A2));
  f.excluded.assign(grid.size(), 0);
  f.sweeps = r.sweeps;
  f.scheme_residual = r.change;
  return f;
}

ExisVariant dispatch_variant(const ExisConstants& C, double mu1, double mu2, double tol) {
  const bool d1 = std::abs(mu1 * mu1 + C.A1) <= tol;
  const bool d2 = std::abs(mu2 * mu2 + C.A2) <= tol;
  if (d1 && d2) return ExisVariant::Exis3;
  if (d1) return ExisVariant::Exis2;
  if (d2) throw ValidationError("mu2^2 + A2 = 0 with mu1^2 + A1 != 0 has no matching variant");
  return ExisVariant::Exis1;
}

MetricGrid assemble_metric(const ExisFields& fields) {
  const Grid2D& g = fields.grid;
  MetricGrid m{fields.E, Field2D(g, 0.0), fields.G, fields.excluded};
  if (m.excluded.empty()) m.excluded.assign(g.size(), 0);
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) {
      if (m.is_excluded(i, j)) continue;
      const double E = m.E(i, j), G = m.G(i, j);
      if (!(E > 0) || !(G > 0) || !std::isfinite(E) || !std::isfinite(G))
        throw NumericalError("metric coefficient is not positive", i, j);
    }
  return m;
}

MetricGrid assemble_metric(const BacklundSolution& sol) { return assemble_metric(exis1_fields(sol)); }

FrameData build_frame_data(const ExisFields& fields) {
  const Grid2D& g = fields.grid;
  const ExisConstants& C = fields.constants;
  const MetricGrid m = assemble_metric(fields);
  FrameData fd(g, C.c1, C.c2);
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) {
      bool bad = false;
      for (int di = -1; di <= 1 && !bad; ++di)
        for (int dj = -1; dj <= 1 && !bad; ++dj) {
          const int ii = i + di, jj = j + dj;
          if (ii >= 0 && jj >= 0 && ii < g.nu && jj < g.nv && m.is_excluded(ii, jj)) bad = true;
        }
      fd.excluded[g.index(i, j)] = bad ? 1 : 0;
    }

  const double s1 = std::sin(2.0 * C.theta1), s2 = std::sin(2.0 * C.theta2);
  const double l1 = std::cos(2.0 * C.theta1), l2 = std::cos(2.0 * C.theta2);
  const Field2D Eu = diff_u(m.E);
  const Field2D Gv = diff_v(m.G);
  Mat2 f;
  f << l1, 0.0, 0.0, l2;
  Mat2 s;
  s << s1 * s1, 0.0, 0.0, s2 * s2;
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) {
      const std::size_t k = g.index(i, j);
      fd.f[k] = f;
      fd.t[k] = -f;
      fd.h[k] = Mat2::Identity();
      fd.s[k] = s;
      if (fd.excluded[k]) continue;
      const double E = m.E(i, j), G = m.G(i, j);
      const double mu1 = fields.mu1(i, j), mu2 = fields.mu2(i, j);
      const double rE = std::sqrt(E), rG = std::sqrt(G);
      fd.g[k] << E, 0.0, 0.0, G;
      fd.gn[k] << s1 * s1 * E, 0.0, 0.0, s2 * s2 * G;

      const double Guu_u = Eu(i, j) / (2.0 * E);   // Gamma^u_uu
      const double Guv_u = C.a2 * mu2 * rG;          // Gamma^u_uv
      const double Guv_v = C.a1 * mu1 * rE;          // Gamma^v_uv
      const double Guu_v = -C.a2 * mu2 * E / rG;     // Gamma^v_uu
      const double Gvv_u = -C.a1 * mu1 * G / rE;     // Gamma^u_vv
      const double Gvv_v = Gv(i, j) / (2.0 * G);     // Gamma^v_vv
      fd.gamma[0][k] << Guu_u, Guv_u, Guv_u, Gvv_u;
      fd.gamma[1][k] << Guu_v, Guv_v, Guv_v, Gvv_v;

      fd.sigma[0][k] << 0.0, 0.0, 0.0, mu1 * G / (s1 * rE);
      fd.sigma[1][k] << mu2 * E / (s2 * rG), 0.0, 0.0, 0.0;

      const double ratio = (s1 * s1 * E) / (s2 * s2 * G);
      fd.omega[0][k] << Guu_u, Guv_u, -Guv_u * ratio, Guv_v;
      fd.omega[1][k] << Guv_u, -Guv_v / ratio, Guv_v, Gvv_v;
    }
  return fd;
}

FrameData frame_data_totally_geodesic(double c1, double c2, const Grid2D& grid) {
  if (!(c1 * c2 > 0)) throw ValidationError("totally geodesic data requires c1 c2 > 0");
  const double K = c1 * c2 / (c1 + c2);
  const double k = std::sqrt(std::abs(K));
  const double lambda = (c2 - c1) / (c1 + c2);
  const double s2 = 1.0 - lambda * lambda;  // sin^2(2 theta)
  FrameData fd(grid, c1, c2);
  for (int i = 0; i < grid.nu; ++i) {
    const double x = k * grid.u(i);
    // G = C(x)^2, G_u / (2G) = k C'(x)/C(x), -G_u/2 = -k C(x) C'(x)
    const double C = K > 0 ? std::cos(x) : std::cosh(x);
    const double dC = K > 0 ? -std::sin(x) : std::sinh(x);
    if (std::abs(C) < 1e-8) throw ValidationError("totally geodesic chart degenerates inside the grid");
    for (int j = 0; j < grid.nv; ++j) {
      const std::size_t n = grid.index(i, j);
      const double G = C * C;
      fd.g[n] << 1.0, 0.0, 0.0, G;
      fd.gn[n] = s2 * fd.g[n];
      fd.f[n] = lambda * Mat2::Identity();
      fd.t[n] = -lambda * Mat2::Identity();
      fd.h[n] = Mat2::Identity();
      fd.s[n] = s2 * Mat2::Identity();
      const double Guv_v = k * dC / C;
      const double Gvv_u = -k * C * dC;
      fd.gamma[0][n] << 0.0, 0.0, 0.0, Gvv_u;
      fd.gamma[1][n] << 0.0, Guv_v, Guv_v, 0.0;
      fd.omega[0][n] = fd.gamma_matrix(n, 0);
      fd.omega[1][n] = fd.gamma_matrix(n, 1);
    }
  }
  return fd;
}

namespace {

/// Coefficients of the structure equations at one node.
struct NodeCoef {
  std::array<Mat2, 2> gam;    // gamma_matrix(i): (m, j) = Gamma^m_ij
  std::array<Mat2, 2> sigma;  // sigma[a](i, j)
  std::array<Mat2, 2> shape;  // S_a on {d_u, d_v}
  std::array<Mat2, 2> omega;  // omega[i](b, a)
  Mat2 gp;                    // g (I + f)/2
  Mat2 gm;                    // g (I - f)/2
  Mat2 hg;                    // h^T gn

  NodeCoef& operator+=(const NodeCoef& o) {
    for (int a = 0; a < 2; ++a) {
      gam[a] += o.gam[a];
      sigma[a] += o.sigma[a];
      shape[a] += o.shape[a];
      omega[a] += o.omega[a];
    }
    gp += o.gp;
    gm += o.gm;
    hg += o.hg;
    return *this;
  }
  NodeCoef scaled(double w) const {
    NodeCoef c = *this;
    for (int a = 0; a < 2; ++a) {
      c.gam[a] *= w;
      c.sigma[a] *= w;
      c.shape[a] *= w;
      c.omega[a] *= w;
    }
    c.gp *= w;
    c.gm *= w;
    c.hg *= w;
    return c;
  }
};

NodeCoef node_coef(const FrameData& fd, std::size_t k) {
  const Mat2 I = Mat2::Identity();
  NodeCoef c;
  for (int a = 0; a < 2; ++a) {
    c.gam[a] = fd.gamma_matrix(k, a);
    c.sigma[a] = fd.sigma[a][k];
    c.shape[a] = fd.shape(k, a);
    c.omega[a] = fd.omega[a][k];
  }
  c.gp = fd.g[k] * (I + fd.f[k]) * 0.5;
  c.gm = fd.g[k] * (I - fd.f[k]) * 0.5;
  c.hg = fd.h[k].transpose() * fd.gn[k];
  return c;
}

NodeCoef interpolate(const std::vector<NodeCoef>& line, double pos) {
  const Lagrange4Weights lw = lagrange4_weights(static_cast<int>(line.size()), pos);
  NodeCoef c = line[lw.k0].scaled(lw.w[0]);
  for (int a = 1; a < 4; ++a) c += line[lw.k0 + a].scaled(lw.w[a]);
  return c;
}

/// Columns: psi, psi_u, psi_v, n_0, n_1.
using State = Eigen::Matrix<double, Eigen::Dynamic, 5>;

State derivative(const ProductSpace& P, const State& S, const NodeCoef& c, int dir) {
  const int d1 = P.dim1();
  const int d2 = P.dim2();
  Vec xh = Vec::Zero(P.ambient_dim());
  Vec yh = Vec::Zero(P.ambient_dim());
  xh.head(d1) = S.col(0).head(d1);
  yh.tail(d2) = S.col(0).tail(d2);
  const double c1 = P.c1(), c2 = P.c2();

  State D(S.rows(), 5);
  D.col(0) = S.col(1 + dir);
  for (int j = 0; j < 2; ++j) {
    Vec v = c.gam[dir](0, j) * S.col(1) + c.gam[dir](1, j) * S.col(2);
    v += c.sigma[0](dir, j) * S.col(3) + c.sigma[1](dir, j) * S.col(4);
    v -= c1 * c.gp(j, dir) * xh + c2 * c.gm(j, dir) * yh;
    D.col(1 + j) = v;
  }
  for (int a = 0; a < 2; ++a) {
    Vec v = -(c.shape[a](0, dir) * S.col(1) + c.shape[a](1, dir) * S.col(2));
    v += c.omega[dir](0, a) * S.col(3) + c.omega[dir](1, a) * S.col(4);
    v += 0.5 * c.hg(dir, a) * (c2 * yh - c1 * xh);
    D.col(3 + a) = v;
  }
  return D;
}

/// Largest relative deviation of the frame from (g, gn, orthogonality, tangency to the product).
double frame_drift(const ProductSpace& P, const State& S, const FrameData& fd, std::size_t k) {
  const Signature& sig = P.signature();
  const Vec psi = S.col(0);
  const Vec xh = P.xi_tilde(psi);
  const Vec yh = P.xi_bar(psi);
  const Mat2& g = fd.g[k];
  const Mat2& gn = fd.gn[k];
  double d = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double sg = std::sqrt(g(a, a) * g(b, b));
      const double sn_ = std::sqrt(gn(a, a) * gn(b, b));
      d = std::max(d, std::abs(inner(sig, S.col(1 + a), S.col(1 + b)) - g(a, b)) / sg);
      d = std::max(d, std::abs(inner(sig, S.col(3 + a), S.col(3 + b)) - gn(a, b)) / sn_);
      d = std::max(d, std::abs(inner(sig, S.col(1 + a), S.col(3 + b))) / std::sqrt(g(a, a) * gn(b, b)));
    }
  }
  const double r1 = P.c1() > 0 ? std::sqrt(P.c1()) : 1.0;
  const double r2 = P.c2() > 0 ? std::sqrt(P.c2()) : 1.0;
  for (int col = 1; col < 5; ++col) {
    const double n = std::sqrt(std::abs(norm_sq(sig, S.col(col))));
    if (n == 0.0) continue;
    d = std::max(d, std::abs(inner(sig, S.col(col), xh)) * r1 / n);
    d = std::max(d, std::abs(inner(sig, S.col(col), yh)) * r2 / n);
  }
  return d;
}

struct MarchOutput {
  std::vector<State> states;
  double drift = 0.0;
};

MarchOutput march(const FrameData& fd, const ProductSpace& P, const State& S0,
                  const std::vector<NodeCoef>& coefs, bool u_first, double drift_tol) {
  const Grid2D& g = fd.grid;
  MarchOutput out;
  out.states.assign(g.size(), State());
  out.states[g.index(0, 0)] = S0;

  auto line_march = [&](int fixed, int dir) {
    const int n = dir == 0 ? g.nu : g.nv;
    const double h = dir == 0 ? g.hu() : g.hv();
    std::vector<NodeCoef> line;
    line.reserve(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m)
      line.push_back(coefs[dir == 0 ? g.index(m, fixed) : g.index(fixed, m)]);
    State S = out.states[dir == 0 ? g.index(0, fixed) : g.index(fixed, 0)];
    for (int m = 0; m + 1 < n; ++m) {
      const NodeCoef cm = interpolate(line, m + 0.5);
      const State k1 = derivative(P, S, line[m], dir);
      const State k2 = derivative(P, S + 0.5 * h * k1, cm, dir);
      const State k3 = derivative(P, S + 0.5 * h * k2, cm, dir);
      const State k4 = derivative(P, S + h * k3, line[m + 1], dir);
      S += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      S.col(0) = P.project(S.col(0));
      const int i = dir == 0 ? m + 1 : fixed;
      const int j = dir == 0 ? fixed : m + 1;
      if (!S.allFinite()) throw NumericalError("reconstruction produced a non-finite frame", i, j);
      const double d = frame_drift(P, S, fd, g.index(i, j));
      out.drift = std::max(out.drift, d);
      if (d > drift_tol) {
        std::ostringstream os;
        os << "frame orthonormality drift " << d << " exceeds " << drift_tol;
        throw NumericalError(os.str(), i, j);
      }
      out.states[g.index(i, j)] = S;
    }
  };
  if (u_first) {
    line_march(0, 0);
    for (int i = 0; i < g.nu; ++i) line_march(i, 1);
  } else {
    line_march(0, 1);
    for (int j = 0; j < g.nv; ++j) line_march(j, 0);
  }
  return out;
}

}  // namespace

InitialFrame initial_frame(const FrameData& fd, const ProductSpace& P, int i, int j) {
  if (!(P.c1() > 0 && P.c2() > 0)) throw ValidationError("reconstruction requires positive curvatures");
  if (i < 0 || j < 0 || i >= fd.grid.nu || j >= fd.grid.nv) throw ValidationError("base node outside the grid");
  const std::size_t k = fd.grid.index(i, j);
  const AnglePair ang = angle_functions(fd.f[k], fd.g[k]);
  const int dim = P.ambient_dim();
  auto unit = [&](int c) { return Vec(Vec::Unit(dim, c)); };
  // a_1, a_2 span T M1 at (0,0,1)/sqrt(c1); b_1, b_2 span T M2 at (0,0,1)/sqrt(c2).
  const std::array<double, 2> th{ang.theta1, ang.theta2};
  std::array<Vec, 2> e;
  for (int m = 0; m < 2; ++m) e[m] = std::cos(th[m]) * unit(m) + std::sin(th[m]) * unit(3 + m);

  InitialFrame fr;
  fr.psi = Vec::Zero(dim);
  fr.psi[2] = 1.0 / std::sqrt(P.c1());
  fr.psi[5] = 1.0 / std::sqrt(P.c2());
  const Mat2 Einv = ang.eig.vectors.inverse();
  const std::array<Vec, 2> d{Einv(0, 0) * e[0] + Einv(1, 0) * e[1], Einv(0, 1) * e[0] + Einv(1, 1) * e[1]};
  fr.psi_u = d[0];
  fr.psi_v = d[1];
  const Mat2& f = fd.f[k];
  std::array<Vec, 2> hd;
  for (int c = 0; c < 2; ++c) hd[c] = apply_F(P, d[c]) - f(0, c) * d[0] - f(1, c) * d[1];
  const Mat2& h = fd.h[k];
  if (std::abs(h.determinant()) < 1e-12) throw ValidationError("h is singular at the base node");
  const Mat2 hinv = h.inverse();
  for (int a = 0; a < 2; ++a) fr.normals[a] = hinv(0, a) * hd[0] + hinv(1, a) * hd[1];
  return fr;
}

ReconstructResult reconstruct_immersion(const FrameData& fd, const ProductSpace& P,
                                        const ReconstructOptions& opts) {
  if (!(P.c1() > 0 && P.c2() > 0)) throw ValidationError("reconstruction requires positive curvatures");
  if (P.c1() != fd.c1 || P.c2() != fd.c2)
    throw ValidationError("frame data and product space disagree on the curvatures");
  const Grid2D& g = fd.grid;
  if (g.nu < 4 || g.nv < 4) throw ValidationError("reconstruction needs at least 4x4 nodes");
  if (std::count(fd.excluded.begin(), fd.excluded.end(), 1) > 0)
    throw ValidationError("frame data has excluded nodes; reconstruction needs every node");

  const InitialFrame fr = opts.initial ? *opts.initial : initial_frame(fd, P);
  const int dim = P.ambient_dim();
  for (const Vec* v : {&fr.psi, &fr.psi_u, &fr.psi_v, &fr.normals[0], &fr.normals[1]})
    if (v->size() != dim) throw ValidationError("initial frame has the wrong dimension");
  if (!P.on_quadrics(fr.psi, 1e-10)) throw ValidationError("initial point is not on both quadrics");
  State S0(dim, 5);
  S0 << fr.psi, fr.psi_u, fr.psi_v, fr.normals[0], fr.normals[1];
  {
    const std::size_t k0 = g.index(0, 0);
    const Signature& sig = P.signature();
    double dev = frame_drift(P, S0, fd, k0);
    const std::array<Vec, 2> d{fr.psi_u, fr.psi_v};
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) {
        const Vec Fd = apply_F(P, d[c]);
        const double sg = std::sqrt(fd.g[k0](a, a) * fd.g[k0](c, c));
        dev = std::max(dev, std::abs(inner(sig, d[a], Fd) - (fd.g[k0] * fd.f[k0])(a, c)) / sg);
        const double sh = std::sqrt(fd.gn[k0](a, a) * fd.g[k0](c, c));
        dev = std::max(dev, std::abs(inner(sig, Fd, fr.normals[a]) - (fd.gn[k0] * fd.h[k0])(a, c)) / sh);
      }
    if (dev > 1e-10) {
      std::ostringstream os;
      os << "initial frame is inconsistent with the frame data (deviation " << dev << ")";
      throw ValidationError(os.str());
    }
  }

  std::vector<NodeCoef> coefs;
  coefs.reserve(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) coefs.push_back(node_coef(fd, k));

  const MarchOutput A = march(fd, P, S0, coefs, true, opts.drift_tol);
  const MarchOutput B = march(fd, P, S0, coefs, false, opts.drift_tol);

  ReconstructResult res{ImmersionGrid(P, g), Field2D(g), 0.0, 0.0, 0.0, 0.0};
  ImmersionGrid& im = res.immersion;
  const Signature& sig = P.signature();
  res.frame_drift_max = std::max(A.drift, B.drift);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const State& S = A.states[k];
    im.psi.push_back(S.col(0));
    im.psi_u.push_back(S.col(1));
    im.psi_v.push_back(S.col(2));
    const State Du = derivative(P, S, coefs[k], 0);
    const State Dv = derivative(P, S, coefs[k], 1);
    im.psi_uu.push_back(Du.col(1));
    im.psi_uv.push_back(Du.col(2));
    im.psi_vv.push_back(Dv.col(2));
    res.commutation_defect = std::max(res.commutation_defect, (S - B.states[k]).cwiseAbs().maxCoeff());
    res.quadric_max_defect = std::max(res.quadric_max_defect, P.quadric_defect(S.col(0)));

    const Mat2& gm = fd.g[k];
    const double E = inner(sig, S.col(1), S.col(1));
    const double F = inner(sig, S.col(1), S.col(2));
    const double G = inner(sig, S.col(2), S.col(2));
    const double err = std::max({std::abs(E - gm(0, 0)) / gm(0, 0), std::abs(G - gm(1, 1)) / gm(1, 1),
                                 std::abs(F - gm(0, 1)) / std::sqrt(gm(0, 0) * gm(1, 1))});
    res.metric_rel_err.data()[k] = err;
    res.metric_max_rel_err = std::max(res.metric_max_rel_err, err);
  }
  im.analytic = false;
  im.family.name = "reconstructed";
  const AnglePair ang = angle_functions(fd.f[0], fd.g[0]);
  im.family.theta1 = ang.theta1;
  im.family.theta2 = ang.theta2;
  return res;
}

}  // namespace casurf
