#include "casurf/grid.hpp"

#include "casurf/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace casurf {

Grid2D Grid2D::make(int nu, int nv, double u0, double u1, double v0, double v1) {
  if (nu < 2 || nv < 2) throw ValidationError("grid needs at least 2 nodes per direction");
  if (!(u1 > u0) || !(v1 > v0)) throw ValidationError("grid ranges must be increasing");
  if (!std::isfinite(u0 + u1 + v0 + v1)) throw ValidationError("grid ranges must be finite");
  return Grid2D{nu, nv, u0, u1, v0, v1};
}

Grid2D Grid2D::refined() const {
  return Grid2D{2 * (nu - 1) + 1, 2 * (nv - 1) + 1, u0, u1, v0, v1};
}

namespace {

// Applies a 1-D stencil along every line of the field. `along_u` selects the
// direction; the callback receives the sample accessor, line length and index.
Field2D apply_lines(const Field2D& f, bool along_u,
                    const std::function<double(const std::function<double(int)>&, int, int)>& stencil) {
  const Grid2D& g = f.grid();
  Field2D out(g);
  if (along_u) {
    for (int j = 0; j < g.nv; ++j) {
      auto y = [&](int k) { return f(k, j); };
      for (int i = 0; i < g.nu; ++i) out(i, j) = stencil(y, g.nu, i);
    }
  } else {
    for (int i = 0; i < g.nu; ++i) {
      auto y = [&](int k) { return f(i, k); };
      for (int j = 0; j < g.nv; ++j) out(i, j) = stencil(y, g.nv, j);
    }
  }
  return out;
}

double d1(const std::function<double(int)>& y, int n, int k, double h) {
  if (n < 3) return (y(1) - y(0)) / h;
  if (k == 0) return (-3.0 * y(0) + 4.0 * y(1) - y(2)) / (2.0 * h);
  if (k == n - 1) return (3.0 * y(n - 1) - 4.0 * y(n - 2) + y(n - 3)) / (2.0 * h);
  return (y(k + 1) - y(k - 1)) / (2.0 * h);
}

double d2(const std::function<double(int)>& y, int n, int k, double h) {
  if (n < 3) return 0.0;
  if (n == 3) return (y(0) - 2.0 * y(1) + y(2)) / (h * h);
  if (k == 0) return (2.0 * y(0) - 5.0 * y(1) + 4.0 * y(2) - y(3)) / (h * h);
  if (k == n - 1) return (2.0 * y(n - 1) - 5.0 * y(n - 2) + 4.0 * y(n - 3) - y(n - 4)) / (h * h);
  return (y(k + 1) - 2.0 * y(k) + y(k - 1)) / (h * h);
}

}  // namespace

Field2D diff_u(const Field2D& f) {
  const double h = f.grid().hu();
  return apply_lines(f, true, [h](const auto& y, int n, int k) { return d1(y, n, k, h); });
}

Field2D diff_v(const Field2D& f) {
  const double h = f.grid().hv();
  return apply_lines(f, false, [h](const auto& y, int n, int k) { return d1(y, n, k, h); });
}

Field2D diff_uu(const Field2D& f) {
  const double h = f.grid().hu();
  return apply_lines(f, true, [h](const auto& y, int n, int k) { return d2(y, n, k, h); });
}

Field2D diff_vv(const Field2D& f) {
  const double h = f.grid().hv();
  return apply_lines(f, false, [h](const auto& y, int n, int k) { return d2(y, n, k, h); });
}

Field2D diff_uv(const Field2D& f) {
  const Grid2D& g = f.grid();
  Field2D out = diff_u(diff_v(f));
  const double denom = 4.0 * g.hu() * g.hv();
  for (int i = 1; i + 1 < g.nu; ++i)
    for (int j = 1; j + 1 < g.nv; ++j)
      out(i, j) = (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) / denom;
  return out;
}

double lagrange4(const std::vector<double>& y, double pos) {
  const int n = static_cast<int>(y.size());
  if (n == 0) throw ValidationError("lagrange4: empty sample vector");
  if (n == 1) return y[0];
  if (n < 4) {
    int k = std::clamp(static_cast<int>(std::floor(pos)), 0, n - 2);
    const double t = pos - k;
    return (1.0 - t) * y[static_cast<std::size_t>(k)] + t * y[static_cast<std::size_t>(k + 1)];
  }
  const Lagrange4Weights lw = lagrange4_weights(n, pos);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) acc += lw.w[a] * y[static_cast<std::size_t>(lw.k0 + a)];
  return acc;
}

Lagrange4Weights lagrange4_weights(int n, double pos) {
  if (n < 4) throw ValidationError("lagrange4: need at least 4 samples");
  Lagrange4Weights lw;
  lw.k0 = std::clamp(static_cast<int>(std::floor(pos)) - 1, 0, n - 4);
  const double x = pos - lw.k0;  // nodes at 0,1,2,3
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (x - b) / static_cast<double>(a - b);
    lw.w[a] = w;
  }
  return lw;
}

}  // namespace casurf
