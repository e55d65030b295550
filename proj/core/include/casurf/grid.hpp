#pragma once

// Uniform (u,v) parameter grids, scalar fields on them and second-order
// finite-difference stencils.

#include <cstddef>
#include <vector>

namespace casurf {

/// Uniform tensor grid: nodes u_i = u0 + i*hu (i < nu), v_j = v0 + j*hv (j < nv).
struct Grid2D {
  int nu = 0;
  int nv = 0;
  double u0 = 0.0;
  double u1 = 1.0;
  double v0 = 0.0;
  double v1 = 1.0;

  /// Throws ValidationError unless nu, nv >= 2 and the ranges are non-empty.
  static Grid2D make(int nu, int nv, double u0, double u1, double v0, double v1);

  double hu() const { return (u1 - u0) / (nu - 1); }
  double hv() const { return (v1 - v0) / (nv - 1); }
  double u(int i) const { return u0 + i * hu(); }
  double v(int j) const { return v0 + j * hv(); }
  std::size_t size() const { return static_cast<std::size_t>(nu) * static_cast<std::size_t>(nv); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(nv) + static_cast<std::size_t>(j);
  }
  bool interior(int i, int j, int margin = 1) const {
    return i >= margin && j >= margin && i < nu - margin && j < nv - margin;
  }
  /// Same grid with the number of intervals doubled in both directions.
  Grid2D refined() const;

  bool operator==(const Grid2D&) const = default;
};

/// Real-valued field sampled on a Grid2D (row-major in i, then j).
class Field2D {
 public:
  Field2D() = default;
  explicit Field2D(const Grid2D& g, double fill = 0.0) : grid_(g), data_(g.size(), fill) {}

  const Grid2D& grid() const { return grid_; }
  double& operator()(int i, int j) { return data_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return data_[grid_.index(i, j)]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }
  bool empty() const { return data_.empty(); }

 private:
  Grid2D grid_{};
  std::vector<double> data_;
};

/// Second-order first derivatives (central inside, one-sided at the ends).
Field2D diff_u(const Field2D& f);
Field2D diff_v(const Field2D& f);
/// Second-order second derivatives. Mixed uses the 4-point cross stencil
/// inside and composed one-sided differences on the boundary.
Field2D diff_uu(const Field2D& f);
Field2D diff_vv(const Field2D& f);
Field2D diff_uv(const Field2D& f);

/// Four-point Lagrange interpolation of samples y_k at x = x0 + k*h,
/// evaluated at fractional position `pos` (in units of h from x0).
double lagrange4(const std::vector<double>& y, double pos);

/// Stencil start and weights used by lagrange4 for n samples (n >= 4).
struct Lagrange4Weights {
  int k0 = 0;
  double w[4] = {0.0, 0.0, 0.0, 0.0};
};
Lagrange4Weights lagrange4_weights(int n, double pos);

/// Diagonal or general first fundamental form fields.
struct MetricGrid {
  Field2D E;
  Field2D F;
  Field2D G;
  /// Nodes excluded from every downstream computation (degenerate metric,
  /// singular Backlund fields...). Empty means none.
  std::vector<unsigned char> excluded;

  const Grid2D& grid() const { return E.grid(); }
  bool is_excluded(int i, int j) const {
    return !excluded.empty() && excluded[grid().index(i, j)] != 0;
  }
};

}  // namespace casurf
