#pragma once

// Abstract surface data (metric, second fundamental form, connections and the
// tensors f, h, s, t) sampled on a grid, in the coordinate basis {d_u, d_v}
// and a normal basis {xi_0, xi_1}.

#include "casurf/grid.hpp"
#include "casurf/product.hpp"

#include <array>
#include <vector>

namespace casurf {

/// Index conventions (k is the node):
///   gamma[m][k](i, j) = Christoffel symbol Gamma^m_ij
///   omega[i][k](b, a) = xi_b-component of nabla-perp_{d_i} xi_a
///   sigma[a][k](i, j) = xi_a-component of sigma(d_i, d_j)
///   f(i, j), s(i, b) coordinates of f d_j, s xi_b; h(a, j), t(a, b) likewise.
struct FrameData {
  Grid2D grid;
  double c1 = 0.0;
  double c2 = 0.0;
  std::vector<Mat2> g;
  std::vector<Mat2> gn;
  std::array<std::vector<Mat2>, 2> sigma;
  std::array<std::vector<Mat2>, 2> gamma;
  std::array<std::vector<Mat2>, 2> omega;
  std::vector<Mat2> f;
  std::vector<Mat2> h;
  std::vector<Mat2> s;
  std::vector<Mat2> t;
  std::vector<unsigned char> excluded;

  /// Allocates every field with zeros.
  FrameData(const Grid2D& grid_, double c1_, double c2_);

  bool is_excluded(int i, int j) const { return !excluded.empty() && excluded[grid.index(i, j)] != 0; }
  /// Christoffel matrix Gamma_i with (Gamma_i)(m, j) = Gamma^m_ij.
  Mat2 gamma_matrix(std::size_t k, int i) const;
  /// sigma(d_i, d_j) as a normal coordinate vector.
  Eigen::Vector2d sigma_vec(std::size_t k, int i, int j) const;
  /// Shape operator S_{xi_a} as a matrix on {d_u, d_v}.
  Mat2 shape(std::size_t k, int a) const;
};

}  // namespace casurf
