#include "casurf/frame_data.hpp"

namespace casurf {

FrameData::FrameData(const Grid2D& grid_, double c1_, double c2_) : grid(grid_), c1(c1_), c2(c2_) {
  const std::size_t n = grid.size();
  const Mat2 z = Mat2::Zero();
  g.assign(n, Mat2::Identity());
  gn.assign(n, Mat2::Identity());
  for (int a = 0; a < 2; ++a) {
    sigma[a].assign(n, z);
    gamma[a].assign(n, z);
    omega[a].assign(n, z);
  }
  f.assign(n, z);
  h.assign(n, z);
  s.assign(n, z);
  t.assign(n, z);
  excluded.assign(n, 0);
}

Mat2 FrameData::gamma_matrix(std::size_t k, int i) const {
  Mat2 G;
  for (int m = 0; m < 2; ++m)
    for (int j = 0; j < 2; ++j) G(m, j) = gamma[m][k](i, j);
  return G;
}

Eigen::Vector2d FrameData::sigma_vec(std::size_t k, int i, int j) const {
  return {sigma[0][k](i, j), sigma[1][k](i, j)};
}

Mat2 FrameData::shape(std::size_t k, int a) const {
  // g(S_a d_i, d_l) = g~(sigma(d_i, d_l), xi_a)
  Mat2 M;
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < 2; ++i) M(l, i) = sigma[0][k](i, l) * gn[k](0, a) + sigma[1][k](i, l) * gn[k](1, a);
  return g[k].inverse() * M;
}

}  // namespace casurf
