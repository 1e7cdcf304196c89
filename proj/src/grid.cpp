#include "rtswe/grid.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace rtswe {

Index Grid::east(Index k) const {
  const Index i = k / n;
  return (i + 1 == n) ? k - static_cast<Index>(n - 1) * n : k + n;
}

Index Grid::west(Index k) const {
  const Index i = k / n;
  return (i == 0) ? k + static_cast<Index>(n - 1) * n : k - n;
}

Index Grid::north(Index k) const {
  const Index j = k % n;
  return (j + 1 == n) ? k - (n - 1) : k + 1;
}

Index Grid::south(Index k) const {
  const Index j = k % n;
  return (j == 0) ? k + (n - 1) : k - 1;
}

Grid build_grid(int n, double lx, double ly, double x0, double y0) {
  if (n < 3) {
    throw ConfigError("grid needs at least 3 points per side, got n=" + std::to_string(n));
  }
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw ConfigError("grid extents must be positive and finite");
  }
  Grid g;
  g.n = n;
  g.lx = lx;
  g.ly = ly;
  g.x0 = x0;
  g.y0 = y0;
  g.dx = lx / n;
  g.dy = ly / n;
  g.N = static_cast<Index>(n) * n;
  return g;
}

DiffOps build_diff_ops(const Grid& grid) {
  const Index N = grid.N;
  std::vector<Eigen::Triplet<double>> tx, ty;
  tx.reserve(2 * N);
  ty.reserve(2 * N);
  const double cx = 1.0 / (2.0 * grid.dx);
  const double cy = 1.0 / (2.0 * grid.dy);
  for (Index k = 0; k < N; ++k) {
    tx.emplace_back(k, grid.east(k), cx);
    tx.emplace_back(k, grid.west(k), -cx);
    ty.emplace_back(k, grid.north(k), cy);
    ty.emplace_back(k, grid.south(k), -cy);
  }
  DiffOps ops;
  ops.grid = grid;
  ops.dx.resize(N, N);
  ops.dy.resize(N, N);
  ops.dx.setFromTriplets(tx.begin(), tx.end());
  ops.dy.setFromTriplets(ty.begin(), ty.end());
  ops.dx.makeCompressed();
  ops.dy.makeCompressed();
  return ops;
}

namespace {

void check_length(const DiffOps& ops, Index len) {
  if (len != ops.grid.N) {
    throw ConfigError("field length " + std::to_string(len) + " does not match grid size " +
                      std::to_string(ops.grid.N));
  }
}

}  // namespace

void apply_dx(const DiffOps& ops, Eigen::Ref<const Vector> w, Eigen::Ref<Vector> out) {
  check_length(ops, w.size());
  check_length(ops, out.size());
  const int n = ops.grid.n;
  const double c = 1.0 / (2.0 * ops.grid.dx);
  // Rows i of the (i, j) layout are contiguous blocks of length n.
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1 == n) ? 0 : i + 1;
    const int im = (i == 0) ? n - 1 : i - 1;
    out.segment(static_cast<Index>(i) * n, n) =
        c * (w.segment(static_cast<Index>(ip) * n, n) - w.segment(static_cast<Index>(im) * n, n));
  }
}

void apply_dy(const DiffOps& ops, Eigen::Ref<const Vector> w, Eigen::Ref<Vector> out) {
  check_length(ops, w.size());
  check_length(ops, out.size());
  const int n = ops.grid.n;
  const double c = 1.0 / (2.0 * ops.grid.dy);
  for (int i = 0; i < n; ++i) {
    const double* src = w.data() + static_cast<Index>(i) * n;
    double* dst = out.data() + static_cast<Index>(i) * n;
    dst[0] = c * (src[1] - src[n - 1]);
    for (int j = 1; j + 1 < n; ++j) dst[j] = c * (src[j + 1] - src[j - 1]);
    dst[n - 1] = c * (src[0] - src[n - 2]);
  }
}

Vector apply_dx(const DiffOps& ops, const Vector& w) {
  Vector out(w.size());
  apply_dx(ops, w, out);
  return out;
}

Vector apply_dy(const DiffOps& ops, const Vector& w) {
  Vector out(w.size());
  apply_dy(ops, w, out);
  return out;
}

}  // namespace rtswe
