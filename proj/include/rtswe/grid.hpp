#pragma once

#include "rtswe/types.hpp"

namespace rtswe {

/// Uniform doubly periodic mesh on [x0, x0+lx) x [y0, y0+ly).
///
/// Nodes are x_i = x0 + i*dx, y_j = y0 + j*dy for i, j = 0..n-1; the duplicate
/// periodic nodes on the right and top edges are not stored. Vectorized fields
/// use the ordering k = i*n + j, i.e. the y index runs fastest.
struct Grid {
  int n = 0;
  double lx = 0.0;
  double ly = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  Index N = 0;

  double x(int i) const { return x0 + i * dx; }
  double y(int j) const { return y0 + j * dy; }
  double cell_area() const { return dx * dy; }

  Index index(int i, int j) const { return static_cast<Index>(i) * n + j; }

  /// Periodic neighbours of flat index k along x (i +/- 1) and y (j +/- 1).
  Index east(Index k) const;
  Index west(Index k) const;
  Index north(Index k) const;
  Index south(Index k) const;
};

/// Throws ConfigError for n < 3 or nonpositive extents.
Grid build_grid(int n, double lx, double ly, double x0 = 0.0, double y0 = 0.0);

/// Centered periodic first-derivative operators,
/// Dx = (D_n kron I_n) / (2 dx) and Dy = (I_n kron D_n) / (2 dy).
struct DiffOps {
  Grid grid;
  SparseMatrix dx;
  SparseMatrix dy;
};

DiffOps build_diff_ops(const Grid& grid);

/// Matrix-free stencil application; equals ops.dx * w.
Vector apply_dx(const DiffOps& ops, const Vector& w);
Vector apply_dy(const DiffOps& ops, const Vector& w);

// In-place variants used on the hot path; `out` must not alias `w`.
void apply_dx(const DiffOps& ops, Eigen::Ref<const Vector> w, Eigen::Ref<Vector> out);
void apply_dy(const DiffOps& ops, Eigen::Ref<const Vector> w, Eigen::Ref<Vector> out);

}  // namespace rtswe
