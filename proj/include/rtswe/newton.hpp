#pragma once

#include <functional>

#include "rtswe/types.hpp"

namespace rtswe {

enum class LinearSolver {
  /// Matrix-free restarted GMRES on finite-difference directional derivatives.
  krylov,
  /// Dense finite-difference Jacobian factorized with partial-pivoting LU.
  dense,
};

struct NewtonConfig {
  double tol = 1e-11;  ///< infinity-norm of the residual
  int max_iter = 50;
  LinearSolver solver = LinearSolver::krylov;
  int gmres_restart = 50;
  int gmres_max_iter = 400;
  double gmres_rtol = 1e-6;  ///< forcing term of the inexact Newton step
};

/// Residual callback: fills r = R(x). May throw NumericError.
using ResidualFn = std::function<void(const Vector& x, Vector& r)>;

struct NewtonResult {
  Vector x;
  int iterations = 0;
  double residual = 0.0;
};

/// LU of a dense finite-difference Jacobian kept across solves. With a cache
/// the dense solver runs a chord iteration and refreshes the factorization
/// only when the residual contracts by less than refresh_ratio per iteration.
struct DenseJacobianCache {
  Eigen::PartialPivLU<Matrix> lu;
  bool valid = false;
  double refresh_ratio = 0.25;
  int refreshes = 0;
};

/// Solve R(x) = 0 starting from x0.
///
/// Convergence is declared when |R|_inf <= max(tol, 16 eps |x|_inf); the second
/// term is the rounding floor of a residual of the form x - x0 - dt*f.
/// Throws NewtonError after max_iter iterations.
NewtonResult newton_solve(const ResidualFn& residual, Vector x0, const NewtonConfig& cfg,
                          DenseJacobianCache* cache = nullptr);

/// Restarted GMRES(m) for A x = b with a matrix-free operator. x holds the
/// initial guess on entry. Returns the number of inner iterations used.
int gmres(const std::function<void(const Vector&, Vector&)>& apply, const Vector& b, Vector& x,
          int restart, int max_iter, double rtol);

}  // namespace rtswe
