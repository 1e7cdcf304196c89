#include "rtswe/newton.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace rtswe {

int gmres(const std::function<void(const Vector&, Vector&)>& apply, const Vector& b, Vector& x,
          int restart, int max_iter, double rtol) {
  const Index n = b.size();
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero(n);
    return 0;
  }
  const double target = rtol * bnorm;
  restart = std::max(1, restart);

  Matrix basis(n, restart + 1);
  Matrix hess = Matrix::Zero(restart + 1, restart);
  Vector cs(restart), sn(restart), rhs(restart + 1);
  Vector r(n), w(n);

  int total = 0;
  while (total < max_iter) {
    apply(x, r);
    r = b - r;
    double beta = r.norm();
    if (beta <= target) break;

    basis.col(0) = r / beta;
    rhs.setZero();
    rhs(0) = beta;
    hess.setZero();

    int k = 0;
    for (; k < restart && total < max_iter; ++k, ++total) {
      apply(basis.col(k), w);
      for (int i = 0; i <= k; ++i) {
        hess(i, k) = w.dot(basis.col(i));
        w.noalias() -= hess(i, k) * basis.col(i);
      }
      hess(k + 1, k) = w.norm();
      if (hess(k + 1, k) > 0.0) basis.col(k + 1) = w / hess(k + 1, k);

      for (int i = 0; i < k; ++i) {
        const double t = cs(i) * hess(i, k) + sn(i) * hess(i + 1, k);
        hess(i + 1, k) = -sn(i) * hess(i, k) + cs(i) * hess(i + 1, k);
        hess(i, k) = t;
      }
      const double denom = std::hypot(hess(k, k), hess(k + 1, k));
      cs(k) = hess(k, k) / denom;
      sn(k) = hess(k + 1, k) / denom;
      hess(k, k) = denom;
      hess(k + 1, k) = 0.0;
      rhs(k + 1) = -sn(k) * rhs(k);
      rhs(k) = cs(k) * rhs(k);

      if (std::abs(rhs(k + 1)) <= target) {
        ++k;
        ++total;
        break;
      }
    }
    // Back substitution on the k x k triangular system.
    Vector y = hess.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(rhs.head(k));
    x.noalias() += basis.leftCols(k) * y;
    if (std::abs(rhs(k)) <= target) break;
  }
  return total;
}

namespace {

double rounding_floor(const Vector& x) {
  return 16.0 * std::numeric_limits<double>::epsilon() * x.lpNorm<Eigen::Infinity>();
}

}  // namespace

NewtonResult newton_solve(const ResidualFn& residual, Vector x0, const NewtonConfig& cfg,
                          DenseJacobianCache* cache) {
  const Index n = x0.size();
  NewtonResult out;
  out.x = std::move(x0);
  Vector r(n), rp(n), step(n), xp(n);
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  DenseJacobianCache local;
  double previous = std::numeric_limits<double>::infinity();
  bool fresh = false;

  for (int it = 0;; ++it) {
    residual(out.x, r);
    out.residual = r.lpNorm<Eigen::Infinity>();
    out.iterations = it;
    if (!std::isfinite(out.residual)) {
      throw NumericError("Newton residual is not finite");
    }
    if (out.residual <= std::max(cfg.tol, rounding_floor(out.x))) return out;
    if (it >= cfg.max_iter) {
      std::ostringstream msg;
      msg << "Newton did not converge in " << cfg.max_iter << " iterations (residual "
          << out.residual << ")";
      throw NewtonError(msg.str(), out.residual, it);
    }

    if (cfg.solver == LinearSolver::dense) {
      DenseJacobianCache& jc = cache ? *cache : local;
      const bool slow = out.residual > jc.refresh_ratio * previous;
      if (!cache || !jc.valid || (slow && !fresh)) {
        Matrix jac(n, n);
        for (Index j = 0; j < n; ++j) {
          const double h = sqrt_eps * std::max(1.0, std::abs(out.x(j)));
          xp = out.x;
          xp(j) += h;
          residual(xp, rp);
          jac.col(j) = (rp - r) / (xp(j) - out.x(j));
        }
        jc.lu.compute(jac);
        jc.valid = true;
        ++jc.refreshes;
        fresh = true;
      } else {
        fresh = false;
      }
      step = jc.lu.solve(-r);
      previous = out.residual;
    } else {
      const double xnorm = out.x.norm();
      auto jv = [&](const Vector& v, Vector& y) {
        const double vnorm = v.norm();
        if (vnorm == 0.0) {
          y.setZero(n);
          return;
        }
        const double h = std::sqrt(std::numeric_limits<double>::epsilon() * (1.0 + xnorm)) / vnorm;
        xp = out.x + h * v;
        residual(xp, rp);
        y = (rp - r) / h;
      };
      step.setZero(n);
      gmres(jv, -r, step, cfg.gmres_restart, cfg.gmres_max_iter, cfg.gmres_rtol);
    }
    out.x += step;
  }
}

}  // namespace rtswe
