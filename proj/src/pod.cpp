#include "rtswe/pod.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "parallel.hpp"

namespace rtswe {

SnapshotSet collect_snapshots(const Matrix& trajectory) {
  if (trajectory.cols() < 2) {
    throw ConfigError("snapshot collection needs at least one state after the initial one");
  }
  if (trajectory.rows() == 0 || trajectory.rows() % 4 != 0) {
    throw ConfigError("trajectory rows must be a positive multiple of 4");
  }
  const Index N = trajectory.rows() / 4;
  const Index K = trajectory.cols() - 1;
  SnapshotSet out;
  for (Var w : kAllVars) {
    const auto rows = trajectory.block(idx(w) * N, 1, N, K);
    out.mean[idx(w)] = rows.rowwise().sum() / static_cast<double>(K);
    out.S[idx(w)] = rows.colwise() - out.mean[idx(w)];
  }
  return out;
}

int truncate_rank(const Vector& spectrum, double kappa) {
  if (spectrum.size() == 0) throw ConfigError("empty singular value spectrum");
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw ConfigError("energy tolerance kappa must lie in (0, 1)");
  }
  for (Index j = 1; j < spectrum.size(); ++j) {
    if (spectrum(j) > spectrum(j - 1)) throw ConfigError("spectrum must be nonincreasing");
  }
  const double total = spectrum.squaredNorm();
  if (!(total > 0.0)) throw NumericError("all singular values are zero");
  double partial = 0.0;
  for (Index j = 0; j < spectrum.size(); ++j) {
    partial += spectrum(j) * spectrum(j);
    if (partial / total > 1.0 - kappa) return static_cast<int>(j + 1);
  }
  return static_cast<int>(spectrum.size());
}

void thin_svd(const Matrix& S, Matrix& U, Vector& sigma) {
  Eigen::BDCSVD<Matrix> svd(S, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success) throw NumericError("SVD did not converge");
  U = svd.matrixU();
  sigma = svd.singularValues();
  for (Index c = 0; c < U.cols(); ++c) {
    Index imax = 0;
    U.col(c).cwiseAbs().maxCoeff(&imax);
    if (U(imax, c) < 0.0) U.col(c) = -U.col(c);
  }
}

PodBasis build_pod_basis(const SnapshotSet& snapshots, double kappa, std::optional<int> r_override,
                         int threads) {
  const Index N = snapshots.N();
  const Index K = snapshots.K();
  if (K < 1 || N < 1) throw ConfigError("empty snapshot set");
  for (Var w : kAllVars) {
    if (snapshots.S[idx(w)].rows() != N || snapshots.S[idx(w)].cols() != K) {
      throw ConfigError("snapshot matrices must share dimensions");
    }
  }

  PodBasis basis;
  std::array<Matrix, 4> U;
  detail::parallel_for(4, threads, [&](int i) {
    thin_svd(snapshots.S[i], U[i], basis.sigma[i]);
  });

  const Index available = std::min(N, K);
  for (int i = 0; i < 4; ++i) basis.criterion_rank[i] = truncate_rank(basis.sigma[i], kappa);

  int r = 0;
  if (r_override) {
    r = *r_override;
    if (r < 1 || r > available) {
      throw ConfigError("POD rank override " + std::to_string(r) + " outside [1, " +
                        std::to_string(available) + "]");
    }
  } else {
    for (int i = 0; i < 4; ++i) r = std::max(r, basis.criterion_rank[i]);
  }
  basis.r = r;
  for (int i = 0; i < 4; ++i) {
    basis.V[i] = U[i].leftCols(r);
    basis.mean[i] = snapshots.mean[i];
  }
  return basis;
}

Vector lift(const PodBasis& basis, const Vector& reduced) {
  const Index N = basis.N();
  const int r = basis.r;
  if (reduced.size() != 4 * r) {
    throw ConfigError("reduced vector length " + std::to_string(reduced.size()) +
                      " does not match 4r = " + std::to_string(4 * r));
  }
  Vector z(4 * N);
  for (int i = 0; i < 4; ++i) {
    z.segment(i * N, N) = basis.mean[i];
    z.segment(i * N, N).noalias() += basis.V[i] * reduced.segment(i * r, r);
  }
  return z;
}

Vector restrict_state(const PodBasis& basis, const Vector& z) {
  const Index N = basis.N();
  const int r = basis.r;
  if (z.size() != 4 * N) {
    throw ConfigError("state length " + std::to_string(z.size()) + " does not match 4N = " +
                      std::to_string(4 * N));
  }
  Vector out(4 * r);
  for (int i = 0; i < 4; ++i) {
    out.segment(i * r, r).noalias() = basis.V[i].transpose() * (z.segment(i * N, N) - basis.mean[i]);
  }
  return out;
}

Matrix lift_trajectory(const PodBasis& basis, const Matrix& coefficients) {
  const Index N = basis.N();
  const int r = basis.r;
  if (coefficients.rows() != 4 * r) throw ConfigError("coefficient rows must equal 4r");
  Matrix out(4 * N, coefficients.cols());
  for (int i = 0; i < 4; ++i) {
    out.middleRows(i * N, N).noalias() = basis.V[i] * coefficients.middleRows(i * r, r);
    out.middleRows(i * N, N).colwise() += basis.mean[i];
  }
  return out;
}

}  // namespace rtswe
