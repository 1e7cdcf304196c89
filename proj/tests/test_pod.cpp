#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rtswe/pod.hpp"

using namespace rtswe;

namespace {

/// Random trajectory with a prescribed decaying spectrum in each block.
Matrix synthetic_trajectory(Index N, int K, unsigned seed) {
  std::srand(seed);
  Matrix traj(4 * N, K + 1);
  for (int w = 0; w < 4; ++w) {
    const Matrix modes = Matrix::Random(N, 6);
    Matrix amps = Matrix::Random(6, K + 1);
    for (int i = 0; i < 6; ++i) amps.row(i) *= std::pow(0.3, i);
    traj.middleRows(w * N, N) = modes * amps + Vector::Constant(N, 10.0 * (w + 1)).replicate(1, K + 1);
  }
  return traj;
}

}  // namespace

TEST_CASE("snapshot means exclude the initial state") {
  // N = 1, K = 2: columns z^0, z^1, z^2.
  Matrix traj(4, 3);
  traj << 100, 1, 3,   //
      100, 2, 6,       //
      100, -1, 1,      //
      100, 5, 5;
  const SnapshotSet s = collect_snapshots(traj);
  CHECK(s.K() == 2);
  CHECK(s.N() == 1);
  CHECK(s.mean[0](0) == 2.0);
  CHECK(s.mean[1](0) == 4.0);
  CHECK(s.mean[2](0) == 0.0);
  CHECK(s.mean[3](0) == 5.0);
  CHECK(s.S[0](0, 0) == -1.0);
  CHECK(s.S[0](0, 1) == 1.0);
  CHECK(s.S[3].norm() == 0.0);

  CHECK_THROWS_AS(collect_snapshots(Matrix(4, 1)), ConfigError);
  CHECK_THROWS_AS(collect_snapshots(Matrix(5, 3)), ConfigError);
}

TEST_CASE("truncation rank from the energy criterion") {
  Vector sig(3);
  sig << 3, 2, 1;  // energies 9, 4, 1 of 14
  CHECK(truncate_rank(sig, 0.5) == 1);
  CHECK(truncate_rank(sig, 0.1) == 2);
  CHECK(truncate_rank(sig, 0.01) == 3);
  CHECK(truncate_rank(sig, 1.0 / 14.0) == 3);  // strict inequality
  CHECK_THROWS_AS(truncate_rank(Vector::Zero(4), 1e-3), NumericError);
  Vector rising(2);
  rising << 1, 2;
  CHECK_THROWS_AS(truncate_rank(rising, 0.1), ConfigError);
  CHECK_THROWS_AS(truncate_rank(sig, 0.0), ConfigError);
  CHECK_THROWS_AS(truncate_rank(sig, 1.0), ConfigError);
  CHECK_THROWS_AS(truncate_rank(Vector(), 0.1), ConfigError);
}

TEST_CASE("POD basis is orthonormal and optimal") {
  const Index N = 30;
  const int K = 20;
  const Matrix traj = synthetic_trajectory(N, K, 7);
  const SnapshotSet snaps = collect_snapshots(traj);
  const PodBasis b = build_pod_basis(snaps, 1e-3);
  CHECK(b.r == *std::max_element(b.criterion_rank.begin(), b.criterion_rank.end()));
  for (int w = 0; w < 4; ++w) {
    const Matrix& V = b.V[w];
    CHECK(V.cols() == b.r);
    CHECK((V.transpose() * V - Matrix::Identity(b.r, b.r)).norm() <= 1e-12);
    CHECK(b.criterion_rank[w] == truncate_rank(b.sigma[w], 1e-3));
    // Projection error equals the discarded singular-value energy.
    const Matrix& S = snaps.S[w];
    const double err = (S - V * (V.transpose() * S)).squaredNorm();
    const double tail = b.sigma[w].tail(b.sigma[w].size() - b.r).squaredNorm();
    CHECK(err == doctest::Approx(tail).epsilon(1e-8).scale(S.squaredNorm()));
    // No other r-dimensional subspace does better: try a perturbed basis.
    Matrix W = V + 0.05 * Matrix::Random(N, b.r);
    Eigen::HouseholderQR<Matrix> qr(W);
    W = qr.householderQ() * Matrix::Identity(N, b.r);
    CHECK((S - W * (W.transpose() * S)).squaredNorm() >= err);
    // Singular values are those of the snapshot matrix.
    Eigen::JacobiSVD<Matrix> svd(S);
    const Index m = std::min(svd.singularValues().size(), b.sigma[w].size());
    CHECK((svd.singularValues().head(m) - b.sigma[w].head(m)).norm() <= 1e-10 * S.norm());
  }
}

TEST_CASE("lift and restrict") {
  const Matrix traj = synthetic_trajectory(25, 15, 3);
  const PodBasis b = build_pod_basis(collect_snapshots(traj), 1e-6, 4);
  CHECK(b.r == 4);
  const Vector c = Vector::Random(16);
  CHECK((restrict_state(b, lift(b, c)) - c).norm() <= 1e-12);
  const Vector z = traj.col(5);
  const Vector proj = lift(b, restrict_state(b, z));
  const Matrix V = oracle::block_basis(b);
  Vector mean(100);
  for (int w = 0; w < 4; ++w) mean.segment(25 * w, 25) = b.mean[w];
  CHECK((proj - (mean + V * V.transpose() * (z - mean))).norm() <= 1e-12 * z.norm());
  const Matrix coeffs = Matrix::Random(16, 3);
  const Matrix lifted = lift_trajectory(b, coeffs);
  for (int k = 0; k < 3; ++k) CHECK((lifted.col(k) - lift(b, coeffs.col(k))).norm() <= 1e-12);
  CHECK_THROWS_AS(lift(b, Vector::Zero(15)), ConfigError);
  CHECK_THROWS_AS(restrict_state(b, Vector::Zero(99)), ConfigError);
}

TEST_CASE("rank override and monotonicity in the tolerance") {
  const Matrix traj = synthetic_trajectory(20, 12, 11);
  const SnapshotSet snaps = collect_snapshots(traj);
  int previous = 0;
  for (double kappa : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    const int r = build_pod_basis(snaps, kappa).r;
    CHECK(r >= previous);
    previous = r;
  }
  CHECK(build_pod_basis(snaps, 1e-3, 12).r == 12);
  CHECK_THROWS_AS(build_pod_basis(snaps, 1e-3, 0), ConfigError);
  CHECK_THROWS_AS(build_pod_basis(snaps, 1e-3, 13), ConfigError);
  // Threads do not change the result.
  const PodBasis a = build_pod_basis(snaps, 1e-3, std::nullopt, 1);
  const PodBasis c = build_pod_basis(snaps, 1e-3, std::nullopt, 4);
  for (int w = 0; w < 4; ++w) CHECK(a.V[w] == c.V[w]);
}

TEST_CASE("constant trajectory has no energy to truncate") {
  const Matrix traj = Vector::LinSpaced(12, 1.0, 12.0).replicate(1, 6);
  const SnapshotSet snaps = collect_snapshots(traj);
  for (int w = 0; w < 4; ++w) {
    CHECK(snaps.S[w].norm() == 0.0);
    CHECK(snaps.mean[w] == traj.col(0).segment(3 * w, 3));
  }
  CHECK_THROWS_AS(build_pod_basis(snaps, 1e-3), NumericError);
}
