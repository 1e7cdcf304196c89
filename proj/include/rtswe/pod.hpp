#pragma once

#include <optional>

#include "rtswe/fom.hpp"
#include "rtswe/types.hpp"

namespace rtswe {

/// Mean-subtracted snapshot matrices, one per variable.
struct SnapshotSet {
  std::array<Matrix, 4> S;     ///< N x K, column k-1 is w^k - mean
  std::array<Vector, 4> mean;  ///< time average over k = 1..K

  Index N() const { return S[0].rows(); }
  Index K() const { return S[0].cols(); }
};

/// Build snapshots from a trajectory whose columns are z^0..z^K.
/// The initial state (column 0) is excluded; the mean divides by K.
SnapshotSet collect_snapshots(const Matrix& trajectory);

/// Smallest p with sum_{j<=p} s_j^2 / sum_j s_j^2 > 1 - kappa.
int truncate_rank(const Vector& spectrum, double kappa);

struct PodBasis {
  std::array<Matrix, 4> V;      ///< N x r, orthonormal columns
  std::array<Vector, 4> mean;
  std::array<Vector, 4> sigma;  ///< full thin-SVD spectrum per variable
  std::array<int, 4> criterion_rank{};
  int r = 0;

  Index N() const { return V[0].rows(); }
};

/// Thin SVD of each snapshot matrix. The common rank is the largest
/// per-variable criterion rank unless r_override is given.
PodBasis build_pod_basis(const SnapshotSet& snapshots, double kappa,
                         std::optional<int> r_override = std::nullopt, int threads = 1);

/// Thin SVD left factor and spectrum with a deterministic column sign
/// (largest-magnitude entry positive). Shared with the DEIM basis build.
void thin_svd(const Matrix& S, Matrix& U, Vector& sigma);

/// w = mean_w + V_w w_r for every block.
Vector lift(const PodBasis& basis, const Vector& reduced);
/// w_r = V_w^T (w - mean_w) for every block.
Vector restrict_state(const PodBasis& basis, const Vector& z);

/// Columns of coefficients (4r x K) lifted to full states (4N x K).
Matrix lift_trajectory(const PodBasis& basis, const Matrix& coefficients);

}  // namespace rtswe
