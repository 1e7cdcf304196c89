#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rtswe/fom.hpp"
#include "rtswe/pod.hpp"

namespace rtswe {

inline constexpr int kNumNonlinear = 7;

/// The seven nonlinear vectors of the reduced dynamics, 1-based as F1..F7:
///   F1 = q, F2 = h^-1 Dx s, F3 = h^-1 Dy s,
///   F4 = (u^2+v^2)/2 + s h + b s, F5 = h u, F6 = h v, F7 = h^2/2 + b h.
Vector nonlinearity(int j, const Vector& z, const Physics& physics, const DiffOps& ops);

std::array<Vector, kNumNonlinear> all_nonlinearities(const Vector& z, const Physics& physics,
                                                     const DiffOps& ops);

struct NonlinSnapshots {
  std::array<Matrix, kNumNonlinear> S;  ///< N x K, column k-1 is F_j at snapshot k
};

enum class NonlinSource {
  reconstruction,  ///< F_j evaluated on mean + V V^T (z^k - mean)
  raw,             ///< F_j evaluated on the FOM states directly
};

/// Trajectory columns are z^0..z^K; snapshots use k = 1..K.
NonlinSnapshots collect_nonlin_snapshots(const Matrix& trajectory, const PodBasis& basis,
                                         const Physics& physics, const DiffOps& ops,
                                         NonlinSource source = NonlinSource::reconstruction);

/// Q-DEIM: first p pivots of the column-pivoted QR of basis^T, in pivot order.
std::vector<Index> qdeim_select(const Matrix& basis);

struct DeimOperator {
  Matrix phi;                  ///< N x p interpolation basis
  std::vector<Index> indices;  ///< selected rows
  Matrix psi;                  ///< phi (P^T phi)^-1
  Vector sigma;                ///< spectrum of the nonlinear snapshots
  double condition = 0.0;      ///< 2-norm condition number of P^T phi

  int p() const { return static_cast<int>(indices.size()); }
};

struct DeimSet {
  std::array<DeimOperator, kNumNonlinear> op;
  std::array<int, kNumNonlinear> criterion_rank{};
  int p = 0;
};

/// Condition number above which the CLI reports a warning.
inline constexpr double kDeimConditionWarning = 1e8;

DeimSet build_deim(const NonlinSnapshots& snapshots, double kappa,
                   std::optional<int> p_override = std::nullopt, int threads = 1);

/// Assemble one operator from a given basis (selection + oblique projector).
DeimOperator make_deim_operator(Matrix phi);

/// Psi c, the full-length DEIM approximation from sampled values c = P^T F.
Vector deim_reconstruct(const DeimOperator& op, const Vector& sampled);

/// P^T F for a full-length vector F.
Vector deim_select(const DeimOperator& op, const Vector& full);

/// Online work counters. Reduced flops depend only on (r, p); the sampling
/// term grows with the number of distinct lifted grid values.
struct OnlineCounters {
  std::uint64_t reduced_flops = 0;
  std::uint64_t sampling_flops = 0;
  std::uint64_t full_order_ops = 0;  ///< length-N operations; stays 0 on the DEIM path

  void reset() { *this = {}; }
};

/// Evaluates P_j^T F_j at the lifted state using only the selected grid
/// points and their stencil neighbours.
class DeimSampler {
 public:
  DeimSampler() = default;
  DeimSampler(const PodBasis& basis, const DeimSet& deim, const Grid& grid, const Physics& physics);

  /// Lifted values at the sampling closure: one vector per variable.
  using Samples = std::array<Vector, 4>;

  void lift_samples(const Vector& reduced, Samples& out, OnlineCounters* counters = nullptr) const;

  /// F_{r,j} for j in [first, last] (1-based) from lifted samples.
  void evaluate(const Samples& samples, int first, int last,
                std::array<Vector, kNumNonlinear>& out, OnlineCounters* counters = nullptr) const;

  /// Convenience: all seven F_{r,j} at a reduced state.
  std::array<Vector, kNumNonlinear> evaluate(const Vector& reduced) const;

  Index closure_size() const;
  int r() const { return r_; }
  int p() const { return p_; }

 private:
  struct Stencil {
    // Slots into the per-variable sample vectors.
    Index h = -1, u = -1, v = -1, s = -1;
    Index v_east = -1, v_west = -1, u_north = -1, u_south = -1;
    Index s_east = -1, s_west = -1, s_north = -1, s_south = -1;
    double b = 0.0;
  };

  int r_ = 0;
  int p_ = 0;
  double f_ = 0.0;
  double inv2dx_ = 0.0;
  double inv2dy_ = 0.0;
  std::array<Matrix, 4> rows_;        ///< rows of V_w at the sampling closure
  std::array<Vector, 4> mean_rows_;   ///< mean_w at the sampling closure
  std::array<std::vector<Stencil>, kNumNonlinear> stencils_;
};

}  // namespace rtswe
