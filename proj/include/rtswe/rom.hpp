#pragma once

#include <vector>

#include "rtswe/deim.hpp"
#include "rtswe/fom.hpp"
#include "rtswe/pod.hpp"

namespace rtswe {

/// Reduced coefficients (h_r, u_r, v_r, s_r), each of length r.
struct RomState {
  Vector coeffs;
  double t = 0.0;

  int r() const { return static_cast<int>(coeffs.size() / 4); }
  auto field(Var w) const { return coeffs.segment(idx(w) * r(), r()); }
};

/// Constant reduced matrices of the tensor-form DEIM model.
///
/// Each G_j is stored r x p^2 with column k*p + l multiplying a_k b_l, so that
/// G_j (a kron b) = V^T((Psi_a a) o (D b)).
struct RomMatrices {
  int r = 0;
  int p = 0;
  /// V_h^T Dx V_u, V_h^T Dy V_v, V_u^T Dx V_h, V_v^T Dy V_h.
  std::array<Matrix, 4> A;
  Matrix L_h5;  ///< V_h^T Dx V_u V_u^T Psi_5
  Matrix L_h6;  ///< V_h^T Dy V_v V_v^T Psi_6
  Matrix L_u4;  ///< V_u^T Dx V_h V_h^T Psi_4
  Matrix L_v4;  ///< V_v^T Dy V_h V_h^T Psi_4
  std::array<Matrix, 6> G;
};

/// V_out^T G (A kron D) as an r x p^2 matrix, where G(a kron b) = a o b.
/// Streams over row chunks so the N x p^2 product is never held in full.
Matrix matricized_tensor(const Matrix& V_out, const Matrix& A, const Matrix& D,
                         Index* peak_buffer_elements = nullptr);

struct PrecomputeStats {
  Index peak_buffer_elements = 0;  ///< largest transient buffer while forming G_j
};

RomMatrices precompute_rom_matrices(const PodBasis& basis, const DeimSet& deim,
                                    const DiffOps& ops, int threads = 1,
                                    PrecomputeStats* stats = nullptr);

/// Everything the online DEIM model needs.
struct RomOperators {
  RomMatrices m;
  PodBasis basis;
  DeimSet deim;
  Model model;
  DeimSampler sampler;

  int r() const { return m.r; }
  int p() const { return m.p; }
};

RomOperators make_rom_operators(RomMatrices matrices, PodBasis basis, DeimSet deim,
                                const Model& model);

RomOperators precompute_rom(const PodBasis& basis, const DeimSet& deim, const Model& model,
                            int threads = 1, PrecomputeStats* stats = nullptr);

/// out += sign * G (a kron b) without forming a kron b; tmp is r*p scratch.
void contract_tensor(const Matrix& G, int r, int p, const Vector& a, const Vector& b, double sign,
                     Eigen::Ref<Vector> out, Vector& tmp);

/// Tensor-form DEIM right-hand side.
Vector rom_rhs(const RomState& state, const RomOperators& ops, OnlineCounters* counters = nullptr);

/// Structure-preserving POD-Galerkin right-hand side -V^T J(z) V V^T grad H(z)
/// at the lifted state; cost scales with N.
Vector rom_rhs_pod_only(const RomState& state, const PodBasis& basis, const Model& model);

/// Reduced Newton defaults: dense finite-difference Jacobian, tol 1e-12.
/// The integrators below reuse the factorization across steps.
NewtonConfig rom_newton_defaults();

/// One AVF step of the tensor-form model. A Jacobian cache carried across
/// steps turns the dense Newton iteration into a chord iteration.
RomState rom_avf_step(const RomState& state, double dt, const RomOperators& ops,
                      const NewtonConfig& newton, OnlineCounters* counters = nullptr,
                      DenseJacobianCache* cache = nullptr);

RomState rom_avf_step_pod(const RomState& state, double dt, const PodBasis& basis,
                          const Model& model, const NewtonConfig& newton,
                          DenseJacobianCache* cache = nullptr);

enum class RomMethod { pod, pod_deim };

struct RomTrajectory {
  Matrix coeffs;  ///< 4r x (K+1)
  std::vector<InvariantValues> invariants;  ///< of lifted states; empty if not requested
};

RomTrajectory integrate_rom(const RomState& initial, double dt, int steps, const RomOperators& ops,
                            const NewtonConfig& newton, bool with_invariants = true,
                            OnlineCounters* counters = nullptr);

RomTrajectory integrate_pod_rom(const RomState& initial, double dt, int steps,
                                const PodBasis& basis, const Model& model,
                                const NewtonConfig& newton, bool with_invariants = true);

std::vector<InvariantValues> lifted_invariants(const Matrix& coeffs, const PodBasis& basis,
                                               const Model& model);

}  // namespace rtswe
