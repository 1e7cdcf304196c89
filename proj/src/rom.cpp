#include "rtswe/rom.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"

namespace rtswe {

namespace {

constexpr Index kTensorChunkRows = 512;

Matrix apply_columns(const DiffOps& ops, const Matrix& V, bool along_x) {
  Matrix out(V.rows(), V.cols());
  for (Index c = 0; c < V.cols(); ++c) {
    if (along_x) {
      apply_dx(ops, V.col(c), out.col(c));
    } else {
      apply_dy(ops, V.col(c), out.col(c));
    }
  }
  return out;
}

}  // namespace

Matrix matricized_tensor(const Matrix& V_out, const Matrix& psi_a, const Matrix& D,
                         Index* peak) {
  if (psi_a.rows() != V_out.rows() || D.rows() != V_out.rows() || psi_a.cols() != D.cols()) {
    throw ConfigError("tensor factors must share N rows and p columns");
  }
  const Index N = V_out.rows();
  const Index r = V_out.cols();
  const Index p = psi_a.cols();
  Matrix G = Matrix::Zero(r, p * p);
  const Index chunk = std::min(N, kTensorChunkRows);
  Matrix C(chunk, p * p);
  if (peak) *peak = std::max(*peak, C.size());
  for (Index m0 = 0; m0 < N; m0 += chunk) {
    const Index rows = std::min(chunk, N - m0);
    for (Index k = 0; k < p; ++k) {
      for (Index l = 0; l < p; ++l) {
        C.col(k * p + l).head(rows) =
            psi_a.col(k).segment(m0, rows).cwiseProduct(D.col(l).segment(m0, rows));
      }
    }
    G.noalias() += V_out.middleRows(m0, rows).transpose() * C.topRows(rows);
  }
  return G;
}

namespace {

void check_reduced(const RomState& state, int r) {
  if (state.coeffs.size() != 4 * r) {
    throw ConfigError("reduced state length " + std::to_string(state.coeffs.size()) +
                      " does not match 4r = " + std::to_string(4 * r));
  }
}

}  // namespace

RomMatrices precompute_rom_matrices(const PodBasis& basis, const DeimSet& deim,
                                    const DiffOps& ops, int threads, PrecomputeStats* stats) {
  const Index N = ops.grid.N;
  if (basis.N() != N) throw ConfigError("POD basis does not match the grid");
  for (const auto& op : deim.op) {
    if (op.phi.rows() != N || op.p() != deim.p) {
      throw ConfigError("DEIM operators do not match the grid or mode count");
    }
  }
  const Matrix& Vh = basis.V[idx(Var::h)];
  const Matrix& Vu = basis.V[idx(Var::u)];
  const Matrix& Vv = basis.V[idx(Var::v)];
  const Matrix& Vs = basis.V[idx(Var::s)];
  const auto& psi = [&](int j) -> const Matrix& { return deim.op[j - 1].psi; };

  RomMatrices m;
  m.r = basis.r;
  m.p = deim.p;
  m.A[0] = Vh.transpose() * apply_columns(ops, Vu, true);
  m.A[1] = Vh.transpose() * apply_columns(ops, Vv, false);
  m.A[2] = Vu.transpose() * apply_columns(ops, Vh, true);
  m.A[3] = Vv.transpose() * apply_columns(ops, Vh, false);

  m.L_h5 = m.A[0] * (Vu.transpose() * psi(5));
  m.L_h6 = m.A[1] * (Vv.transpose() * psi(6));
  m.L_u4 = m.A[2] * (Vh.transpose() * psi(4));
  m.L_v4 = m.A[3] * (Vh.transpose() * psi(4));

  // D = V_w V_w^T Psi_j for the gradient-side factors.
  const Matrix D5 = Vu * (Vu.transpose() * psi(5));
  const Matrix D6 = Vv * (Vv.transpose() * psi(6));
  const Matrix D7 = Vs * (Vs.transpose() * psi(7));

  struct TensorPlan {
    const Matrix* V;
    int a;
    const Matrix* D;
  };
  const std::array<TensorPlan, 6> specs{{{&Vu, 1, &D6},
                                   {&Vu, 2, &D7},
                                   {&Vv, 1, &D5},
                                   {&Vv, 3, &D7},
                                   {&Vs, 2, &D5},
                                   {&Vs, 3, &D6}}};
  std::array<Index, 6> peaks{};
  detail::parallel_for(6, threads, [&](int t) {
    m.G[t] = matricized_tensor(*specs[t].V, psi(specs[t].a), *specs[t].D, &peaks[t]);
  });
  if (stats) {
    for (Index pk : peaks) stats->peak_buffer_elements = std::max(stats->peak_buffer_elements, pk);
  }
  return m;
}

RomOperators make_rom_operators(RomMatrices matrices, PodBasis basis, DeimSet deim,
                                const Model& model) {
  if (matrices.r != basis.r || matrices.p != deim.p) {
    throw FormatError("reduced operators do not match the basis rank or DEIM mode count");
  }
  RomOperators ops;
  ops.sampler = DeimSampler(basis, deim, model.grid, model.physics);
  ops.m = std::move(matrices);
  ops.basis = std::move(basis);
  ops.deim = std::move(deim);
  ops.model = model;
  return ops;
}

RomOperators precompute_rom(const PodBasis& basis, const DeimSet& deim, const Model& model,
                            int threads, PrecomputeStats* stats) {
  return make_rom_operators(precompute_rom_matrices(basis, deim, model.ops, threads, stats), basis,
                            deim, model);
}

void contract_tensor(const Matrix& G, int r, int p, const Vector& a, const Vector& b, double sign,
                     Eigen::Ref<Vector> out, Vector& tmp) {
  // Column k*p + l of G at offset r*(k*p + l): viewed as (r*p) x p with column k.
  const Eigen::Map<const Matrix> W(G.data(), static_cast<Index>(r) * p, p);
  tmp.noalias() = W * a;
  const Eigen::Map<const Matrix> T(tmp.data(), r, p);
  out.noalias() += sign * (T * b);
}

namespace {

using NonlinValues = std::array<Vector, kNumNonlinear>;

/// Tensor-form vector field given F_{r,1..3} (Poisson side) and F_{r,4..7}
/// (gradient side) in F[0..6].
void tensor_field(const RomOperators& ops, const NonlinValues& F, Vector& out, Vector& tmp,
                  OnlineCounters* counters) {
  const int r = ops.r();
  const int p = ops.p();
  const RomMatrices& m = ops.m;
  out.resize(4 * r);
  tmp.resize(static_cast<Index>(r) * p);
  auto oh = out.segment(0, r);
  auto ou = out.segment(r, r);
  auto ov = out.segment(2 * r, r);
  auto os = out.segment(3 * r, r);
  const Vector& F1 = F[0];
  const Vector& F2 = F[1];
  const Vector& F3 = F[2];
  const Vector& F4 = F[3];
  const Vector& F5 = F[4];
  const Vector& F6 = F[5];
  const Vector& F7 = F[6];

  oh.noalias() = -(m.L_h5 * F5);
  oh.noalias() -= m.L_h6 * F6;

  ou.noalias() = -(m.L_u4 * F4);
  contract_tensor(m.G[0], r, p, F1, F6, 1.0, ou, tmp);
  contract_tensor(m.G[1], r, p, F2, F7, 1.0, ou, tmp);

  ov.noalias() = -(m.L_v4 * F4);
  contract_tensor(m.G[2], r, p, F1, F5, -1.0, ov, tmp);
  contract_tensor(m.G[3], r, p, F3, F7, 1.0, ov, tmp);

  os.setZero();
  contract_tensor(m.G[4], r, p, F2, F5, -1.0, os, tmp);
  contract_tensor(m.G[5], r, p, F3, F6, -1.0, os, tmp);

  if (counters) {
    const std::uint64_t rp = static_cast<std::uint64_t>(r) * p;
    counters->reduced_flops += 4 * 2 * rp + 6 * (2 * rp * p + 2 * rp);
  }
}

}  // namespace

Vector rom_rhs(const RomState& state, const RomOperators& ops, OnlineCounters* counters) {
  check_reduced(state, ops.r());
  DeimSampler::Samples samples;
  ops.sampler.lift_samples(state.coeffs, samples, counters);
  NonlinValues F;
  ops.sampler.evaluate(samples, 1, kNumNonlinear, F, counters);
  Vector out, tmp;
  tensor_field(ops, F, out, tmp, counters);
  return out;
}

namespace {

/// V V^T g, block by block (no mean shift).
Vector project_blocks(const PodBasis& basis, const Vector& g) {
  const Index N = basis.N();
  Vector out(4 * N);
  for (int i = 0; i < 4; ++i) {
    out.segment(i * N, N).noalias() = basis.V[i] * (basis.V[i].transpose() * g.segment(i * N, N));
  }
  return out;
}

/// V^T x, block by block.
Vector reduce_blocks(const PodBasis& basis, const Vector& x) {
  const Index N = basis.N();
  const int r = basis.r;
  Vector out(4 * r);
  for (int i = 0; i < 4; ++i) {
    out.segment(i * r, r).noalias() = basis.V[i].transpose() * x.segment(i * N, N);
  }
  return out;
}

}  // namespace

Vector rom_rhs_pod_only(const RomState& state, const PodBasis& basis, const Model& model) {
  check_reduced(state, basis.r);
  const Vector z = lift(basis, state.coeffs);
  const Vector jg = apply_poisson(z, model.physics, model.ops,
                                  project_blocks(basis, grad_hamiltonian(z, model.physics)));
  return -reduce_blocks(basis, jg);
}

NewtonConfig rom_newton_defaults() {
  NewtonConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iter = 50;
  cfg.solver = LinearSolver::dense;
  return cfg;
}

RomState rom_avf_step(const RomState& state, double dt, const RomOperators& ops,
                      const NewtonConfig& newton, OnlineCounters* counters,
                      DenseJacobianCache* cache) {
  check_reduced(state, ops.r());
  if (dt == 0.0) return state;

  const double offset = 0.5 / std::sqrt(3.0);
  const double xa = 0.5 - offset;
  const double xb = 0.5 + offset;
  const Vector& z0 = state.coeffs;

  DeimSampler::Samples s0, s1, sm, sa, sb;
  ops.sampler.lift_samples(z0, s0, counters);
  NonlinValues F, Fa, Fb;
  Vector field, tmp;

  auto residual = [&](const Vector& z1, Vector& res) {
    ops.sampler.lift_samples(z1, s1, counters);
    for (int w = 0; w < 4; ++w) {
      sm[w] = 0.5 * (s0[w] + s1[w]);
      sa[w] = s0[w] + xa * (s1[w] - s0[w]);
      sb[w] = s0[w] + xb * (s1[w] - s0[w]);
    }
    ops.sampler.evaluate(sm, 1, 3, F, counters);
    ops.sampler.evaluate(sa, 4, 7, Fa, counters);
    ops.sampler.evaluate(sb, 4, 7, Fb, counters);
    for (int j = 3; j < kNumNonlinear; ++j) F[j] = 0.5 * (Fa[j] + Fb[j]);
    tensor_field(ops, F, field, tmp, counters);
    res = z1 - z0 - dt * field;
  };

  NewtonResult res = newton_solve(residual, z0, newton, cache);
  return RomState{std::move(res.x), state.t + dt};
}

RomState rom_avf_step_pod(const RomState& state, double dt, const PodBasis& basis,
                          const Model& model, const NewtonConfig& newton,
                          DenseJacobianCache* cache) {
  check_reduced(state, basis.r);
  if (dt == 0.0) return state;
  const Vector& z0 = state.coeffs;
  const Vector full0 = lift(basis, z0);
  Vector jg;

  auto residual = [&](const Vector& z1, Vector& res) {
    const Vector full1 = lift(basis, z1);
    const Vector mid = 0.5 * (full0 + full1);
    const PoissonCoefficients c = poisson_coefficients(mid, model.physics, model.ops);
    apply_poisson(c, model.ops, project_blocks(basis, avf_gradient(full0, full1, model.physics)),
                  jg);
    res = z1 - z0 + dt * reduce_blocks(basis, jg);
  };

  NewtonResult res = newton_solve(residual, z0, newton, cache);
  return RomState{std::move(res.x), state.t + dt};
}

std::vector<InvariantValues> lifted_invariants(const Matrix& coeffs, const PodBasis& basis,
                                               const Model& model) {
  std::vector<InvariantValues> out;
  out.reserve(coeffs.cols());
  for (Index k = 0; k < coeffs.cols(); ++k) {
    out.push_back(invariants(lift(basis, coeffs.col(k)), model.physics, model.grid, model.ops));
  }
  return out;
}

namespace {

template <class Step>
RomTrajectory run_reduced(const RomState& initial, int steps, Step&& step) {
  if (steps < 0) throw ConfigError("number of steps must be nonnegative");
  RomTrajectory traj;
  traj.coeffs.resize(initial.coeffs.size(), steps + 1);
  traj.coeffs.col(0) = initial.coeffs;
  RomState current = initial;
  for (int k = 0; k < steps; ++k) {
    try {
      current = step(current);
    } catch (const NewtonError& e) {
      throw NewtonError("reduced step " + std::to_string(k + 1) + ": " + e.what(), e.residual(),
                        e.iterations());
    } catch (const NumericError& e) {
      throw NumericError("reduced step " + std::to_string(k + 1) + ": " + e.what());
    }
    traj.coeffs.col(k + 1) = current.coeffs;
  }
  return traj;
}

}  // namespace

RomTrajectory integrate_rom(const RomState& initial, double dt, int steps, const RomOperators& ops,
                            const NewtonConfig& newton, bool with_invariants,
                            OnlineCounters* counters) {
  check_reduced(initial, ops.r());
  DenseJacobianCache cache;
  RomTrajectory traj = run_reduced(initial, steps, [&](const RomState& s) {
    return rom_avf_step(s, dt, ops, newton, counters, &cache);
  });
  if (with_invariants) traj.invariants = lifted_invariants(traj.coeffs, ops.basis, ops.model);
  return traj;
}

RomTrajectory integrate_pod_rom(const RomState& initial, double dt, int steps,
                                const PodBasis& basis, const Model& model,
                                const NewtonConfig& newton, bool with_invariants) {
  check_reduced(initial, basis.r);
  DenseJacobianCache cache;
  RomTrajectory traj = run_reduced(initial, steps, [&](const RomState& s) {
    return rom_avf_step_pod(s, dt, basis, model, newton, &cache);
  });
  if (with_invariants) traj.invariants = lifted_invariants(traj.coeffs, basis, model);
  return traj;
}

}  // namespace rtswe
