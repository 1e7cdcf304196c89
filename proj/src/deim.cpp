#include "rtswe/deim.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "parallel.hpp"

namespace rtswe {

namespace {

void check_index(int j) {
  if (j < 1 || j > kNumNonlinear) {
    throw ConfigError("nonlinearity index must be in 1..7, got " + std::to_string(j));
  }
}

Vector scaled_by_inverse_height(const Vector& w, const Eigen::Ref<const Vector>& h) {
  for (Index k = 0; k < h.size(); ++k) {
    if (!(h(k) > 0.0)) {
      throw NumericError("nonpositive height h[" + std::to_string(k) + "]");
    }
  }
  return w.array() / h.array();
}

}  // namespace

Vector nonlinearity(int j, const Vector& z, const Physics& physics, const DiffOps& ops) {
  check_index(j);
  if (z.size() != 4 * ops.grid.N) throw ConfigError("state length does not match 4N");
  const auto h = block(z, Var::h).array();
  const auto u = block(z, Var::u).array();
  const auto v = block(z, Var::v).array();
  const auto s = block(z, Var::s).array();
  const auto b = physics.b.array();
  switch (j) {
    case 1: return potential_vorticity(z, physics, ops);
    case 2: return scaled_by_inverse_height(apply_dx(ops, Vector(block(z, Var::s))), block(z, Var::h));
    case 3: return scaled_by_inverse_height(apply_dy(ops, Vector(block(z, Var::s))), block(z, Var::h));
    case 4: return 0.5 * (u.square() + v.square()) + s * h + b * s;
    case 5: return h * u;
    case 6: return h * v;
    default: return 0.5 * h.square() + b * h;
  }
}

std::array<Vector, kNumNonlinear> all_nonlinearities(const Vector& z, const Physics& physics,
                                                     const DiffOps& ops) {
  std::array<Vector, kNumNonlinear> out;
  for (int j = 1; j <= kNumNonlinear; ++j) out[j - 1] = nonlinearity(j, z, physics, ops);
  return out;
}

NonlinSnapshots collect_nonlin_snapshots(const Matrix& trajectory, const PodBasis& basis,
                                         const Physics& physics, const DiffOps& ops,
                                         NonlinSource source) {
  if (trajectory.cols() < 2) throw ConfigError("nonlinear snapshots need at least one state");
  if (trajectory.rows() != 4 * ops.grid.N) throw ConfigError("trajectory rows must equal 4N");
  if (source == NonlinSource::reconstruction && basis.N() != ops.grid.N) {
    throw ConfigError("POD basis does not match the grid");
  }
  const Index N = ops.grid.N;
  const Index K = trajectory.cols() - 1;
  NonlinSnapshots out;
  for (auto& S : out.S) S.resize(N, K);
  for (Index k = 1; k <= K; ++k) {
    Vector z = trajectory.col(k);
    if (source == NonlinSource::reconstruction) z = lift(basis, restrict_state(basis, z));
    const auto F = all_nonlinearities(z, physics, ops);
    for (int j = 0; j < kNumNonlinear; ++j) out.S[j].col(k - 1) = F[j];
  }
  return out;
}

std::vector<Index> qdeim_select(const Matrix& basis) {
  const Index p = basis.cols();
  if (p == 0 || p > basis.rows()) {
    throw ConfigError("Q-DEIM basis must have 1 <= p <= N columns");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(basis.transpose());
  if (qr.rank() < p) {
    throw NumericError("Q-DEIM basis is rank deficient (rank " + std::to_string(qr.rank()) +
                       " < " + std::to_string(p) + ")");
  }
  const auto& perm = qr.colsPermutation().indices();
  return std::vector<Index>(perm.data(), perm.data() + p);
}

DeimOperator make_deim_operator(Matrix phi) {
  DeimOperator op;
  op.indices = qdeim_select(phi);
  const Index p = phi.cols();
  Matrix pt_phi(p, p);
  for (Index i = 0; i < p; ++i) pt_phi.row(i) = phi.row(op.indices[i]);

  const Vector sv = Eigen::JacobiSVD<Matrix>(pt_phi).singularValues();
  op.condition = sv(p - 1) > 0.0 ? sv(0) / sv(p - 1) : std::numeric_limits<double>::infinity();
  if (!std::isfinite(op.condition)) throw NumericError("P^T Phi is singular");

  // psi = phi (P^T phi)^-1, via psi^T = (P^T phi)^-T phi^T.
  op.psi = pt_phi.transpose().partialPivLu().solve(phi.transpose()).transpose();
  op.phi = std::move(phi);
  return op;
}

DeimSet build_deim(const NonlinSnapshots& snapshots, double kappa, std::optional<int> p_override,
                   int threads) {
  const Index N = snapshots.S[0].rows();
  const Index K = snapshots.S[0].cols();
  if (N == 0 || K == 0) throw ConfigError("empty nonlinear snapshot set");
  for (const auto& S : snapshots.S) {
    if (S.rows() != N || S.cols() != K) throw ConfigError("nonlinear snapshots must share N and K");
  }

  DeimSet set;
  std::array<Matrix, kNumNonlinear> U;
  detail::parallel_for(kNumNonlinear, threads, [&](int j) {
    thin_svd(snapshots.S[j], U[j], set.op[j].sigma);
  });
  for (int j = 0; j < kNumNonlinear; ++j) {
    set.criterion_rank[j] = truncate_rank(set.op[j].sigma, kappa);
  }

  const Index available = std::min(N, K);
  int p = 0;
  if (p_override) {
    p = *p_override;
    if (p < 1 || p > available) {
      throw ConfigError("DEIM mode override " + std::to_string(p) + " outside [1, " +
                        std::to_string(available) + "]");
    }
  } else {
    for (int rank : set.criterion_rank) p = std::max(p, rank);
  }
  set.p = p;

  detail::parallel_for(kNumNonlinear, threads, [&](int j) {
    Vector sigma = std::move(set.op[j].sigma);
    set.op[j] = make_deim_operator(U[j].leftCols(p));
    set.op[j].sigma = std::move(sigma);
  });
  return set;
}

Vector deim_reconstruct(const DeimOperator& op, const Vector& sampled) {
  if (sampled.size() != op.p()) throw ConfigError("sampled vector length must equal p");
  return op.psi * sampled;
}

Vector deim_select(const DeimOperator& op, const Vector& full) {
  if (full.size() != op.phi.rows()) throw ConfigError("vector length must equal N");
  Vector out(op.p());
  for (int i = 0; i < op.p(); ++i) out(i) = full(op.indices[i]);
  return out;
}

// ---------------------------------------------------------------------------
// DeimSampler

DeimSampler::DeimSampler(const PodBasis& basis, const DeimSet& deim, const Grid& grid,
                         const Physics& physics)
    : r_(basis.r),
      p_(deim.p),
      f_(physics.f),
      inv2dx_(1.0 / (2.0 * grid.dx)),
      inv2dy_(1.0 / (2.0 * grid.dy)) {
  if (basis.N() != grid.N) throw ConfigError("POD basis does not match the grid");
  for (const auto& op : deim.op) {
    if (op.phi.rows() != grid.N) throw ConfigError("DEIM basis does not match the grid");
  }

  std::array<std::unordered_map<Index, Index>, 4> slot_of;
  std::array<std::vector<Index>, 4> points;
  auto slot = [&](Var w, Index k) {
    auto& map = slot_of[idx(w)];
    auto [it, inserted] = map.try_emplace(k, static_cast<Index>(points[idx(w)].size()));
    if (inserted) points[idx(w)].push_back(k);
    return it->second;
  };

  for (int j = 0; j < kNumNonlinear; ++j) {
    auto& list = stencils_[j];
    for (Index k : deim.op[j].indices) {
      Stencil st;
      st.h = slot(Var::h, k);
      st.b = physics.b(k);
      switch (j + 1) {
        case 1:
          st.v_east = slot(Var::v, grid.east(k));
          st.v_west = slot(Var::v, grid.west(k));
          st.u_north = slot(Var::u, grid.north(k));
          st.u_south = slot(Var::u, grid.south(k));
          break;
        case 2:
          st.s_east = slot(Var::s, grid.east(k));
          st.s_west = slot(Var::s, grid.west(k));
          break;
        case 3:
          st.s_north = slot(Var::s, grid.north(k));
          st.s_south = slot(Var::s, grid.south(k));
          break;
        case 4:
          st.u = slot(Var::u, k);
          st.v = slot(Var::v, k);
          st.s = slot(Var::s, k);
          break;
        case 5: st.u = slot(Var::u, k); break;
        case 6: st.v = slot(Var::v, k); break;
        default: break;
      }
      list.push_back(st);
    }
  }

  for (Var w : kAllVars) {
    const auto& pts = points[idx(w)];
    const Index m = static_cast<Index>(pts.size());
    rows_[idx(w)].resize(m, r_);
    mean_rows_[idx(w)].resize(m);
    for (Index i = 0; i < m; ++i) {
      rows_[idx(w)].row(i) = basis.V[idx(w)].row(pts[i]);
      mean_rows_[idx(w)](i) = basis.mean[idx(w)](pts[i]);
    }
  }
}

Index DeimSampler::closure_size() const {
  Index total = 0;
  for (const auto& m : rows_) total += m.rows();
  return total;
}

void DeimSampler::lift_samples(const Vector& reduced, Samples& out, OnlineCounters* counters) const {
  for (int w = 0; w < 4; ++w) {
    out[w] = mean_rows_[w];
    out[w].noalias() += rows_[w] * reduced.segment(w * r_, r_);
    if (counters) counters->sampling_flops += 2 * static_cast<std::uint64_t>(rows_[w].size());
  }
}

void DeimSampler::evaluate(const Samples& x, int first, int last,
                           std::array<Vector, kNumNonlinear>& out, OnlineCounters* counters) const {
  const Vector& h = x[0];
  const Vector& u = x[1];
  const Vector& v = x[2];
  const Vector& s = x[3];
  for (int j = first; j <= last; ++j) {
    const auto& list = stencils_[j - 1];
    Vector& F = out[j - 1];
    F.resize(p_);
    for (int i = 0; i < p_; ++i) {
      const Stencil& st = list[i];
      const double hc = h(st.h);
      switch (j) {
        case 1:
        case 2:
        case 3:
          if (!(hc > 0.0)) throw NumericError("nonpositive sampled height");
          if (j == 1) {
            F(i) = ((v(st.v_east) - v(st.v_west)) * inv2dx_ - (u(st.u_north) - u(st.u_south)) * inv2dy_ + f_) / hc;
          } else if (j == 2) {
            F(i) = (s(st.s_east) - s(st.s_west)) * inv2dx_ / hc;
          } else {
            F(i) = (s(st.s_north) - s(st.s_south)) * inv2dy_ / hc;
          }
          break;
        case 4: F(i) = 0.5 * (u(st.u) * u(st.u) + v(st.v) * v(st.v)) + s(st.s) * hc + st.b * s(st.s); break;
        case 5: F(i) = hc * u(st.u); break;
        case 6: F(i) = hc * v(st.v); break;
        default: F(i) = 0.5 * hc * hc + st.b * hc; break;
      }
    }
    if (counters) counters->sampling_flops += 8 * static_cast<std::uint64_t>(p_);
  }
}

std::array<Vector, kNumNonlinear> DeimSampler::evaluate(const Vector& reduced) const {
  if (reduced.size() != 4 * r_) throw ConfigError("reduced vector length must equal 4r");
  Samples samples;
  lift_samples(reduced, samples);
  std::array<Vector, kNumNonlinear> out;
  evaluate(samples, 1, kNumNonlinear, out);
  return out;
}

}  // namespace rtswe
