#pragma once

#include <functional>
#include <vector>

#include "rtswe/grid.hpp"
#include "rtswe/newton.hpp"
#include "rtswe/types.hpp"

namespace rtswe {

/// Full-order state z = (h, u, v, s), each block of length N.
struct State {
  Vector z;
  double t = 0.0;

  State() = default;
  explicit State(Vector stacked, double time = 0.0);
  State(const Vector& h, const Vector& u, const Vector& v, const Vector& s, double time = 0.0);

  Index size() const { return z.size() / 4; }
  auto field(Var w) { return z.segment(idx(w) * size(), size()); }
  auto field(Var w) const { return z.segment(idx(w) * size(), size()); }
  auto h() const { return field(Var::h); }
  auto u() const { return field(Var::u); }
  auto v() const { return field(Var::v); }
  auto s() const { return field(Var::s); }
};

/// Block w of a stacked 4N vector.
inline auto block(const Vector& z, Var w) {
  const Index n = z.size() / 4;
  return z.segment(idx(w) * n, n);
}
inline auto block(Vector& z, Var w) {
  const Index n = z.size() / 4;
  return z.segment(idx(w) * n, n);
}

struct Physics {
  double f = 0.0;  ///< Coriolis parameter [1/s]
  double g = 0.0;  ///< gravity [m/s^2]
  Vector b;        ///< bottom topography [m], length N

  static Physics flat(double f, double g, Index N) { return Physics{f, g, Vector::Zero(N)}; }
};

struct InvariantValues {
  double H = 0.0;  ///< energy
  double M = 0.0;  ///< mass
  double Q = 0.0;  ///< total potential vorticity
  double B = 0.0;  ///< buoyancy
};

/// Everything the full-order dynamics needs; immutable once built.
struct Model {
  Grid grid;
  DiffOps ops;
  Physics physics;

  Index N() const { return grid.N; }
};

Model make_model(const Grid& grid, double f, double g);

/// q = (Dx v - Dy u + f) / h. Throws NumericError naming the first index with h <= 0.
Vector potential_vorticity(const Vector& z, const Physics& physics, const DiffOps& ops);
inline Vector potential_vorticity(const State& s, const Physics& p, const DiffOps& ops) {
  return potential_vorticity(s.z, p, ops);
}

/// Discrete gradient ((u^2+v^2)/2 + s h + b s, h u, h v, h^2/2 + b h).
Vector grad_hamiltonian(const Vector& z, const Physics& physics);

/// State-dependent diagonals of the Poisson matrix: q, h^-1 Dx s, h^-1 Dy s.
struct PoissonCoefficients {
  Vector q;
  Vector sx;
  Vector sy;
};

PoissonCoefficients poisson_coefficients(const Vector& z, const Physics& physics,
                                         const DiffOps& ops);

/// out = J(z) g using precomputed coefficients; matrix-free.
void apply_poisson(const PoissonCoefficients& c, const DiffOps& ops, const Vector& g, Vector& out);

Vector apply_poisson(const Vector& z, const Physics& physics, const DiffOps& ops,
                     const Vector& gvec);

/// dz/dt = -J(z) grad H(z).
Vector rhs(const Vector& z, const Physics& physics, const DiffOps& ops);

/// Exact chord average of grad H between z_old and z_new (two-point Gauss).
Vector avf_gradient(const Vector& z_old, const Vector& z_new, const Physics& physics);

/// One average-vector-field step. dt == 0 returns the input unchanged.
State avf_step(const State& state, double dt, const Model& model, const NewtonConfig& newton);

InvariantValues invariants(const Vector& z, const Physics& physics, const Grid& grid,
                           const DiffOps& ops);

struct FomTrajectory {
  Matrix states;  ///< 4N x (K+1), column k is z^k
  std::vector<InvariantValues> invariants;
  double dt = 0.0;
};

/// Called after each accepted state (including k = 0).
using StepObserver = std::function<void(int k, const State&)>;

struct IntegrateOptions {
  bool keep_states = true;
  StepObserver observer;
};

FomTrajectory integrate_fom(const State& initial, double dt, int steps, const Model& model,
                            const NewtonConfig& newton, const IntegrateOptions& options = {});

}  // namespace rtswe
