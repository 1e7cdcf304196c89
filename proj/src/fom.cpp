#include "rtswe/fom.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace rtswe {

State::State(Vector stacked, double time) : z(std::move(stacked)), t(time) {
  if (z.size() % 4 != 0) {
    throw ConfigError("stacked state length must be a multiple of 4");
  }
}

State::State(const Vector& h, const Vector& u, const Vector& v, const Vector& s, double time)
    : t(time) {
  const Index n = h.size();
  if (u.size() != n || v.size() != n || s.size() != n) {
    throw ConfigError("state components must share the same length");
  }
  z.resize(4 * n);
  z << h, u, v, s;
}

Model make_model(const Grid& grid, double f, double g) {
  return Model{grid, build_diff_ops(grid), Physics::flat(f, g, grid.N)};
}

namespace {

void check_positive_height(const Eigen::Ref<const Vector>& h) {
  for (Index k = 0; k < h.size(); ++k) {
    if (!(h(k) > 0.0)) {
      std::ostringstream msg;
      msg << "nonpositive height h[" << k << "] = " << h(k);
      throw NumericError(msg.str());
    }
  }
}

void check_state_length(const Vector& z, const DiffOps& ops) {
  if (z.size() != 4 * ops.grid.N) {
    throw ConfigError("state length " + std::to_string(z.size()) + " does not match 4N = " +
                      std::to_string(4 * ops.grid.N));
  }
}

}  // namespace

Vector potential_vorticity(const Vector& z, const Physics& physics, const DiffOps& ops) {
  check_state_length(z, ops);
  const auto h = block(z, Var::h);
  check_positive_height(h);
  const Index N = h.size();
  Vector vx(N), uy(N);
  apply_dx(ops, block(z, Var::v), vx);
  apply_dy(ops, block(z, Var::u), uy);
  return ((vx - uy).array() + physics.f) / h.array();
}

Vector grad_hamiltonian(const Vector& z, const Physics& physics) {
  const Index N = z.size() / 4;
  const auto h = block(z, Var::h).array();
  const auto u = block(z, Var::u).array();
  const auto v = block(z, Var::v).array();
  const auto s = block(z, Var::s).array();
  const auto b = physics.b.array();
  Vector g(4 * N);
  g.segment(0, N) = 0.5 * (u.square() + v.square()) + s * h + b * s;
  g.segment(N, N) = h * u;
  g.segment(2 * N, N) = h * v;
  g.segment(3 * N, N) = 0.5 * h.square() + b * h;
  return g;
}

PoissonCoefficients poisson_coefficients(const Vector& z, const Physics& physics,
                                         const DiffOps& ops) {
  const Index N = ops.grid.N;
  PoissonCoefficients c;
  c.q = potential_vorticity(z, physics, ops);
  c.sx.resize(N);
  c.sy.resize(N);
  apply_dx(ops, block(z, Var::s), c.sx);
  apply_dy(ops, block(z, Var::s), c.sy);
  const auto h = block(z, Var::h).array();
  c.sx.array() /= h;
  c.sy.array() /= h;
  return c;
}

void apply_poisson(const PoissonCoefficients& c, const DiffOps& ops, const Vector& g, Vector& out) {
  const Index N = ops.grid.N;
  out.resize(4 * N);
  const auto gh = block(g, Var::h);
  const auto gu = block(g, Var::u).array();
  const auto gv = block(g, Var::v).array();
  const auto gs = block(g, Var::s).array();
  auto oh = out.segment(0, N);
  auto ou = out.segment(N, N);
  auto ov = out.segment(2 * N, N);
  auto os = out.segment(3 * N, N);

  // Row h: Dx g_u + Dy g_v. Use ou/ov as scratch before they are overwritten.
  apply_dx(ops, block(g, Var::u), oh);
  apply_dy(ops, block(g, Var::v), ou);
  oh += ou;

  apply_dx(ops, gh, ou);
  ou.array() -= c.q.array() * gv + c.sx.array() * gs;

  apply_dy(ops, gh, ov);
  ov.array() += c.q.array() * gu - c.sy.array() * gs;

  os.array() = c.sx.array() * gu + c.sy.array() * gv;
}

Vector apply_poisson(const Vector& z, const Physics& physics, const DiffOps& ops,
                     const Vector& gvec) {
  check_state_length(z, ops);
  check_state_length(gvec, ops);
  Vector out;
  apply_poisson(poisson_coefficients(z, physics, ops), ops, gvec, out);
  return out;
}

Vector rhs(const Vector& z, const Physics& physics, const DiffOps& ops) {
  Vector out = apply_poisson(z, physics, ops, grad_hamiltonian(z, physics));
  out = -out;
  return out;
}

Vector avf_gradient(const Vector& z_old, const Vector& z_new, const Physics& physics) {
  if (z_old.size() != z_new.size()) {
    throw ConfigError("avf_gradient: state lengths differ");
  }
  // grad H is quadratic in z, so the two-point Gauss rule integrates it exactly.
  const double offset = 0.5 / std::sqrt(3.0);
  const Vector dz = z_new - z_old;
  const Vector za = z_old + (0.5 - offset) * dz;
  const Vector zb = z_old + (0.5 + offset) * dz;
  return 0.5 * (grad_hamiltonian(za, physics) + grad_hamiltonian(zb, physics));
}

State avf_step(const State& state, double dt, const Model& model, const NewtonConfig& newton) {
  check_state_length(state.z, model.ops);
  if (dt == 0.0) return state;
  if (!std::isfinite(dt)) throw ConfigError("time step must be finite");

  const Vector& z0 = state.z;
  const Index N = model.N();
  Vector mid(4 * N), jg(4 * N);

  auto residual = [&](const Vector& z1, Vector& r) {
    check_positive_height(block(z1, Var::h));
    mid = 0.5 * (z0 + z1);
    const PoissonCoefficients c = poisson_coefficients(mid, model.physics, model.ops);
    apply_poisson(c, model.ops, avf_gradient(z0, z1, model.physics), jg);
    r = z1 - z0 + dt * jg;
  };

  NewtonResult res = newton_solve(residual, z0, newton);
  return State(std::move(res.x), state.t + dt);
}

InvariantValues invariants(const Vector& z, const Physics& physics, const Grid& grid,
                           const DiffOps& ops) {
  check_state_length(z, ops);
  const auto h = block(z, Var::h).array();
  const auto u = block(z, Var::u).array();
  const auto v = block(z, Var::v).array();
  const auto s = block(z, Var::s).array();
  const auto b = physics.b.array();
  const double area = grid.cell_area();
  const Index N = grid.N;

  Vector vx(N), uy(N);
  apply_dx(ops, block(z, Var::v), vx);
  apply_dy(ops, block(z, Var::u), uy);

  InvariantValues out;
  out.H = (0.5 * h.square() * s + h * s * b + 0.5 * h * (u.square() + v.square())).sum() * area;
  out.M = h.sum() * area;
  out.Q = ((vx - uy).array() + physics.f).sum() * area;
  out.B = (h * s).sum() * area;
  return out;
}

FomTrajectory integrate_fom(const State& initial, double dt, int steps, const Model& model,
                            const NewtonConfig& newton, const IntegrateOptions& options) {
  if (steps < 0) throw ConfigError("number of steps must be nonnegative");
  check_state_length(initial.z, model.ops);

  FomTrajectory traj;
  traj.dt = dt;
  if (options.keep_states) traj.states.resize(initial.z.size(), steps + 1);
  traj.invariants.reserve(steps + 1);

  State current = initial;
  auto record = [&](int k) {
    if (options.keep_states) traj.states.col(k) = current.z;
    traj.invariants.push_back(invariants(current.z, model.physics, model.grid, model.ops));
    if (options.observer) options.observer(k, current);
  };
  record(0);

  for (int k = 0; k < steps; ++k) {
    try {
      current = avf_step(current, dt, model, newton);
    } catch (const NewtonError& e) {
      throw NewtonError("step " + std::to_string(k + 1) + ": " + e.what(), e.residual(),
                        e.iterations());
    } catch (const NumericError& e) {
      throw NumericError("step " + std::to_string(k + 1) + ": " + e.what());
    }
    record(k + 1);
  }
  return traj;
}

}  // namespace rtswe
