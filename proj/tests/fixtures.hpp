#pragma once

// Small double-vortex runs shared by the reduced-model tests.

#include <map>
#include <utility>

#include "rtswe/bench.hpp"
#include "rtswe/deim.hpp"
#include "rtswe/pod.hpp"

namespace fixture {

struct Reduced {
  rtswe::DoubleVortexConfig config;
  rtswe::Model model;
  rtswe::Matrix states;
  rtswe::PodBasis basis;
  rtswe::DeimSet deim;
};

/// Benchmark on an n x n grid for K steps, with fixed POD and DEIM ranks.
/// Results are cached per argument tuple.
inline const Reduced& small_run(int n, int K, int r, int p) {
  static std::map<std::tuple<int, int, int, int>, Reduced> cache;
  const auto key = std::make_tuple(n, K, r, p);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Reduced out;
  out.config.n = n;
  out.config.K = K;
  out.config.dt = 486.0 * 100.0 / n;
  out.model = rtswe::benchmark_model(out.config);
  const rtswe::State s0 = rtswe::double_vortex_initial(out.config, out.model.grid);
  out.states = rtswe::integrate_fom(s0, out.config.dt, K, out.model, rtswe::NewtonConfig{}).states;
  out.basis = rtswe::build_pod_basis(rtswe::collect_snapshots(out.states), 1e-3, r);
  out.deim = rtswe::build_deim(
      rtswe::collect_nonlin_snapshots(out.states, out.basis, out.model.physics, out.model.ops),
      1e-5, p);
  return cache.emplace(key, std::move(out)).first->second;
}

}  // namespace fixture
