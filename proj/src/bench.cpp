#include "rtswe/bench.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rtswe {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void DoubleVortexConfig::validate() const {
  require(positive(L), "L must be positive");
  require(std::isfinite(f) && f != 0.0, "f must be finite and nonzero");
  require(positive(g), "g must be positive");
  require(positive(H0), "H0 must be positive");
  require(std::isfinite(dh), "dh must be finite");
  require(positive(sigma_x) && positive(sigma_y), "sigma_x and sigma_y must be positive");
  require(std::isfinite(ox) && std::isfinite(oy), "ox and oy must be finite");
  require(n >= 3, "n must be at least 3");
  require(K >= 1, "K must be at least 1");
  require(positive(dt), "dt must be positive");
  require(kappa_pod > 0.0 && kappa_pod < 1.0, "kappa_pod must lie in (0, 1)");
  require(kappa_deim > 0.0 && kappa_deim < 1.0, "kappa_deim must lie in (0, 1)");
  require(!r_override || *r_override >= 1, "r must be at least 1");
  require(!p_override || *p_override >= 1, "p must be at least 1");
}

State double_vortex_initial(const DoubleVortexConfig& c, const Grid& grid) {
  c.validate();
  const double pi = std::numbers::pi;
  const double L = c.L;
  const double xc = 0.5 * L;
  const double xc1 = (0.5 - c.ox) * L;
  const double xc2 = (0.5 + c.ox) * L;
  const double yc1 = (0.5 - c.oy) * L;
  const double yc2 = (0.5 + c.oy) * L;
  const double offset = 4.0 * pi * c.sigma_x * c.sigma_y / (L * L);

  auto warp = [&](double t, double center, double sigma) {
    return L / (pi * sigma) * std::sin(pi / L * (t - center));
  };
  auto warp2 = [&](double t, double center, double sigma) {
    return L / (2.0 * pi * sigma) * std::sin(2.0 * pi / L * (t - center));
  };

  const Index N = grid.N;
  Vector h(N), u(N), v(N), s(N);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    const double x1 = warp(x, xc1, c.sigma_x);
    const double x2 = warp(x, xc2, c.sigma_x);
    const double xx1 = warp2(x, xc1, c.sigma_x);
    const double xx2 = warp2(x, xc2, c.sigma_x);
    const double sk = c.g * (1.0 + 0.05 * std::sin(2.0 * pi / L * (x - xc)));
    for (int j = 0; j < grid.n; ++j) {
      const double y = grid.y(j);
      const double y1 = warp(y, yc1, c.sigma_y);
      const double y2 = warp(y, yc2, c.sigma_y);
      const double yy1 = warp2(y, yc1, c.sigma_y);
      const double yy2 = warp2(y, yc2, c.sigma_y);
      const double e1 = std::exp(-0.5 * (x1 * x1 + y1 * y1));
      const double e2 = std::exp(-0.5 * (x2 * x2 + y2 * y2));
      const Index k = grid.index(i, j);
      h(k) = c.H0 - c.dh * (e1 + e2 - offset);
      u(k) = -c.g * c.dh / (c.f * c.sigma_y) * (yy1 * e1 + yy2 * e2);
      v(k) = c.g * c.dh / (c.f * c.sigma_x) * (xx1 * e1 + xx2 * e2);
      s(k) = sk;
    }
  }
  return State(h, u, v, s, 0.0);
}

Model benchmark_model(const DoubleVortexConfig& config) {
  config.validate();
  return make_model(config.grid(), config.f, config.g);
}

double l2_norm(const Eigen::Ref<const Vector>& w, const Grid& grid) {
  return std::sqrt(w.squaredNorm() * grid.cell_area());
}

std::array<double, 4> relative_L2_error(const Matrix& reference, const Matrix& approx,
                                        const Grid& grid) {
  const Index N = grid.N;
  if (reference.rows() != 4 * N || approx.rows() != 4 * N) {
    throw ConfigError("trajectories must have 4N rows");
  }
  if (reference.cols() != approx.cols()) {
    throw ConfigError("trajectories must have the same number of steps");
  }
  if (reference.cols() < 2) throw ConfigError("trajectories need at least one step after k = 0");
  const Index K = reference.cols() - 1;
  std::array<double, 4> out{};
  for (int w = 0; w < 4; ++w) {
    double acc = 0.0;
    for (Index k = 1; k <= K; ++k) {
      const auto ref = reference.col(k).segment(w * N, N);
      const double denom = l2_norm(ref, grid);
      if (!(denom > 0.0)) {
        throw NumericError("reference " + std::string(name(static_cast<Var>(w))) +
                           " has zero norm at step " + std::to_string(k));
      }
      acc += l2_norm(ref - approx.col(k).segment(w * N, N), grid) / denom;
    }
    out[w] = acc / static_cast<double>(K);
  }
  return out;
}

InvariantErrors invariant_error_series(const std::vector<InvariantValues>& series) {
  if (series.size() < 2) throw ConfigError("invariant series needs at least two entries");
  const Index K = static_cast<Index>(series.size()) - 1;
  InvariantErrors out;
  out.series = Matrix::Zero(K + 1, 4);
  for (int e = 0; e < 4; ++e) {
    const Inv which = static_cast<Inv>(e);
    const double e0 = get(series[0], which);
    if (e0 == 0.0) {
      throw NumericError(std::string("initial invariant ") + kInvariantNames[e] + " is zero");
    }
    double acc = 0.0;
    double mx = 0.0;
    for (Index k = 1; k <= K; ++k) {
      const double rel = std::abs(get(series[k], which) - e0) / std::abs(e0);
      out.series(k, e) = rel;
      acc += rel;
      mx = std::max(mx, rel);
    }
    out.mean[e] = acc / static_cast<double>(K);
    out.max[e] = mx;
  }
  return out;
}

}  // namespace rtswe
