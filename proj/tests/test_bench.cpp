#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rtswe/bench.hpp"

using namespace rtswe;

TEST_CASE("benchmark defaults") {
  const DoubleVortexConfig c;
  CHECK(c.L == 5.0e6);
  CHECK(c.n == 100);
  CHECK(c.L / c.n == 50.0e3);
  CHECK(c.K == 250);
  CHECK(c.dt == 486.0);
  CHECK(c.K * c.dt == 33.75 * 3600.0);
  CHECK(c.H0 == 750.0);
  CHECK(c.dh == 75.0);
  CHECK(c.g == 9.80616);
  CHECK(c.f == 6.147e-5);
  CHECK(c.sigma_x == 3.0 / 40.0 * c.L);
  CHECK(c.ox == 0.1);
  CHECK(c.kappa_pod == 1e-3);
  CHECK(c.kappa_deim == 1e-5);
  CHECK_NOTHROW(c.validate());
  DoubleVortexConfig bad = c;
  bad.n = 2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.kappa_pod = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.f = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("initial condition at a vortex centre") {
  DoubleVortexConfig c;
  c.n = 20;  // node 8 sits at 0.4 L, node 12 at 0.6 L
  const Grid g = c.grid();
  const State s = double_vortex_initial(c, g);
  const double pi = std::numbers::pi;
  const double a = c.L / (pi * c.sigma_x) * std::sin(-0.2 * pi);
  const double e2 = std::exp(-a * a);  // both coordinates offset by 0.2 L
  const double offset = 4 * pi * c.sigma_x * c.sigma_y / (c.L * c.L);
  const Index k = g.index(8, 8);
  CHECK(s.h()(k) == doctest::Approx(750.0 - 75.0 * (1.0 + e2 - offset)).epsilon(1e-14));
  const double b = c.L / (2 * pi * c.sigma_x) * std::sin(-0.4 * pi);
  CHECK(s.u()(k) == doctest::Approx(-c.g * 75.0 / (c.f * c.sigma_y) * b * e2).epsilon(1e-13));
  CHECK(s.v()(k) == doctest::Approx(c.g * 75.0 / (c.f * c.sigma_x) * b * e2).epsilon(1e-13));
  CHECK(s.s()(k) == doctest::Approx(c.g * (1.0 + 0.05 * std::sin(-0.2 * pi))).epsilon(1e-15));
}

TEST_CASE("initial condition shape") {
  DoubleVortexConfig c;
  c.n = 40;
  const Grid g = c.grid();
  const State s = double_vortex_initial(c, g);
  CHECK(s.h().minCoeff() > 0.0);
  CHECK(s.h().maxCoeff() <= c.H0 + c.dh);
  CHECK(s.s().minCoeff() >= 0.95 * c.g - 1e-12);
  CHECK(s.s().maxCoeff() <= 1.05 * c.g + 1e-12);
  // The offset term nearly cancels the mean depression.
  CHECK(std::abs(s.h().mean() - c.H0) < 0.01 * c.dh);
  const int n = c.n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Index k = g.index(i, j);
      const Index rot = g.index((n - i) % n, (n - j) % n);
      const Index tr = g.index(j, i);
      CHECK(s.h()(k) == doctest::Approx(s.h()(rot)).epsilon(1e-13));
      CHECK(s.h()(k) == doctest::Approx(s.h()(tr)).epsilon(1e-13));
      CHECK(s.u()(k) == doctest::Approx(-s.v()(tr)).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("initial condition is sampled, not resolution dependent") {
  DoubleVortexConfig coarse, fine;
  coarse.n = 50;
  fine.n = 100;
  const State a = double_vortex_initial(coarse, coarse.grid());
  const State b = double_vortex_initial(fine, fine.grid());
  for (int i = 0; i < 50; i += 7) {
    for (int j = 0; j < 50; j += 5) {
      const Index ka = coarse.grid().index(i, j);
      const Index kb = fine.grid().index(2 * i, 2 * j);
      for (Var w : kAllVars) CHECK(a.field(w)(ka) == doctest::Approx(b.field(w)(kb)).epsilon(1e-13));
    }
  }
  const Model m = benchmark_model(fine);
  CHECK(m.physics.f == fine.f);
  CHECK(m.physics.b.cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.grid.dx == 50.0e3);
}

TEST_CASE("error metrics on hand-built examples") {
  const Grid g = build_grid(3, 3.0, 3.0);
  CHECK(l2_norm(Vector::Constant(9, 2.0), g) == doctest::Approx(6.0));

  Matrix ref = Matrix::Random(36, 3) + Matrix::Constant(36, 3, 2.0);
  Matrix approx = 1.1 * ref;
  approx.col(0).setZero();  // ignored
  const auto e = relative_L2_error(ref, approx, g);
  for (double x : e) CHECK(x == doctest::Approx(0.1));
  Matrix zero = ref;
  zero.middleRows(27, 9).setZero();
  CHECK_THROWS_AS(relative_L2_error(zero, approx, g), NumericError);
  CHECK_THROWS_AS(relative_L2_error(ref, approx.leftCols(2), g), ConfigError);

  std::vector<InvariantValues> series{{2, 1, 1, 1}, {2.2, 1, 1, 1}, {1.8, 1, 1, 1.5}};
  const InvariantErrors ie = invariant_error_series(series);
  CHECK(ie.mean[0] == doctest::Approx(0.1));
  CHECK(ie.max[0] == doctest::Approx(0.1));
  CHECK(ie.mean[1] == 0.0);
  CHECK(ie.mean[3] == doctest::Approx(0.25));
  CHECK(ie.max[3] == doctest::Approx(0.5));
  CHECK(ie.series.rows() == 3);
  CHECK(ie.series(2, 3) == doctest::Approx(0.5));
  CHECK(get(series[2], Inv::B) == 1.5);
}
