#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rtswe/grid.hpp"

using namespace rtswe;

TEST_CASE("benchmark grid spacing") {
  const Grid g = build_grid(100, 5.0e6, 5.0e6);
  CHECK(g.dx == doctest::Approx(50000.0));
  CHECK(g.dy == doctest::Approx(50000.0));
  CHECK(g.N == 10000);
  CHECK(g.x(0) == 0.0);
  CHECK(g.x(99) == doctest::Approx(4.95e6));
}

TEST_CASE("grid rejects bad sizes") {
  CHECK_THROWS_AS(build_grid(2, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(build_grid(8, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(build_grid(8, 1.0, -1.0), ConfigError);
}

TEST_CASE("ordering and periodic neighbours") {
  const Grid g = build_grid(4, 4.0, 4.0);
  CHECK(g.index(1, 2) == 6);
  CHECK(g.east(g.index(3, 1)) == g.index(0, 1));
  CHECK(g.west(g.index(0, 1)) == g.index(3, 1));
  CHECK(g.north(g.index(2, 3)) == g.index(2, 0));
  CHECK(g.south(g.index(2, 0)) == g.index(2, 3));
}

TEST_CASE("difference matrices match the Kronecker construction") {
  for (int n : {3, 5, 8}) {
    const Grid g = build_grid(n, 2.0, 3.0);
    const DiffOps ops = build_diff_ops(g);
    CHECK((Matrix(ops.dx) - oracle::dense_dx(g)).norm() < 1e-12);
    CHECK((Matrix(ops.dy) - oracle::dense_dy(g)).norm() < 1e-12);
  }
}

TEST_CASE("circulant last row wraps with +1 and -1") {
  const Grid g = build_grid(6, 12.0, 12.0);  // dx = 2, so Dx rows are D/4
  const DiffOps ops = build_diff_ops(g);
  const Matrix D = Matrix(ops.dx) * (2.0 * g.dx);
  // Row for i = n-1, j = 0.
  const Index k = g.index(5, 0);
  CHECK(D(k, g.index(0, 0)) == doctest::Approx(1.0));
  CHECK(D(k, g.index(4, 0)) == doctest::Approx(-1.0));
  CHECK(D.row(k).cwiseAbs().sum() == doctest::Approx(2.0));
}

TEST_CASE("difference operators are skew-symmetric") {
  for (int n : {3, 8, 17}) {
    const Grid g = build_grid(n, 1.0, 2.5);
    const DiffOps ops = build_diff_ops(g);
    const Matrix Dx(ops.dx), Dy(ops.dy);
    CHECK((Dx + Dx.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * Dx.cwiseAbs().maxCoeff());
    CHECK((Dy + Dy.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * Dy.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("matrix-free stencils equal sparse products") {
  const Grid g = build_grid(9, 3.0, 7.0);
  const DiffOps ops = build_diff_ops(g);
  const Vector w = Vector::Random(g.N);
  CHECK((apply_dx(ops, w) - ops.dx * w).norm() < 1e-13 * (ops.dx * w).norm());
  CHECK((apply_dy(ops, w) - ops.dy * w).norm() < 1e-13 * (ops.dy * w).norm());
  Vector out(g.N);
  apply_dx(ops, w, out);
  CHECK((out - ops.dx * w).norm() < 1e-13 * out.norm());
  CHECK_THROWS_AS(apply_dx(ops, Vector::Zero(g.N + 1)), ConfigError);
}

TEST_CASE("constants are annihilated and a sine is differenced exactly") {
  const int n = 32;
  const double L = 10.0;
  const Grid g = build_grid(n, L, L);
  const DiffOps ops = build_diff_ops(g);
  CHECK(apply_dx(ops, Vector::Constant(g.N, 3.0)).cwiseAbs().maxCoeff() == 0.0);
  const double kx = 2.0 * std::numbers::pi / L;
  Vector w(g.N), expect(g.N);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      w(g.index(i, j)) = std::sin(kx * g.x(i));
      // Centered difference of sin(k x) is cos(k x) sin(k dx) / dx.
      expect(g.index(i, j)) = std::cos(kx * g.x(i)) * std::sin(kx * g.dx) / g.dx;
    }
  }
  CHECK((apply_dx(ops, w) - expect).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(apply_dy(ops, w).cwiseAbs().maxCoeff() < 1e-13);
}
