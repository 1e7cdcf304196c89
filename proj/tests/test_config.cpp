#include <doctest.h>

#include "rtswe/config.hpp"

using namespace rtswe;

TEST_CASE("settings parse with comments and overrides") {
  const RunSettings s = parse_settings(
      "# small run\n"
      "n = 32\n"
      "K=100   # steps\n"
      "\n"
      "  kappa_pod = 1e-4\n"
      "r = 7\n"
      "rom_newton_tol = 1e-10\n"
      "threads = 2\n");
  CHECK(s.bench.n == 32);
  CHECK(s.bench.K == 100);
  CHECK(s.bench.kappa_pod == 1e-4);
  CHECK(s.bench.r_override == 7);
  CHECK(!s.bench.p_override);
  CHECK(s.rom_newton.tol == 1e-10);
  CHECK(s.rom_newton.solver == LinearSolver::dense);
  CHECK(s.fom_newton.solver == LinearSolver::krylov);
  CHECK(s.threads == 2);
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("domain length rescales the vortex width unless given") {
  RunSettings a = parse_settings("L = 1e6\n");
  CHECK(a.bench.sigma_x == doctest::Approx(7.5e4));
  RunSettings b = parse_settings("sigma_x = 2e5\nL = 1e6\n");
  CHECK(b.bench.sigma_x == 2e5);
  CHECK(b.bench.sigma_y == doctest::Approx(7.5e4));
}

TEST_CASE("bad settings name the line") {
  CHECK_THROWS_WITH_AS(parse_settings("n = 10\nbogus = 1\n"),
                       doctest::Contains("line 2: unknown setting 'bogus'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_settings("n = ten\n"), doctest::Contains("line 1"), ConfigError);
  CHECK_THROWS_AS(parse_settings("n 10\n"), ConfigError);
  CHECK_THROWS_AS(parse_settings("n =\n"), ConfigError);
  CHECK_THROWS_AS(parse_settings("dt = 1e999\n"), ConfigError);
  CHECK_THROWS_AS(parse_settings("K = 3.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_settings("threads = 0\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse_settings("newton_tol = -1\n").validate(), ConfigError);
  CHECK_THROWS_AS(load_settings("/nonexistent/rtswe.cfg"), IoError);
}

TEST_CASE("formatted settings parse back to the same values") {
  RunSettings s = parse_settings("n = 24\ndt = 123.25\np = 9\nf = 1e-4\n");
  const RunSettings t = parse_settings(format_settings(s));
  CHECK(format_settings(t) == format_settings(s));
  CHECK(t.bench.dt == 123.25);
  CHECK(t.bench.p_override == 9);
}
