#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rtswe/deim.hpp"

using namespace rtswe;

TEST_CASE("nonlinear vectors match their pointwise definitions") {
  const Model m = make_model(build_grid(7, 1e6, 1e6), 1e-4, 9.8);
  Physics phys = m.physics;
  phys.b = Vector::Random(m.N());
  const Vector z = oracle::smooth_state(m.grid);
  const Index N = m.N();
  const Vector h = z.segment(0, N), u = z.segment(N, N), v = z.segment(2 * N, N),
               s = z.segment(3 * N, N);
  const Vector sx = oracle::dense_dx(m.grid) * s, sy = oracle::dense_dy(m.grid) * s;
  const Vector q = (oracle::dense_dx(m.grid) * v - oracle::dense_dy(m.grid) * u +
                    Vector::Constant(N, 1e-4)).cwiseQuotient(h);
  const auto F = all_nonlinearities(z, phys, m.ops);
  const Vector grad = oracle::grad_h(z, phys.b, N);
  auto close = [](const Vector& a, const Vector& b) { return (a - b).norm() <= 1e-13 * b.norm(); };
  CHECK(close(F[0], q));
  CHECK(close(F[1], sx.cwiseQuotient(h)));
  CHECK(close(F[2], sy.cwiseQuotient(h)));
  CHECK(close(F[3], grad.segment(0, N)));
  CHECK(close(F[4], grad.segment(N, N)));
  CHECK(close(F[5], grad.segment(2 * N, N)));
  CHECK(close(F[6], grad.segment(3 * N, N)));
  for (int j = 1; j <= 7; ++j) CHECK(nonlinearity(j, z, phys, m.ops) == F[j - 1]);
  CHECK_THROWS_AS(nonlinearity(0, z, phys, m.ops), ConfigError);
  CHECK_THROWS_AS(nonlinearity(8, z, phys, m.ops), ConfigError);
  Vector bad = z;
  bad(3) = -1.0;
  CHECK_THROWS_AS(nonlinearity(2, bad, phys, m.ops), NumericError);
}

TEST_CASE("Q-DEIM selection and interpolation") {
  Matrix phi = Matrix::Random(50, 6);
  Eigen::HouseholderQR<Matrix> qr(phi);
  phi = qr.householderQ() * Matrix::Identity(50, 6);
  const std::vector<Index> idx = qdeim_select(phi);
  CHECK(idx.size() == 6);
  // First pivot is the row of largest norm.
  Index best = 0;
  phi.rowwise().norm().maxCoeff(&best);
  CHECK(idx[0] == best);
  std::vector<Index> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());

  const DeimOperator op = make_deim_operator(phi);
  CHECK(op.indices == idx);
  Matrix Pt_psi(6, 6);
  for (int i = 0; i < 6; ++i) Pt_psi.row(i) = op.psi.row(idx[i]);
  CHECK((Pt_psi - Matrix::Identity(6, 6)).norm() <= 1e-12);
  Matrix Pt_phi(6, 6);
  for (int i = 0; i < 6; ++i) Pt_phi.row(i) = phi.row(idx[i]);
  Eigen::JacobiSVD<Matrix> svd(Pt_phi);
  const Vector sv = svd.singularValues();
  CHECK(op.condition == doctest::Approx(sv(0) / sv(5)).epsilon(1e-10));
  // Worst-case Q-DEIM bound on the error amplification.
  CHECK(op.condition <= std::sqrt(50.0 * 6.0) * std::pow(2.0, 6) + 1.0);

  // Vectors in the span are reproduced exactly.
  const Vector c = Vector::Random(6);
  const Vector F = phi * c;
  CHECK((deim_reconstruct(op, deim_select(op, F)) - F).norm() <= 1e-12 * F.norm());
  CHECK_THROWS_AS(deim_reconstruct(op, Vector::Zero(5)), ConfigError);
  CHECK_THROWS_AS(deim_select(op, Vector::Zero(49)), ConfigError);

  Matrix deficient = phi;
  deficient.col(3) = deficient.col(1);
  CHECK_THROWS_AS(qdeim_select(deficient), NumericError);
  CHECK_THROWS_AS(qdeim_select(Matrix::Random(3, 4)), ConfigError);
}

TEST_CASE("DEIM set on the benchmark") {
  const auto& run = fixture::small_run(12, 30, 4, 6);
  CHECK(run.deim.p == 6);
  for (int j = 0; j < kNumNonlinear; ++j) {
    const DeimOperator& op = run.deim.op[j];
    CHECK(op.p() == 6);
    CHECK((op.phi.transpose() * op.phi - Matrix::Identity(6, 6)).norm() <= 1e-12);
    CHECK(op.condition >= 1.0);
    CHECK(run.deim.criterion_rank[j] == truncate_rank(op.sigma, 1e-5));
  }
  // Without an override the common p is the largest criterion rank.
  const auto snaps = collect_nonlin_snapshots(run.states, run.basis, run.model.physics,
                                              run.model.ops);
  const DeimSet free = build_deim(snaps, 1e-5);
  CHECK(free.p == *std::max_element(free.criterion_rank.begin(), free.criterion_rank.end()));
  CHECK_THROWS_AS(build_deim(snaps, 1e-5, 0), ConfigError);
  CHECK_THROWS_AS(build_deim(snaps, 1e-5, 31), ConfigError);

  // Snapshots come from reconstructions, not the raw states.
  const auto raw = collect_nonlin_snapshots(run.states, run.basis, run.model.physics,
                                            run.model.ops, NonlinSource::raw);
  const Vector zr = lift(run.basis, restrict_state(run.basis, run.states.col(4)));
  CHECK((snaps.S[4].col(3) - nonlinearity(5, zr, run.model.physics, run.model.ops)).norm() <=
        1e-12 * snaps.S[4].col(3).norm());
  CHECK((raw.S[4].col(3) -
         nonlinearity(5, run.states.col(4), run.model.physics, run.model.ops)).norm() <=
        1e-12 * raw.S[4].col(3).norm());
}

TEST_CASE("sampler equals full evaluation followed by selection") {
  const auto& run = fixture::small_run(12, 30, 4, 6);
  const DeimSampler sampler(run.basis, run.deim, run.model.grid, run.model.physics);
  CHECK(sampler.r() == 4);
  CHECK(sampler.p() == 6);
  CHECK(sampler.closure_size() <= 5 * 7 * 6);
  CHECK(sampler.closure_size() < run.model.N());
  for (int k : {0, 10, 30}) {
    const Vector c = restrict_state(run.basis, run.states.col(k));
    const Vector z = lift(run.basis, c);
    const auto sampled = sampler.evaluate(c);
    for (int j = 1; j <= kNumNonlinear; ++j) {
      const Vector full = nonlinearity(j, z, run.model.physics, run.model.ops);
      const Vector expect = deim_select(run.deim.op[j - 1], full);
      CHECK((sampled[j - 1] - expect).norm() <= 1e-12 * std::max(1.0, expect.norm()));
    }
  }

  OnlineCounters counters;
  DeimSampler::Samples samples;
  std::array<Vector, kNumNonlinear> out;
  sampler.lift_samples(restrict_state(run.basis, run.states.col(3)), samples, &counters);
  sampler.evaluate(samples, 1, 7, out, &counters);
  CHECK(counters.full_order_ops == 0);
  CHECK(counters.sampling_flops > 0);

  Vector crushed = restrict_state(run.basis, run.states.col(3));
  crushed.head(4) *= 0.0;
  crushed(0) = -1e6;
  CHECK_THROWS_AS(sampler.evaluate(crushed), NumericError);
  CHECK_THROWS_AS(sampler.evaluate(Vector::Zero(15)), ConfigError);
}
