// Copyright 2026 The gepsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include "gepsim/baseline.hpp"
#include "gepsim/instances.hpp"
#include "helpers.hpp"

using namespace gepsim;
using namespace gepsim::testing;

TEST_CASE("reduce_symmetric") {
  Rng rng(1);
  GepInstance inst;
  inst.A = random_hermitian(3, rng);
  inst.B = CMatrix::Identity(3, 3);
  CHECK((reduce_symmetric(inst).Atilde - inst.A).norm() < 1e-14);
  inst.B *= 4.0;
  const SymmetricReduction r4 = reduce_symmetric(inst);
  CHECK((r4.Atilde - inst.A / 4.0).norm() < 1e-14);
  CHECK((r4.Bhalf * r4.Bneghalf - CMatrix::Identity(3, 3)).norm() < 1e-14);

  const GepInstance g = gen_symmetric(5, 40.0, {-1.0, -0.3, 0.2, 0.6, 1.5}, 6);
  const auto ref = symmetric_pair_spectrum(g.A, g.B);
  const EigDecomp h = herm_eig(reduce_symmetric(g).Atilde);
  for (Index i = 0; i < 5; ++i) CHECK(std::abs(h.values(i).real() - ref[std::size_t(i)]) < 1e-8);

  GepInstance bad;
  bad.A = complex_gaussian(2, 2, rng);
  bad.B = CMatrix::Identity(2, 2);
  try {
    reduce_symmetric(bad);
    FAIL("expected NotSymmetricPair");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotSymmetricPair);
  }
  GepInstance indef;
  indef.A = CMatrix::Identity(2, 2);
  indef.B = CMatrix::Identity(2, 2);
  indef.B(1, 1) = -1.0;
  CHECK_THROWS_AS(reduce_symmetric(indef), Error);
}

TEST_CASE("qpe_kernel against the direct sum") {
  for (Index M : {4, 16, 64}) {
    for (double delta : {0.0, 0.013, 0.25, 0.5 / double(M), -0.31}) {
      cd direct = 0.0;
      for (Index l = 0; l < M; ++l) direct += std::polar(1.0, 2 * kPi * double(l) * delta);
      direct /= double(M);
      CHECK(std::abs(qpe_kernel(delta, M) - direct) < 1e-12);
    }
  }
}

TEST_CASE("qpe_emulate on and off grid") {
  QpeConfig cfg;
  cfg.m = 4;
  cfg.shift = 0.0;
  cfg.scale = 1.0;
  const Index M = cfg.grid();
  for (Index k0 : {0, 3, 11}) {
    const CMatrix H = CMatrix::Constant(1, 1, double(k0) / double(M));
    const PhaseDistribution d = qpe_emulate(H, CVector::Ones(1), cfg);
    CHECK(d.probs(k0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (Index k0 : {2, 7}) {
    const CMatrix H = CMatrix::Constant(1, 1, (double(k0) + 0.5) / double(M));
    const PhaseDistribution d = qpe_emulate(H, CVector::Ones(1), cfg);
    CHECK(std::abs(d.probs(k0) - d.probs(k0 + 1)) < 1e-12);
    CHECK(d.probs(k0) >= 4.0 / (kPi * kPi));
  }

  Rng rng(7);
  const CMatrix H = random_hermitian(4, rng);
  Eigen::SelfAdjointEigenSolver<CMatrix> oracle(H);
  const QpeConfig c8 = [&] {
    QpeConfig c = qpe_config(H, 0.1);
    c.m = 8;
    return c;
  }();
  for (Index j = 0; j < 4; ++j) {
    const CVector v = oracle.eigenvectors().col(j);
    const PhaseDistribution d = qpe_emulate(H, v, c8);
    Index best = 0;
    d.probs.maxCoeff(&best);
    const double est = c8.value_of(double(best) / double(c8.grid()));
    CHECK(std::abs(est - oracle.eigenvalues()(j)) <= c8.scale / double(c8.grid()));
  }
}

TEST_CASE("qpe_config covers the spectrum") {
  Rng rng(8);
  const CMatrix H = random_hermitian(5, rng);
  const QpeConfig c = qpe_config(H, 0.01);
  Eigen::SelfAdjointEigenSolver<CMatrix> oracle(H);
  for (Index j = 0; j < 5; ++j) {
    const double th = c.phase_of(oracle.eigenvalues()(j));
    CHECK(th >= 0.0);
    CHECK(th < 1.0);
  }
  CHECK(c.scale / double(c.grid()) <= 0.01);
  CHECK_THROWS_AS(qpe_config(H, 1e-9), Error);
}

TEST_CASE("run_standard") {
  GepInstance d;
  d.A = CMatrix::Zero(2, 2);
  d.A(0, 0) = 1.0;
  d.A(1, 1) = 2.0;
  d.B = CMatrix::Identity(2, 2);
  const RunReport r = run_standard(d, CVector::Ones(2).normalized(), 0.05);
  REQUIRE(r.estimates.size() == 2);
  CHECK(std::abs(r.estimates[0] - 1.0) <= 0.05);
  CHECK(std::abs(r.estimates[1] - 2.0) <= 0.05);
  CHECK(r.method == "qpe");
  CHECK(r.qpe_bits > 0);

  const GepInstance g = gen_symmetric(4, 50.0, {-0.7, -0.2, 0.3, 0.8}, 11);
  Rng rng(3);
  const CVector phi0 = random_unit_vector(4, rng);
  const RunReport q = run_standard(g, phi0, 0.05);
  RunOptions opts;
  opts.diagnostics = false;
  const RunReport o = run_pipeline(g, phi0, 0.05, 0.0, opts);
  const auto ref = symmetric_pair_spectrum(g.A, g.B);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(std::abs(q.estimates[j] - ref[j]) <= 0.05);
    CHECK(std::abs(q.estimates[j] - o.estimates[j]) <= 0.1);
  }

  Rng rng2(4);
  GepInstance s;
  s.A = random_hermitian(3, rng2);
  s.B = CMatrix::Identity(3, 3);
  const CVector phi = random_unit_vector(3, rng2);
  const RunReport base = run_standard(s, phi, 0.05);
  for (double c : {0.5, 2.0, 10.0}) {
    GepInstance sc;
    sc.A = c * s.A;
    sc.B = c * s.B;
    const RunReport rc = run_standard(sc, phi, 0.05);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(rc.estimates[j] - base.estimates[j]) < 1e-9);
  }
}
