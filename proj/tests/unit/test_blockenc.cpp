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

#include "gepsim/blockenc.hpp"
#include "gepsim/instances.hpp"
#include "gepsim/spectral.hpp"
#include "helpers.hpp"

using namespace gepsim;
using namespace gepsim::testing;

namespace {

CMatrix diag2(double a, double b) {
  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = a;
  D(1, 1) = b;
  return D;
}

double max_dev(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("dilate") {
  const BlockEncoding id = dilate(CMatrix::Identity(3, 3), 1.0);
  CHECK(id.q == 1);
  CHECK(max_dev(id.block(), CMatrix::Identity(3, 3)) < 1e-15);
  CHECK(unitarity_defect(id.U) < 1e-14);

  const BlockEncoding z = dilate(CMatrix::Zero(2, 2), 1.0);
  CMatrix X = CMatrix::Zero(2, 2);
  X(0, 1) = X(1, 0) = 1.0;
  CHECK(max_dev(z.U.cwiseAbs().cast<cd>(), kron(X, CMatrix::Identity(2, 2))) < 1e-15);

  Rng rng(1);
  const CMatrix A = complex_gaussian(3, 3, rng);
  const BlockEncoding d = dilate(A, 2.0 * jacobi_norm(A));
  CHECK(max_dev(d.alpha * d.block(), A) <= 1e-10);
  CHECK(unitarity_defect(d.U) < 1e-12);
  CHECK(verify_be(d, A).extraction <= 1e-10);

  try {
    dilate(A, 0.5 * jacobi_norm(A));
    FAIL("expected AlphaTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AlphaTooSmall);
  }
}

TEST_CASE("rescale_be") {
  Rng rng(2);
  const CMatrix A = complex_gaussian(2, 2, rng);
  BlockEncoding be = dilate(A, 3.0 * jacobi_norm(A));
  be.err = 1e-3;
  const BlockEncoding same = rescale_be(be, 1.0);
  CHECK(same.alpha == be.alpha);
  CHECK(same.U == be.U);
  const BlockEncoding two = rescale_be(be, 2.0);
  CHECK(two.alpha == 2.0 * be.alpha);
  CHECK(two.err == 2.0 * be.err);
  CHECK(verify_be(two, 2.0 * A).extraction <= 2.0 * two.err);
}

TEST_CASE("product_be") {
  const BlockEncoding i1 = unitary_be(CMatrix::Identity(2, 2));
  const BlockEncoding ii = product_be(i1, i1);
  CHECK(max_dev(ii.block(), CMatrix::Identity(2, 2)) < 1e-15);

  const BlockEncoding e1 = dilate(diag2(1, 2), 4.0);
  const BlockEncoding e2 = dilate(diag2(3, 4), 5.0);
  const BlockEncoding p = product_be(e1, e2);
  CHECK(p.q == 2);
  CHECK(p.alpha == 20.0);
  CHECK(max_dev(p.block(), diag2(3.0 / 20.0, 8.0 / 20.0)) < 1e-15);
  CHECK(unitarity_defect(full_unitary(p)) < 1e-13);

  // Error propagation on inexact encodings.
  Rng rng(3);
  const CMatrix A1 = complex_gaussian(2, 2, rng);
  const CMatrix A2 = complex_gaussian(2, 2, rng);
  const CMatrix P1 = A1 + 1e-4 * complex_gaussian(2, 2, rng);
  const CMatrix P2 = A2 + 1e-4 * complex_gaussian(2, 2, rng);
  BlockEncoding b1 = dilate(P1, 2.0 * jacobi_norm(P1));
  BlockEncoding b2 = dilate(P2, 2.0 * jacobi_norm(P2));
  b1.err = jacobi_norm(P1 - A1);
  b2.err = jacobi_norm(P2 - A2);
  const BlockEncoding b12 = product_be(b1, b2);
  const double measured = jacobi_norm(A1 * A2 - b12.alpha * b12.block());
  CHECK(measured <= b1.alpha * b2.err + b2.alpha * b1.err + 1e-12);
  CHECK(b12.err == doctest::Approx(b1.alpha * b2.err + b2.alpha * b1.err));
}

TEST_CASE("tensor, unitary and projected row encodings") {
  const CMatrix F = dft_matrix(5);
  const BlockEncoding uf = unitary_be(F);
  CHECK(uf.q == 0);
  CHECK(uf.block() == F);
  CHECK_THROWS_AS(unitary_be(2.0 * F), Error);

  const BlockEncoding a = dilate(CMatrix::Constant(1, 1, 0.3), 1.0);
  const BlockEncoding b = dilate(CMatrix::Constant(1, 1, -0.7), 2.0);
  const BlockEncoding ab = tensor_be(a, b);
  CHECK(ab.q == 2);
  CHECK(std::abs(ab.alpha * ab.block()(0, 0) - cd(-0.21)) < 1e-15);
  CHECK(unitarity_defect(full_unitary(ab)) < 1e-14);

  const BlockEncoding r = projected_row_be(4);
  CHECK(r.q == 2);
  const CMatrix blk = r.block();
  for (Index k = 0; k < 4; ++k) {
    CHECK(std::abs(blk(0, k) - 0.5) < 1e-15);
    for (Index l = 1; l < 4; ++l) CHECK(std::abs(blk(l, k)) < 1e-15);
  }
  CHECK(unitarity_defect(full_unitary(r)) < 1e-13);

  const BlockEncoding padded = pad_be(a, 3);
  CHECK(padded.q == 4);
  CHECK(padded.idle == 3);
  CHECK(full_unitary(padded).rows() == (Index(1) << padded.q));
  CHECK(ceil_log2(1) == 0);
  CHECK(ceil_log2(5) == 3);
  CHECK(ceil_log2(8) == 3);
}

TEST_CASE("lcu_combine") {
  Rng rng(4);
  const CMatrix A = complex_gaussian(2, 2, rng);
  const BlockEncoding be = dilate(A, 2.0 * jacobi_norm(A));

  const BlockEncoding single = lcu_combine({{1.0, be}});
  CHECK(single.q == be.q + 1);
  CHECK(single.alpha == doctest::Approx(be.alpha));
  CHECK(verify_be(single, A).extraction < 1e-12);

  const BlockEncoding cancel = lcu_combine({{1.0, be}, {-1.0, be}});
  CHECK(max_dev(cancel.block(), CMatrix::Zero(2, 2)) < 1e-15);
  CHECK(unitarity_defect(full_unitary(cancel)) < 1e-13);

  const CMatrix B = complex_gaussian(2, 2, rng);
  const BlockEncoding bb = dilate(B, 2.0 * jacobi_norm(B));
  const BlockEncoding mix = lcu_combine({{0.5, be}, {-2.0, bb}, {1.0, unitary_be(CMatrix::Identity(2, 2))}});
  CHECK(verify_be(mix, 0.5 * A - 2.0 * B + CMatrix::Identity(2, 2)).extraction < 1e-12);
  CHECK(unitarity_defect(full_unitary(mix)) < 1e-13);

  try {
    lcu_combine({});
    FAIL("expected EmptyTerms");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyTerms);
  }
}

TEST_CASE("build_M_be matches the collocation matrix") {
  GepInstance trivial;
  trivial.A = CMatrix::Zero(1, 1);
  trivial.B = CMatrix::Identity(1, 1);
  Rng rng(5);
  GepInstance random;
  random.A = complex_gaussian(2, 2, rng);
  random.B = complex_gaussian(2, 2, rng) + 3.0 * CMatrix::Identity(2, 2);

  for (const auto& [inst, p] : {std::pair{trivial, Index{3}}, std::pair{random, Index{5}}}) {
    const SpectralParams params = params_with_nodes(0.5, 1.0, p);
    CVector e0 = CVector::Zero(inst.n());
    e0(0) = 1.0;
    const CMatrix M = build_system(inst, e0, params).M;
    const BlockEncoding be = build_M_be(inst, params);
    const BeDefects d = verify_be(be, M);
    CHECK(d.extraction <= 1e-9);
    CHECK(d.unitarity <= 1e-9);
    CHECK(be.alpha >= jacobi_norm(M));

    const double nA = jacobi_norm(inst.A);
    const double aA = nA > 0 ? 2.0 * nA : 1.0;
    const double aB = 2.0 * jacobi_norm(inst.B);
    const double want = 2.0 * aA + aB * double(p - 1) / params.tau + 1.0;
    CHECK(be.alpha == doctest::Approx(want).epsilon(1e-12));
    CHECK(be.q == 1 + 2 * ceil_log2(p) + 3);
  }

  GepInstance big;
  big.A = CMatrix::Identity(40, 40);
  big.B = CMatrix::Identity(40, 40);
  try {
    build_M_be(big, params_with_nodes(0.5, 1.0, 15));
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooLarge);
  }
}

TEST_CASE("verify_be reports corruption without throwing") {
  const BlockEncoding d = dilate(CMatrix::Identity(2, 2) * 0.5, 1.0);
  CHECK(verify_be(d, CMatrix::Identity(2, 2) * 0.5).extraction <= 1e-10);
  BlockEncoding bad = d;
  bad.U(0, 0) += 0.3;
  const BeDefects def = verify_be(bad, CMatrix::Identity(2, 2) * 0.5);
  CHECK(def.extraction > 0.1);
  CHECK(def.unitarity > 0.1);
}
