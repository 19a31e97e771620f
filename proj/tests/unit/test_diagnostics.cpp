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

#include "gepsim/diagnostics.hpp"
#include "gepsim/instances.hpp"
#include "helpers.hpp"

using namespace gepsim;
using namespace gepsim::testing;

namespace {

double lambda_min(const CMatrix& H) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double angle_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2 * kPi);
  return std::min(d, 2 * kPi - d);
}

}  // namespace

TEST_CASE("check_condM closed form for A = 0, B = I") {
  GepInstance z;
  z.A = CMatrix::Zero(2, 2);
  z.B = CMatrix::Identity(2, 2);
  const SpectralParams params = choose_params(0.1, 1.0);
  CHECK(collocation_operator_norm(z, params) ==
        doctest::Approx(double(params.p - 1) / 2.0 / params.tau).epsilon(1e-14));
  CVector e0 = CVector::Zero(2);
  e0(0) = 1.0;
  const auto [sandwich, inverse] = check_condM(z, e0, params);
  CHECK(sandwich.pass);
  CHECK(sandwich.lower <= sandwich.measured + 1e-9);
  CHECK(sandwich.measured <= sandwich.bound + 1e-9);
  CHECK(inverse.measured > 0.0);
}

TEST_CASE("check_condM inverse bound on symmetric and singular instances") {
  const GepInstance g = gen_symmetric(4, 20.0, {-0.9, -0.2, 0.4, 0.7}, 5);
  const CVector phi0 = CVector::Ones(4).normalized();
  for (double eps : {0.2, 0.1, 0.05}) {
    const SpectralParams params = choose_params(eps, choose_rho(g));
    const auto [sandwich, inverse] = check_condM(g, phi0, params);
    // Independent SVD of the system matrix.
    const RVector s = jacobi_singular_values(build_system(g, phi0, params).M);
    CHECK(inverse.measured == doctest::Approx(1.0 / s(s.size() - 1)).epsilon(1e-8));
    CHECK(sandwich.measured == doctest::Approx(s(0)).epsilon(1e-10));
    MESSAGE("eps=" << eps << " inverse-norm ratio " << inverse.ratio);
    CHECK(sandwich.pass);
    CHECK(inverse.ratio <= 1.0);
  }

  const GepInstance sa = gen_singular_A(4, {0.0, -0.5, 0.3, 0.8}, 10.0, 3);
  const SpectralParams params = choose_params(0.1, choose_rho(sa));
  const auto [sandwich, inverse] = check_condM(sa, phi0, params);
  const double binv = 1.0 / jacobi_singular_values(sa.B)(3);
  CHECK(inverse.bound == doctest::Approx(8 * kPi * sa.truth->kappaE * binv / 0.1).epsilon(1e-8));
  CHECK(sandwich.pass);
  CHECK(inverse.pass);

  GepInstance big;
  big.A = CMatrix::Identity(300, 300);
  big.B = CMatrix::Identity(300, 300);
  CHECK_THROWS_AS(check_condM(big, CVector::Ones(300).normalized(), choose_params(0.1, 1.0)),
                  Error);
}

TEST_CASE("crawford_number simple pairs") {
  const CrawfordResult a = crawford_number(CMatrix::Zero(3, 3), CMatrix::Identity(3, 3));
  CHECK(a.gamma == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(a.theta_star.has_value());
  CHECK(angle_gap(*a.theta_star, 0.0) < 1e-6);

  const CrawfordResult b = crawford_number(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2));
  CHECK(b.gamma == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  REQUIRE(b.theta_star.has_value());
  CHECK(angle_gap(*b.theta_star, kPi / 4.0) < 1e-6);

  CMatrix J = CMatrix::Zero(2, 2);
  J(0, 0) = 1.0;
  J(1, 1) = -1.0;
  const CrawfordResult c = crawford_number(J, J);
  CHECK_FALSE(c.theta_star.has_value());
  CHECK(c.gamma < 1e-4);
}

TEST_CASE("crawford_number recovers the rotation angle") {
  for (double theta : {0.3, 1.2, 2.5}) {
    const GepInstance base = gen_symmetric(3, 1.0, {-1.0, 0.2, 0.8}, 4);
    const GepInstance r = gen_definite_rotated(3, theta, base);
    const CrawfordResult c = crawford_number(r.A, r.B);
    REQUIRE(c.theta_star.has_value());
    CHECK(angle_gap(*c.theta_star, theta) < 1e-5);
    const CMatrix Bt = r.A * std::sin(*c.theta_star) + r.B * std::cos(*c.theta_star);
    CHECK(std::abs(c.gamma - lambda_min(Bt)) < 1e-8);
  }
  Rng rng(9);
  for (int t = 0; t < 5; ++t) {
    const CMatrix A = random_hermitian(4, rng);
    const CMatrix B = random_spd(4, rng, 0.5);
    const CrawfordResult c = crawford_number(A, B);
    CHECK(c.gamma >= lambda_min(B) - 1e-12);
    const BoundCheck d = crawford_norm_diagnostic(A, B, c.gamma);
    CHECK(d.bound > 0.0);
  }
}

TEST_CASE("chord") {
  CHECK(chord(cd(0.3, -0.2), cd(0.3, -0.2)) == 0.0);
  CHECK(chord(1.0, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  Rng rng(10);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    const cd a(g(rng), g(rng)), b(g(rng), g(rng));
    CHECK(chord(a, b) == chord(b, a));
    CHECK(chord(a, b) <= 1.0);
  }
}

TEST_CASE("check_kappaE") {
  const GepInstance id = gen_symmetric(3, 1.0, {0.1, 0.2, 0.3}, 1);
  CHECK(check_kappaE(id).measured == doctest::Approx(1.0).epsilon(1e-12));

  const GepInstance h = gen_symmetric(4, 100.0, {0.1, 0.5, -0.3, 0.9}, 2);
  const BoundCheck k100 = check_kappaE(h);
  CHECK(std::abs(k100.measured - 10.0) <= 1e-4);
  CHECK(k100.pass);

  // Proof construction E = B^{-1/2} V with V the eigenvectors of the reduced matrix.
  const GepInstance f = gen_symmetric(3, 4.0, {-0.4, 0.1, 0.6}, 3);
  Eigen::SelfAdjointEigenSolver<CMatrix> bs(f.B);
  const CMatrix Bmh = bs.eigenvectors() * bs.eigenvalues().cwiseSqrt().cwiseInverse().cast<cd>().asDiagonal() *
                      bs.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> rs(Bmh * f.A * Bmh);
  const CMatrix E = Bmh * rs.eigenvectors();
  CHECK(jacobi_cond(E) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(check_kappaE(f).measured == doctest::Approx(jacobi_cond(E)).epsilon(1e-8));

  // Repeated eigenvalues still give a B-orthonormal basis.
  const GepInstance rep = gen_symmetric(4, 25.0, {0.5, 0.5, -0.2, -0.2}, 4);
  const CMatrix Er = b_orthonormal_basis(rep);
  CHECK((Er.adjoint() * rep.B * Er - CMatrix::Identity(4, 4)).norm() < 1e-8);
  CHECK(std::abs(check_kappaE(rep).measured - 5.0) <= 1e-4);
}

TEST_CASE("perturbation_probe") {
  const GepInstance g = gen_symmetric(4, 10.0, {-0.5, 0.1, 0.3, 0.9}, 6);
  const PerturbationReport z = perturbation_probe(g, 0.0, 1);
  CHECK(z.max_shift < 1e-12);

  GepInstance d;
  d.A = CMatrix::Zero(3, 3);
  d.A(0, 0) = 1.0;
  d.A(1, 1) = 2.0;
  d.A(2, 2) = 3.0;
  d.B = CMatrix::Identity(3, 3);
  CMatrix dA = CMatrix::Zero(3, 3);
  dA(0, 0) = 1e-3;
  dA(1, 1) = -2e-3;
  dA(2, 2) = 5e-3;
  const PerturbationReport w = perturbation_probe(d, dA, CMatrix::Zero(3, 3));
  CHECK(w.shifts[0] == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(w.shifts[1] == doctest::Approx(-2e-3).epsilon(1e-9));
  CHECK(w.shifts[2] == doctest::Approx(5e-3).epsilon(1e-9));

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PerturbationReport r = perturbation_probe(g, 1e-4, seed);
    CHECK(r.ratio <= 1.1);
  }
  try {
    perturbation_probe(g, 1.0, 0);
    FAIL("expected PerturbationTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::PerturbationTooLarge);
  }
}

TEST_CASE("complexity_report") {
  Rng rng(12);
  GepInstance eye;
  eye.A = random_hermitian(3, rng);
  eye.A /= jacobi_norm(eye.A);
  eye.B = CMatrix::Identity(3, 3);
  const ComplexityReport r = complexity_report(eye, 0.1);
  const double base = r.alphaA / r.epsilon;
  for (double v : {r.ode, r.qpe_product, r.qpe_alt}) {
    CHECK(v / base >= 0.5);
    CHECK(v / base <= 5.0);
  }

  const GepInstance g = gen_symmetric(4, 100.0, {-0.6, 0.1, 0.4, 1.0}, 7);
  const ComplexityReport c = complexity_report(g, 0.05);
  CHECK(c.ode <= c.qpe_product);
  CHECK(c.ode <= c.qpe_alt);

  GepInstance t;
  t.A = CMatrix::Zero(1, 1);
  t.B = CMatrix::Identity(1, 1);
  const ComplexityReport tr = complexity_report(t, 0.1);
  for (double v : {tr.ode, tr.qpe_product, tr.qpe_alt}) {
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
  CHECK(format_complexity_table(tr).find("ode") != std::string::npos);
}
