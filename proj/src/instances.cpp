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

#include "gepsim/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>

namespace gepsim {
namespace {

void check_spectrum(Index n, const std::vector<double>& spectrum) {
  if (n < 1) throw Error(Errc::InvalidArgument, "dimension must be positive");
  if (static_cast<Index>(spectrum.size()) != n) {
    throw Error(Errc::BadSpectrumLength, "expected " + std::to_string(n) + " eigenvalues, got " +
                                             std::to_string(spectrum.size()));
  }
  for (double x : spectrum) {
    if (!std::isfinite(x)) throw Error(Errc::InvalidArgument, "spectrum must be finite");
  }
}

void check_kappa(double kappa, const char* what) {
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
    throw Error(Errc::InvalidArgument, std::string(what) + " must be >= 1");
  }
}

// Sorts eigenpairs by eigenvalue so truth ordering matches gen_eig.
EigDecomp sorted_truth(const std::vector<double>& spectrum, const CMatrix& vectors) {
  const Index n = static_cast<Index>(spectrum.size());
  std::vector<Index> order(spectrum.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return spectrum[static_cast<std::size_t>(a)] < spectrum[static_cast<std::size_t>(b)];
  });
  EigDecomp truth;
  truth.values.resize(n);
  truth.vectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    truth.values(j) = spectrum[static_cast<std::size_t>(src)];
    truth.vectors.col(j) = vectors.col(src);
  }
  truth.vectors = normalize_columns(truth.vectors);
  truth.kappaE = condition_number(truth.vectors);
  return truth;
}

CMatrix diag_matrix(const std::vector<double>& values) {
  RVector d(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) d(static_cast<Index>(i)) = values[i];
  return d.cast<cd>().asDiagonal();
}

// ||B|| = 1 and cond(B) = kappaB, with independent Haar factors on both sides.
CMatrix random_conditioned(Index n, double kappa, Rng& rng) {
  const std::vector<double> s = geometric_values(n, 1.0 / kappa);
  const CMatrix left = haar_unitary(n, rng);
  const CMatrix right = haar_unitary(n, rng);
  return left * diag_matrix(s) * right;
}

}  // namespace

std::string_view family_tag(Family f) noexcept {
  switch (f) {
    case Family::Symmetric: return "symmetric";
    case Family::DiagonalizableReal: return "diagonalizable_real";
    case Family::DefiniteRotated: return "definite_rotated";
    case Family::SingularA: return "singular_A";
    case Family::QuadraticLinearized: return "quadratic_linearized";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view tag) noexcept {
  if (tag == "symmetric") return Family::Symmetric;
  if (tag == "diagonalizable_real" || tag == "diagonalizable") return Family::DiagonalizableReal;
  if (tag == "definite_rotated" || tag == "rotated") return Family::DefiniteRotated;
  if (tag == "singular_A" || tag == "singular") return Family::SingularA;
  if (tag == "quadratic_linearized" || tag == "quadratic") return Family::QuadraticLinearized;
  return std::nullopt;
}

void validate_shape(const GepInstance& inst) {
  if (inst.A.rows() != inst.A.cols() || inst.B.rows() != inst.B.cols()) {
    throw Error(Errc::SchemaError, "A and B must be square");
  }
  if (inst.A.rows() != inst.B.rows()) {
    throw Error(Errc::DimensionMismatch, "A and B differ in size");
  }
  if (!all_finite(inst.A) || !all_finite(inst.B)) {
    throw Error(Errc::SchemaError, "non-finite matrix entry");
  }
}

double truth_residual(const GepInstance& inst) {
  if (!inst.truth) return 0.0;
  const double normA = op_norm(inst.A);
  const double normB = op_norm(inst.B);
  double worst = 0.0;
  for (Index j = 0; j < inst.truth->values.size(); ++j) {
    const cd lambda = inst.truth->values(j);
    const CVector v = inst.truth->vectors.col(j);
    const double r = (inst.A * v - lambda * (inst.B * v)).norm();
    const double scale = normA + std::abs(lambda) * normB;
    worst = std::max(worst, scale > 0.0 ? r / scale : r);
  }
  return worst;
}

std::vector<double> geometric_values(Index n, double ratio) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    out[static_cast<std::size_t>(i)] = std::pow(ratio, t);
  }
  return out;
}

Eigen::MatrixXd unit_diagonal_rotation(const RVector& sigma, Rng& rng) {
  const Index n = sigma.size();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd Z(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) Z(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
  Eigen::MatrixXd W = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd s2 = sigma.array().square();

  // Plane rotations that pin one diagonal entry of W^T S^2 W to 1 per step.
  for (Index step = 0; step < 4 * n; ++step) {
    const Eigen::MatrixXd G = W.transpose() * s2.asDiagonal() * W;
    Index lo = -1;
    Index hi = -1;
    for (Index i = 0; i < n; ++i) {
      if (G(i, i) < 1.0 - 1e-14 && lo < 0) lo = i;
      if (G(i, i) > 1.0 + 1e-14 && hi < 0) hi = i;
    }
    if (lo < 0 || hi < 0) break;
    const double gii = G(lo, lo);
    const double gjj = G(hi, hi);
    const double gij = G(lo, hi);
    const double disc = std::max(gij * gij - (gjj - 1.0) * (gii - 1.0), 0.0);
    const double t = (gij + std::copysign(std::sqrt(disc), gij == 0.0 ? 1.0 : gij)) / (gjj - 1.0);
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = c * t;
    const Eigen::VectorXd wi = W.col(lo);
    const Eigen::VectorXd wj = W.col(hi);
    W.col(lo) = c * wi - s * wj;
    W.col(hi) = s * wi + c * wj;
  }
  return W;
}

GepInstance gen_symmetric(Index n, double kappaB, const std::vector<double>& spectrum,
                          std::uint64_t seed) {
  check_spectrum(n, spectrum);
  check_kappa(kappaB, "kappaB");
  Rng rng(seed);

  const CMatrix Q = haar_unitary(n, rng);
  const std::vector<double> d = geometric_values(n, 1.0 / kappaB);
  std::vector<double> d_half(d.size());
  std::vector<double> d_neg_half(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d_half[i] = std::sqrt(d[i]);
    d_neg_half[i] = 1.0 / d_half[i];
  }
  const CMatrix B = hermitian_part(Q * diag_matrix(d) * Q.adjoint());
  const CMatrix b_half = hermitian_part(Q * diag_matrix(d_half) * Q.adjoint());
  const CMatrix b_neg_half = hermitian_part(Q * diag_matrix(d_neg_half) * Q.adjoint());

  const CMatrix V = haar_unitary(n, rng);
  const CMatrix A = hermitian_part(b_half * V * diag_matrix(spectrum) * V.adjoint() * b_half);
  const CMatrix E = b_neg_half * V;  // E^H B E = I

  GepInstance inst;
  inst.A = A;
  inst.B = B;
  inst.truth = sorted_truth(spectrum, E);
  inst.family = Family::Symmetric;
  inst.seed = seed;
  return inst;
}

GepInstance gen_diagonalizable_real(Index n, double kappaE, const std::vector<double>& spectrum,
                                    double kappaB, std::uint64_t seed) {
  check_spectrum(n, spectrum);
  check_kappa(kappaE, "kappaE");
  check_kappa(kappaB, "kappaB");
  Rng rng(seed);

  // Singular values geometric between 1 and 1/kappaE, scaled so that a matrix
  // with unit-norm columns can carry them (sum of squares = n).
  std::vector<double> sv = geometric_values(n, 1.0 / kappaE);
  RVector sigma(n);
  for (Index i = 0; i < n; ++i) sigma(i) = sv[static_cast<std::size_t>(i)];
  sigma *= std::sqrt(static_cast<double>(n) / sigma.squaredNorm());

  const CMatrix U = haar_unitary(n, rng);
  const Eigen::MatrixXd W = unit_diagonal_rotation(sigma, rng);
  const CMatrix E = normalize_columns(U * sigma.cast<cd>().asDiagonal() * W.cast<cd>());

  const CMatrix B = random_conditioned(n, kappaB, rng);
  const CMatrix E_inv = lu_solve(E, CMatrix(CMatrix::Identity(n, n)));
  const CMatrix A = B * E * diag_matrix(spectrum) * E_inv;

  GepInstance inst;
  inst.A = A;
  inst.B = B;
  inst.truth = sorted_truth(spectrum, E);
  inst.family = Family::DiagonalizableReal;
  inst.seed = seed;
  return inst;
}

GepInstance gen_definite_rotated(Index n, double theta, const GepInstance& base) {
  if (base.family != Family::Symmetric) {
    throw Error(Errc::NotSymmetricPair, "base instance must be from the symmetric family");
  }
  if (base.n() != n) throw Error(Errc::DimensionMismatch, "n differs from base dimension");
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  GepInstance inst;
  inst.A = c * base.A + s * base.B;
  inst.B = -s * base.A + c * base.B;
  inst.family = Family::DefiniteRotated;
  inst.seed = base.seed;
  inst.rotation = theta;
  if (base.truth) {
    // A x = l B x  =>  A' x = (l c + s) B x,  B' x = (c - l s) B x.
    EigDecomp truth = *base.truth;
    bool finite = true;
    std::vector<double> mapped(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
      const double l = truth.values(j).real();
      const double den = c - l * s;
      if (std::abs(den) < 1e-12 * (1.0 + std::abs(l))) finite = false;
      mapped[static_cast<std::size_t>(j)] = (l * c + s) / den;
    }
    if (finite) inst.truth = sorted_truth(mapped, truth.vectors);
  }
  return inst;
}

GepInstance gen_singular_A(Index n, const std::vector<double>& spectrum, double kappaB,
                           std::uint64_t seed, double kappaE) {
  check_spectrum(n, spectrum);
  if (std::none_of(spectrum.begin(), spectrum.end(), [](double x) { return x == 0.0; })) {
    throw Error(Errc::InvalidArgument, "singular_A spectrum must contain a zero");
  }
  GepInstance inst = gen_diagonalizable_real(n, kappaE, spectrum, kappaB, seed);
  inst.family = Family::SingularA;
  return inst;
}

GepInstance gen_quadratic_linearized(const CMatrix& a2, const CMatrix& a1, const CMatrix& a0,
                                     std::uint64_t seed) {
  const Index m = a2.rows();
  if (m < 1 || a2.cols() != m || a1.rows() != m || a1.cols() != m || a0.rows() != m ||
      a0.cols() != m) {
    throw Error(Errc::DimensionMismatch, "quadratic coefficients must be square of equal size");
  }
  try {
    (void)lu_solve(a2, CVector(CVector::Zero(m)));
  } catch (const Error&) {
    throw Error(Errc::SingularLeadingCoefficient, "A2 is singular");
  }
  const Index n = 2 * m;
  CMatrix A = CMatrix::Zero(n, n);
  CMatrix B = CMatrix::Zero(n, n);
  A.topRightCorner(m, m).setIdentity();
  A.bottomLeftCorner(m, m) = -a0;
  A.bottomRightCorner(m, m) = -a1;
  B.topLeftCorner(m, m).setIdentity();
  B.bottomRightCorner(m, m) = a2;

  GepInstance inst;
  inst.A = A;
  inst.B = B;
  inst.family = Family::QuadraticLinearized;
  inst.seed = seed;
  inst.quadratic = QuadraticCoefficients{a2, a1, a0};
  try {
    inst.truth = gen_eig(A, B);
  } catch (const Error&) {
    // Defective or badly conditioned pencils carry no truth.
  }
  return inst;
}

}  // namespace gepsim
