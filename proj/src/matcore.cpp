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

#include "gepsim/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace gepsim {
namespace {

void require_square(const CMatrix& M, const char* what) {
  if (M.rows() != M.cols()) {
    throw Error(Errc::DimensionMismatch,
                std::string(what) + " must be square, got " + std::to_string(M.rows()) + "x" +
                    std::to_string(M.cols()));
  }
}

// Factorizes M and rejects it when a pivot is below the singularity threshold.
Eigen::PartialPivLU<CMatrix> checked_lu(const CMatrix& M, Errc on_singular) {
  require_square(M, "matrix");
  const double scale = max_abs(M);
  if (M.size() == 0 || scale == 0.0) {
    throw Error(on_singular, "zero matrix");
  }
  Eigen::PartialPivLU<CMatrix> lu(M);
  const double threshold = kPivotTolerance * scale;
  const auto& packed = lu.matrixLU();
  for (Index i = 0; i < packed.rows(); ++i) {
    if (!(std::abs(packed(i, i)) > threshold)) {
      throw Error(on_singular, "pivot " + std::to_string(i) + " below threshold");
    }
  }
  return lu;
}

}  // namespace

CVector lu_solve(const CMatrix& M, const CVector& b) {
  if (b.size() != M.rows()) {
    throw Error(Errc::DimensionMismatch, "right-hand side length differs from matrix rows");
  }
  return checked_lu(M, Errc::SingularMatrix).solve(b);
}

CMatrix lu_solve(const CMatrix& M, const CMatrix& B) {
  if (B.rows() != M.rows()) {
    throw Error(Errc::DimensionMismatch, "right-hand side rows differ from matrix rows");
  }
  return checked_lu(M, Errc::SingularMatrix).solve(B);
}

EigDecomp herm_eig(const CMatrix& H) {
  require_square(H, "Hermitian input");
  if (!is_hermitian(H)) {
    throw Error(Errc::NotHermitian, "input is not Hermitian within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(H));
  EigDecomp out;
  out.values = solver.eigenvalues().cast<cd>();
  out.vectors = solver.eigenvectors();
  out.kappaE = H.rows() == 0 ? 1.0 : condition_number(out.vectors);
  return out;
}

EigDecomp gen_eig(const CMatrix& A, const CMatrix& B) {
  require_square(A, "A");
  require_square(B, "B");
  if (A.rows() != B.rows()) {
    throw Error(Errc::DimensionMismatch, "A and B differ in size");
  }
  const Index n = A.rows();
  const auto lu = checked_lu(B, Errc::SingularB);
  const CMatrix reduced = lu.solve(A);

  Eigen::ComplexEigenSolver<CMatrix> solver(reduced);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::IllConditionedEigenbasis, "eigen solver did not converge");
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const CVector& raw = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (raw(a).real() != raw(b).real()) return raw(a).real() < raw(b).real();
    return raw(a).imag() < raw(b).imag();
  });

  EigDecomp out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    out.values(j) = raw(order[static_cast<std::size_t>(j)]);
    out.vectors.col(j) = solver.eigenvectors().col(order[static_cast<std::size_t>(j)]);
  }
  out.vectors = normalize_columns(out.vectors);

  // Polish pairs whose pencil residual misses the contract (happens when B is
  // poorly conditioned): a few steps of shifted inverse iteration.
  const double normA = op_norm(A);
  const double normB = op_norm(B);
  for (Index j = 0; j < n; ++j) {
    const cd lambda = out.values(j);
    const double tol = 1e-8 * (normA + std::abs(lambda) * normB);
    CVector v = out.vectors.col(j);
    for (int step = 0; step < 3; ++step) {
      const double residual = (A * v - lambda * (B * v)).norm();
      if (residual <= 0.1 * tol) break;
      const cd shift = lambda + cd(1e-10 * (1.0 + std::abs(lambda)), 0.0);
      Eigen::PartialPivLU<CMatrix> shifted(A - shift * B);
      CVector w = shifted.solve(B * v);
      if (!w.allFinite() || w.norm() == 0.0) break;
      v = w / w.norm();
    }
    out.vectors.col(j) = v;
  }

  out.kappaE = n == 0 ? 1.0 : condition_number(out.vectors);
  if (!(out.kappaE < kMaxEigenbasisCondition)) {
    throw Error(Errc::IllConditionedEigenbasis,
                "eigenvector matrix condition number " + std::to_string(out.kappaE));
  }
  return out;
}

SvdExtremes svd_extremes(const CMatrix& M) {
  if (M.size() == 0) return {};
  if (M.rows() <= kFullSvdLimit && M.cols() <= kFullSvdLimit) {
    Eigen::BDCSVD<CMatrix> svd(M);
    const RVector& s = svd.singularValues();
    return {s(0), s(s.size() - 1)};
  }
  if (M.rows() == M.cols()) return svd_extremes_iterative(M);
  // Tall or wide and large: work on the smaller Gram matrix.
  const CMatrix gram = M.rows() > M.cols() ? CMatrix(M.adjoint() * M) : CMatrix(M * M.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram, Eigen::EigenvaluesOnly);
  const RVector& ev = solver.eigenvalues();
  return {std::sqrt(std::max(ev(ev.size() - 1), 0.0)), std::sqrt(std::max(ev(0), 0.0))};
}

SvdExtremes svd_extremes_iterative(const CMatrix& M, int max_iterations) {
  require_square(M, "iterative SVD input");
  const Index n = M.rows();
  if (n == 0) return {};
  Rng rng(0x5eed5eedULL);
  SvdExtremes out;

  // Power iteration on M^H M for sigma_max.
  CVector x = random_unit_vector(n, rng);
  double previous = 0.0;
  for (int it = 0; it < 20 * max_iterations; ++it) {
    CVector y = M.adjoint() * (M * x);
    const double estimate = std::sqrt(std::abs(x.dot(y)));
    const double ny = y.norm();
    if (ny == 0.0) {
      previous = 0.0;
      break;
    }
    x = y / ny;
    if (it > 0 && std::abs(estimate - previous) <= 1e-12 * estimate) {
      previous = estimate;
      break;
    }
    previous = estimate;
  }
  out.sigma_max = previous;

  // Inverse iteration on (M^H M)^{-1} with Rayleigh-quotient estimates.
  Eigen::PartialPivLU<CMatrix> lu;
  try {
    lu = checked_lu(M, Errc::SingularMatrix);
  } catch (const Error&) {
    out.sigma_min = 0.0;
    return out;
  }
  x = random_unit_vector(n, rng);
  previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iterations; ++it) {
    const CVector w = lu.adjoint().solve(x);
    CVector y = lu.solve(w);
    y.normalize();
    const double estimate = (M * y).norm();
    x = y;
    if (std::abs(estimate - previous) < 1e-8 * estimate) {
      previous = estimate;
      break;
    }
    previous = estimate;
  }
  out.sigma_min = previous;
  return out;
}

CMatrix dft_matrix(Index p) {
  if (p < 1) throw Error(Errc::InvalidArgument, "DFT size must be positive");
  CMatrix F(p, p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(p));
  for (Index k = 0; k < p; ++k) {
    for (Index l = 0; l < p; ++l) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * l) % p) /
                           static_cast<double>(p);
      F(k, l) = std::polar(scale, angle);
    }
  }
  return F;
}

CMatrix kron(const CMatrix& A, const CMatrix& B) {
  CMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return out;
}

CVector vec(const CMatrix& A) {
  return Eigen::Map<const CVector>(A.data(), A.size());
}

CMatrix unvec(const CVector& v, Index rows, Index cols) {
  if (rows * cols != v.size()) {
    throw Error(Errc::DimensionMismatch, "vector length does not match rows*cols");
  }
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

CMatrix matfun_herm(const CMatrix& H, MatFun f) {
  const EigDecomp eig = herm_eig(H);
  const RVector lambda = eig.values.real();
  const Index n = lambda.size();
  if (n == 0) return H;
  const double scale = lambda.cwiseAbs().maxCoeff();
  RVector mapped(n);
  for (Index i = 0; i < n; ++i) {
    const double x = lambda(i);
    switch (f) {
      case MatFun::Sqrt:
      case MatFun::InvSqrt:
        if (!(x > kPositiveTolerance * scale)) {
          throw Error(Errc::NotPositiveDefinite, "eigenvalue " + std::to_string(x));
        }
        mapped(i) = f == MatFun::Sqrt ? std::sqrt(x) : 1.0 / std::sqrt(x);
        break;
      case MatFun::Inv:
        if (!(std::abs(x) > kPositiveTolerance * scale)) {
          throw Error(Errc::SingularMatrix, "eigenvalue " + std::to_string(x));
        }
        mapped(i) = 1.0 / x;
        break;
    }
  }
  const CMatrix out = eig.vectors * mapped.cast<cd>().asDiagonal() * eig.vectors.adjoint();
  return hermitian_part(out);
}

double op_norm(const CMatrix& M) { return svd_extremes(M).sigma_max; }

double max_abs(const CMatrix& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

bool is_hermitian(const CMatrix& H, double tol) {
  if (H.rows() != H.cols()) return false;
  const double scale = std::max(1.0, max_abs(H));
  return max_abs(H - H.adjoint()) <= tol * scale;
}

bool all_finite(const CMatrix& M) { return M.allFinite(); }

double condition_number(const CMatrix& M) {
  const SvdExtremes s = svd_extremes(M);
  if (s.sigma_min == 0.0) return std::numeric_limits<double>::infinity();
  return s.sigma_max / s.sigma_min;
}

CMatrix hermitian_part(const CMatrix& H) { return 0.5 * (H + H.adjoint()); }

CMatrix normalize_columns(const CMatrix& V) {
  CMatrix out = V;
  for (Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm > 0.0) out.col(j) /= norm;
  }
  return out;
}

CMatrix complex_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix out(rows, cols);
  // Fill column by column so the stream order is independent of storage order.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(i, j) = cd(re, im);
    }
  }
  return out;
}

CMatrix haar_unitary(Index n, Rng& rng) {
  const CMatrix Z = complex_gaussian(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(Z);
  CMatrix Q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(R(j, j));
    if (mag > 0.0) Q.col(j) *= R(j, j) / mag;
  }
  return Q;
}

CVector random_unit_vector(Index n, Rng& rng) {
  CVector v = complex_gaussian(n, 1, rng);
  const double norm = v.norm();
  if (norm == 0.0) {
    v.setZero();
    if (n > 0) v(0) = 1.0;
    return v;
  }
  return v / norm;
}

}  // namespace gepsim
