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

// Dense complex linear algebra shared by every other module.
//
// All routines are pure functions of their arguments. Tolerances that decide
// whether an input is acceptable (pivot threshold, hermiticity, definiteness)
// are fixed here so that every caller agrees on them.

#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "gepsim/error.hpp"

namespace gepsim {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

/// Eigenpairs with unit-norm eigenvector columns.
struct EigDecomp {
  CVector values;
  CMatrix vectors;
  double kappaE = 1.0;  // sigma_max(vectors) / sigma_min(vectors)
};

struct SvdExtremes {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
};

enum class MatFun { Sqrt, InvSqrt, Inv };

inline constexpr double kPivotTolerance = 1e-13;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kPositiveTolerance = 1e-12;
inline constexpr double kMaxEigenbasisCondition = 1e8;
inline constexpr Index kFullSvdLimit = 4096;

/// Solves M y = b by partial-pivoted elimination. Throws SingularMatrix when a
/// pivot falls below 1e-13 * max|M_ij|.
CVector lu_solve(const CMatrix& M, const CVector& b);
CMatrix lu_solve(const CMatrix& M, const CMatrix& B);

/// Hermitian eigendecomposition; values ascending (imaginary parts zero).
EigDecomp herm_eig(const CMatrix& H);

/// Eigenpairs of the pencil (A, B) via B^{-1} A. Values are sorted by real
/// part, then imaginary part; vectors are unit-norm.
EigDecomp gen_eig(const CMatrix& A, const CMatrix& B);

/// Largest and smallest singular value. Full SVD up to kFullSvdLimit rows,
/// power / inverse iteration above.
SvdExtremes svd_extremes(const CMatrix& M);

/// The iterative path of svd_extremes, exposed for testing on small inputs.
/// Square matrices only.
SvdExtremes svd_extremes_iterative(const CMatrix& M, int max_iterations = 50);

/// Unitary DFT matrix, F[k][l] = exp(2 pi i k l / p) / sqrt(p).
CMatrix dft_matrix(Index p);

CMatrix kron(const CMatrix& A, const CMatrix& B);

/// Column-stacking vectorization: entry (i, j) lands at j * rows + i.
CVector vec(const CMatrix& A);
CMatrix unvec(const CVector& v, Index rows, Index cols);

/// f(H) evaluated in the eigenbasis of the Hermitian matrix H.
CMatrix matfun_herm(const CMatrix& H, MatFun f);

// Small helpers used across modules.

double op_norm(const CMatrix& M);
double max_abs(const CMatrix& M);
bool is_hermitian(const CMatrix& H, double tol = kHermitianTolerance);
bool all_finite(const CMatrix& M);
double condition_number(const CMatrix& M);
CMatrix hermitian_part(const CMatrix& H);

/// Normalizes each column to unit 2-norm (zero columns are left untouched).
CMatrix normalize_columns(const CMatrix& V);

/// n x n matrix of i.i.d. standard complex Gaussians (real and imaginary parts
/// each N(0, 1/2)).
CMatrix complex_gaussian(Index rows, Index cols, Rng& rng);

/// Haar-distributed unitary: QR of a complex Gaussian with the phases of
/// diag(R) moved into Q.
CMatrix haar_unitary(Index n, Rng& rng);

/// Unit vector drawn uniformly from the complex sphere.
CVector random_unit_vector(Index n, Rng& rng);

}  // namespace gepsim
