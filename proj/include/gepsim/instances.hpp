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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gepsim/matcore.hpp"

namespace gepsim {

enum class Family {
  Symmetric,
  DiagonalizableReal,
  DefiniteRotated,
  SingularA,
  QuadraticLinearized,
};

std::string_view family_tag(Family f) noexcept;
/// Accepts the canonical tags plus the short aliases used on the command line
/// (diagonalizable, rotated, singular, quadratic).
std::optional<Family> parse_family(std::string_view tag) noexcept;

struct QuadraticCoefficients {
  CMatrix a2;
  CMatrix a1;
  CMatrix a0;
};

/// A pencil (A, B) plus whatever ground truth the generator knows.
struct GepInstance {
  CMatrix A;
  CMatrix B;
  std::optional<EigDecomp> truth;
  Family family = Family::DiagonalizableReal;
  std::uint64_t seed = 0;
  /// Rotation angle used by gen_definite_rotated (radians).
  std::optional<double> rotation;
  /// Source quadratic of a linearized pencil.
  std::optional<QuadraticCoefficients> quadratic;

  Index n() const { return A.rows(); }
};

/// Throws unless A, B are square of equal size with finite entries.
void validate_shape(const GepInstance& inst);

/// max_j ||A E_j - lambda_j B E_j|| / (||A|| + |lambda_j| ||B||) over truth pairs.
double truth_residual(const GepInstance& inst);

/// Geometric grid from 1 to `ratio` with `n` points (single point -> {1}).
std::vector<double> geometric_values(Index n, double ratio);

/// Hermitian positive definite B with eigenvalues geometric in [1/kappaB, 1]
/// and A = B E diag(spectrum) E^{-1} for a B-orthonormal basis E.
GepInstance gen_symmetric(Index n, double kappaB, const std::vector<double>& spectrum,
                          std::uint64_t seed);

/// Non-Hermitian pencil with unit-norm eigenvector matrix of condition number
/// kappaE and ||B|| = 1, cond(B) = kappaB.
GepInstance gen_diagonalizable_real(Index n, double kappaE, const std::vector<double>& spectrum,
                                    double kappaB, std::uint64_t seed);

/// Rotates a symmetric base pair backwards by theta:
///   A' = A cos(theta) + B sin(theta),  B' = -A sin(theta) + B cos(theta),
/// so that the forward rotation by theta restores the positive-definite B.
GepInstance gen_definite_rotated(Index n, double theta, const GepInstance& base);

/// As gen_diagonalizable_real with at least one zero eigenvalue.
GepInstance gen_singular_A(Index n, const std::vector<double>& spectrum, double kappaB,
                           std::uint64_t seed, double kappaE = 4.0);

/// First companion linearization of lambda^2 A2 + lambda A1 + A0:
///   A = [[0, I], [-A0, -A1]],  B = [[I, 0], [0, A2]].
GepInstance gen_quadratic_linearized(const CMatrix& a2, const CMatrix& a1, const CMatrix& a0,
                                     std::uint64_t seed);

/// Real n x n orthogonal W such that diag(W^T diag(sigma^2) W) is all ones.
/// Requires sum(sigma^2) == n. Used to place singular values on a matrix with
/// unit-norm columns.
Eigen::MatrixXd unit_diagonal_rotation(const RVector& sigma, Rng& rng);

// Instance files.

inline constexpr std::string_view kInstanceMagic = "GEPINST";
inline constexpr int kInstanceVersion = 1;

void save_instance(const GepInstance& inst, const std::filesystem::path& path);
GepInstance load_instance(const std::filesystem::path& path);

std::string format_instance(const GepInstance& inst);
GepInstance parse_instance(std::string_view text);

/// Matrix Market "array complex general" files.
void save_matrix_market(const CMatrix& M, const std::filesystem::path& path);
CMatrix load_matrix_market(const std::filesystem::path& path);

/// Builds an instance from a pair of Matrix Market files; truth is computed
/// with gen_eig when the pencil admits it.
GepInstance load_matrix_market_pair(const std::filesystem::path& a_path,
                                    const std::filesystem::path& b_path,
                                    Family family = Family::DiagonalizableReal);

}  // namespace gepsim
