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

// Shared fixtures for the unit and acceptance tests. Reference quantities are
// computed with Eigen solvers that the library itself does not use (Jacobi
// SVD, generalized self-adjoint solver, closed forms).

#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <unistd.h>

#include "gepsim/matcore.hpp"

namespace gepsim::testing {

inline constexpr double kPi = std::numbers::pi;

inline CMatrix random_hermitian(Index n, Rng& rng) {
  const CMatrix G = complex_gaussian(n, n, rng);
  return (G + G.adjoint()) / 2.0;
}

inline CMatrix random_spd(Index n, Rng& rng, double shift = 1.0) {
  const CMatrix G = complex_gaussian(n, n, rng);
  return G * G.adjoint() / static_cast<double>(n) + shift * CMatrix::Identity(n, n);
}

inline RVector jacobi_singular_values(const CMatrix& M) {
  Eigen::JacobiSVD<CMatrix> svd(M);
  return svd.singularValues();
}

inline double jacobi_norm(const CMatrix& M) { return jacobi_singular_values(M)(0); }

inline double jacobi_cond(const CMatrix& M) {
  const RVector s = jacobi_singular_values(M);
  return s(0) / s(s.size() - 1);
}

/// Sorted real spectrum of a symmetric pair via Eigen's generalized solver.
inline std::vector<double> symmetric_pair_spectrum(const CMatrix& A, const CMatrix& B) {
  Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> es(A, B);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + A.rows());
  std::sort(v.begin(), v.end());
  return v;
}

/// Roots of a z^2 + b z + c (a may vanish).
inline std::vector<cd> quadratic_roots(cd a, cd b, cd c) {
  if (std::abs(a) == 0.0) return {-c / b};
  const cd disc = std::sqrt(b * b - 4.0 * a * c);
  return {(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)};
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("gepsim_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace gepsim::testing
