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

// Fourier collocation of B x' = 2 pi i A x and the phase readout that turns
// its solution into eigenvalue estimates.
//
// The solution is expanded as x(t) = sum_k c_k exp(2 pi i d_k t / tau) with
// centered frequencies d_k = k - (p-1)/2. Coefficients are stacked k-major:
// vec(C)[k * n + j] = (c_k)_j.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gepsim/instances.hpp"
#include "gepsim/matcore.hpp"

namespace gepsim {

inline constexpr Index kMaxNodes = 20001;

struct SpectralParams {
  double epsilon = 0.0;
  double rho = 1.0;
  double h = 0.5;
  Index p = 1;
  double tau = 0.5;

  Index half_band() const { return (p - 1) / 2; }
};

struct SpectralSystem {
  CMatrix M;
  CVector rhs;
  SpectralParams params;
  Index n = 0;
};

/// Output register state after post-processing. Row a of `amps` holds the
/// system amplitudes attached to register value a; the register value a
/// corresponds to frequency unwrap(a).
struct PhaseDistribution {
  RVector probs;
  CMatrix amps;
};

struct Extraction {
  std::vector<double> estimates;
  std::vector<Index> frequencies;  // unwrapped grid index of each estimate
  std::vector<double> peak_masses;
  std::vector<bool> supported;  // false when phi0 has no component on that eigenvector
};

struct RunOptions {
  std::uint64_t seed = 0;
  /// Computes kappa(M), the inverse-norm ratio and the truncation residual.
  bool diagnostics = true;
};

struct RunReport {
  std::string method;
  SpectralParams params;
  std::vector<double> truth;  // real parts of the reference eigenvalues
  std::vector<double> estimates;
  std::vector<double> truth_errors;
  std::vector<double> peak_masses;
  std::vector<bool> supported;
  double kappaM = 0.0;
  double bound_ratio = 0.0;
  double solve_residual = 0.0;
  double truncation = 0.0;
  int qpe_bits = 0;  // phase-register width, baseline only
  PhaseDistribution dist;

  /// Largest error over supported eigenvalues (all of them when no support data).
  double max_error() const;
};

/// h = 1/(2 rho), p = smallest odd integer >= 2 rho / epsilon, tau = p h.
SpectralParams choose_params(double epsilon, double rho);

/// Same step rule with an explicit odd node count.
SpectralParams params_with_nodes(double epsilon, double rho, Index p);

/// rho from the truth spectrum when present, else from ||A|| / sigma_min(B).
double choose_rho(const GepInstance& inst);

/// Throws SingularB unless sigma_min(B) > 1e-10 ||B||.
void require_nonsingular_B(const CMatrix& B);

/// diag(k - (p-1)/2).
CMatrix build_D(Index p);

/// diag(exp(i pi (1 - p) l / p)).
CMatrix build_Up(Index p);

/// Maps a register value in [0, p) to its centered frequency.
Index unwrap_index(Index k, Index p);

SpectralSystem build_system(const GepInstance& inst, const CVector& phi0,
                            const SpectralParams& params);

/// Solution of M y = rhs, normalized, optionally moved to distance
/// `solver_error` from the exact normalized solution along a random
/// direction orthogonal to it.
CVector solve_system(const SpectralSystem& sys, double solver_error, std::uint64_t seed);

/// Unnormalized solution of M y = rhs from n x n solves only, without forming M.
/// Requires every block A - d_k B / tau to be nonsingular.
CVector block_solve(const GepInstance& inst, const CVector& phi0, const SpectralParams& params);

/// Applies F^{-1} U_p F to the k register of a unit vector of length n p.
PhaseDistribution postprocess(const CVector& vecC, const SpectralParams& params, Index n);

/// Local maxima (in frequency order) with mass >= max(0.5 max, 4/pi^2/(2n)).
Extraction extract_blind(const PhaseDistribution& dist, const SpectralParams& params);

/// One estimate per truth eigenvalue: among the three band frequencies nearest
/// lambda_j tau, the one carrying most of eigen-branch j.
Extraction extract_assisted(const PhaseDistribution& dist, const SpectralParams& params,
                            const EigDecomp& truth);

RunReport run_pipeline(const GepInstance& inst, const CVector& phi0, double epsilon,
                       double solver_error = 0.0, const RunOptions& opts = {});

/// || normalized grid samples of the exact solution
///    - (U_p F (x) I) normalized system solution ||.
double truncation_residual(const GepInstance& inst, const CVector& phi0,
                           const SpectralParams& params);

/// Block-diagonal N = I (x) A - tau^{-1} D (x) B, returned as its norm.
double collocation_operator_norm(const GepInstance& inst, const SpectralParams& params);

/// 8 pi kappaE min(||A^-1||, ||B^-1||) / epsilon, with ||B^-1|| alone when A
/// is singular.
double inverse_norm_bound(const CMatrix& A, const CMatrix& B, double kappaE, double epsilon);

/// Samples register values from the marginal. Demonstration output only.
std::vector<Index> sample_shots(const PhaseDistribution& dist, Index shots, std::uint64_t seed);

}  // namespace gepsim
