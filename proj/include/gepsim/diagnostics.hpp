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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gepsim/instances.hpp"
#include "gepsim/spectral.hpp"

namespace gepsim {

inline constexpr Index kMaxCondMSystem = 4096;

struct BoundCheck {
  std::string name;
  double measured = 0.0;
  double bound = 1.0;
  double ratio = 0.0;
  bool pass = false;
  /// Lower side of two-sided checks; zero otherwise.
  double lower = 0.0;
};

/// first:  sqrt((p-1)/p) ||N|| <= ||M|| <= sqrt(1 + ||N||^2)   (hard)
/// second: ||M^-1|| <= 8 pi kappaE min(||A^-1||, ||B^-1||) / eps  (soft)
std::pair<BoundCheck, BoundCheck> check_condM(const GepInstance& inst, const CVector& phi0,
                                              const SpectralParams& params);

struct CrawfordResult {
  double gamma = 0.0;
  std::optional<double> theta_star;  // in [0, 2 pi), absent for non-definite pairs
};

/// max over theta of lambda_min(A sin theta + B cos theta) when positive,
/// else min over unit x of sqrt((x^H A x)^2 + (x^H B x)^2) by sampling.
CrawfordResult crawford_number(const CMatrix& A, const CMatrix& B);

/// lambda_min(A sin theta + B cos theta).
double rotated_min_eig(const CMatrix& A, const CMatrix& B, double theta);

/// Reports whether gamma >= sqrt(||A^-1||^-2 + ||B^-1||^-2). Diagnostic only.
BoundCheck crawford_norm_diagnostic(const CMatrix& A, const CMatrix& B, double gamma);

double chord(cd a, cd b);

/// kappa of the B-orthonormal eigenbasis against sqrt(kappa(B)).
BoundCheck check_kappaE(const GepInstance& inst);

/// Eigenvectors of a symmetric pair rescaled so E^H B E = I (Gram-Schmidt in
/// the B inner product inside clusters of equal eigenvalues).
CMatrix b_orthonormal_basis(const GepInstance& inst);

struct PerturbationReport {
  double delta = 0.0;
  double kappaB = 1.0;
  std::vector<double> shifts;  // perturbed minus original, sorted order
  double max_shift = 0.0;
  double ratio = 0.0;  // max_i |shift_i| / ((1 + |lambda_i|) delta kappaB)
};

PerturbationReport perturbation_probe(const GepInstance& inst, double delta, std::uint64_t seed);

/// Same with caller-supplied Hermitian perturbations; delta = max of their norms.
PerturbationReport perturbation_probe(const GepInstance& inst, const CMatrix& dA,
                                      const CMatrix& dB);

struct ComplexityReport {
  double kappaB = 1.0;
  double kappaE = 1.0;
  double normA = 0.0;
  double normB = 0.0;
  double alphaA = 1.0;
  double alphaB = 1.0;
  double rho = 1.0;
  double epsilon = 0.0;
  double ode = 0.0;          // kappaE (alphaA + rho alphaB) kappaB / eps
  double qpe_product = 0.0;  // alphaA alphaB kappaB^2.5 / eps
  double qpe_alt = 0.0;      // (alphaA + ||A|| kappaB alphaB) kappaB^2 / eps
};

ComplexityReport complexity_report(const GepInstance& inst, double epsilon);
std::string format_complexity_table(const ComplexityReport& r);

}  // namespace gepsim
