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

// Standard phase-estimation route for symmetric pairs: reduce to the
// Hermitian matrix B^{-1/2} A B^{-1/2}, read its spectrum from an ideal QPE
// register, and map back.

#pragma once

#include "gepsim/instances.hpp"
#include "gepsim/spectral.hpp"

namespace gepsim {

inline constexpr int kMaxQpeBits = 22;

/// theta = (lambda - shift) / scale lies in [0, 1) for every eigenvalue.
struct QpeConfig {
  int m = 1;
  double shift = 0.0;
  double scale = 1.0;

  Index grid() const { return Index{1} << m; }
  double phase_of(double lambda) const { return (lambda - shift) / scale; }
  double value_of(double phase) const { return shift + scale * phase; }
};

struct SymmetricReduction {
  CMatrix Atilde;
  CMatrix Bhalf;
  CMatrix Bneghalf;
};

/// Throws NotSymmetricPair unless A, B are Hermitian and B positive definite.
SymmetricReduction reduce_symmetric(const GepInstance& inst);

/// Gershgorin range of H padded by 10%, m = ceil(log2(range / epsilon)) + 2.
QpeConfig qpe_config(const CMatrix& H, double epsilon);

/// (1/M) sum_{l<M} exp(2 pi i l delta).
cd qpe_kernel(double delta, Index M);

/// Exact QPE output for the Hermitian H on input phi. Rows of `amps` are
/// register values, columns system components.
PhaseDistribution qpe_emulate(const CMatrix& H, const CVector& phi, const QpeConfig& cfg);

RunReport run_standard(const GepInstance& inst, const CVector& phi0, double epsilon);

}  // namespace gepsim
