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

// Explicit block-encodings.
//
// Basis ordering is ancilla-major: index = a * N + s for ancilla value a and
// system index s. Ancilla qubits that no construction ever touches are kept
// symbolic: `idle` of the `q` declared ancillas act as identity, so the full
// unitary is I_{2^idle} (x) U and only U is stored.

#pragma once

#include <utility>
#include <vector>

#include "gepsim/instances.hpp"
#include "gepsim/matcore.hpp"
#include "gepsim/spectral.hpp"

namespace gepsim {

inline constexpr Index kMaxBeSystem = 512;
inline constexpr Index kMaxBeActiveDim = 4096;

struct BlockEncoding {
  CMatrix U;
  double alpha = 1.0;
  int q = 0;
  int idle = 0;
  double err = 0.0;
  Index system_dim = 0;

  int active() const { return q - idle; }
  /// (<0| (x) I) U (|0> (x) I), the encoded matrix divided by alpha.
  CMatrix block() const { return U.topLeftCorner(system_dim, system_dim); }
};

struct BeDefects {
  double extraction = 0.0;  // ||target - alpha * block||
  double unitarity = 0.0;   // max |U^H U - I|
};

int ceil_log2(Index x);

/// q = 1 unitary completion [[A/a, S1], [S2, -A^H/a]].
BlockEncoding dilate(const CMatrix& A, double alpha);

BlockEncoding rescale_be(const BlockEncoding& be, double beta);

/// Encodes A1 A2 with ancillas ordered (a1, a2).
BlockEncoding product_be(const BlockEncoding& be1, const BlockEncoding& be2);

/// Encodes A1 (x) A2 with ancillas (a1, a2) and system (s1, s2).
BlockEncoding tensor_be(const BlockEncoding& be1, const BlockEncoding& be2);

BlockEncoding unitary_be(const CMatrix& V);

/// (1, ceil(log2 p), 0) encoding of the p x p matrix whose first row is
/// <0| F^T and whose other rows vanish.
BlockEncoding projected_row_be(Index p);

/// Adds `extra` idle ancillas.
BlockEncoding pad_be(const BlockEncoding& be, int extra);

/// Prepare / select / unprepare over sum_i c_i A_i. The select register has
/// max(1, ceil(log2 T)) qubits and is the most significant.
BlockEncoding lcu_combine(const std::vector<std::pair<double, BlockEncoding>>& terms);

/// Five-term LCU encoding of the collocation matrix M.
BlockEncoding build_M_be(const GepInstance& inst, const SpectralParams& params);

BeDefects verify_be(const BlockEncoding& be, const CMatrix& target);

double unitarity_defect(const CMatrix& U);

/// I_{2^idle} (x) U; throws TooLarge beyond kMaxBeActiveDim * 4.
CMatrix full_unitary(const BlockEncoding& be);

}  // namespace gepsim
