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

#include "gepsim/blockenc.hpp"

#include <cmath>

namespace gepsim {
namespace {

constexpr double kClampTolerance = 1e-12;

Index pow2(int k) { return Index{1} << k; }

// (I - K K^H)^{1/2} with round-off negatives clamped.
CMatrix defect_sqrt(const CMatrix& K) {
  const Index n = K.rows();
  const CMatrix H = hermitian_part(CMatrix(CMatrix::Identity(n, n) - K * K.adjoint()));
  const EigDecomp e = herm_eig(H);
  RVector s(n);
  for (Index i = 0; i < n; ++i) {
    double v = e.values(i).real();
    if (v < -kClampTolerance) {
      throw Error(Errc::AlphaTooSmall, "alpha below the norm of the encoded matrix");
    }
    s(i) = std::sqrt(std::max(v, 0.0));
  }
  return e.vectors * s.cast<cd>().asDiagonal() * e.vectors.adjoint();
}

// Embeds the active U of `be` into a wider ancilla register by adding
// `extra` identity qubits on the most significant side.
CMatrix widen(const CMatrix& U, int extra) {
  if (extra == 0) return U;
  return kron(CMatrix::Identity(pow2(extra), pow2(extra)), U);
}

void check_active_dim(Index dim) {
  if (dim > kMaxBeActiveDim) {
    throw Error(Errc::TooLarge, "explicit unitary of dimension " + std::to_string(dim) +
                                    " exceeds " + std::to_string(kMaxBeActiveDim));
  }
}

}  // namespace

int ceil_log2(Index x) {
  int k = 0;
  while (pow2(k) < x) ++k;
  return k;
}

double unitarity_defect(const CMatrix& U) {
  CMatrix G = CMatrix::Zero(U.cols(), U.cols());
  G.selfadjointView<Eigen::Lower>().rankUpdate(U.adjoint());
  G.diagonal().array() -= 1.0;
  G = G.triangularView<Eigen::Lower>();
  return max_abs(G);
}

BlockEncoding dilate(const CMatrix& A, double alpha) {
  if (A.rows() != A.cols()) throw Error(Errc::DimensionMismatch, "dilation needs a square matrix");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(Errc::AlphaTooSmall, "alpha must be positive");
  }
  const Index n = A.rows();
  const CMatrix K = A / alpha;
  BlockEncoding be;
  be.U.resize(2 * n, 2 * n);
  be.U.topLeftCorner(n, n) = K;
  be.U.topRightCorner(n, n) = defect_sqrt(K);
  be.U.bottomLeftCorner(n, n) = defect_sqrt(CMatrix(K.adjoint()));
  be.U.bottomRightCorner(n, n) = -K.adjoint();
  be.alpha = alpha;
  be.q = 1;
  be.system_dim = n;
  be.err = op_norm(A - alpha * be.block());
  return be;
}

BlockEncoding rescale_be(const BlockEncoding& be, double beta) {
  if (!(beta > 0.0)) throw Error(Errc::InvalidArgument, "beta must be positive");
  BlockEncoding out = be;
  out.alpha *= beta;
  out.err *= beta;
  return out;
}

BlockEncoding pad_be(const BlockEncoding& be, int extra) {
  if (extra < 0) throw Error(Errc::InvalidArgument, "negative padding");
  BlockEncoding out = be;
  out.q += extra;
  out.idle += extra;
  return out;
}

BlockEncoding product_be(const BlockEncoding& be1, const BlockEncoding& be2) {
  if (be1.system_dim != be2.system_dim) {
    throw Error(Errc::DimensionMismatch, "product of encodings with different system sizes");
  }
  const Index N = be1.system_dim;
  const Index A1 = pow2(be1.active());
  const Index A2 = pow2(be2.active());
  check_active_dim(A1 * A2 * N);

  // U = (U1 on (a1, s)) (U2 on (a2, s)). Block (a1, b1) of the product is
  // (I_{A2} (x) U1[a1, b1]) U2, assembled per a2 row band.
  const Index R2 = A2 * N;
  CMatrix U = CMatrix::Zero(A1 * R2, A1 * R2);
  for (Index a1 = 0; a1 < A1; ++a1) {
    for (Index b1 = 0; b1 < A1; ++b1) {
      const CMatrix blk = be1.U.block(a1 * N, b1 * N, N, N);
      if (max_abs(blk) == 0.0) continue;
      for (Index a2 = 0; a2 < A2; ++a2) {
        U.block(a1 * R2 + a2 * N, b1 * R2, N, R2).noalias() = blk * be2.U.middleRows(a2 * N, N);
      }
    }
  }
  BlockEncoding out;
  out.U = std::move(U);
  out.alpha = be1.alpha * be2.alpha;
  out.q = be1.q + be2.q;
  out.idle = be1.idle + be2.idle;
  out.err = be1.alpha * be2.err + be2.alpha * be1.err;
  out.system_dim = N;
  return out;
}

BlockEncoding tensor_be(const BlockEncoding& be1, const BlockEncoding& be2) {
  const Index N1 = be1.system_dim;
  const Index N2 = be2.system_dim;
  const Index A1 = pow2(be1.active());
  const Index A2 = pow2(be2.active());
  const Index dim = A1 * A2 * N1 * N2;
  check_active_dim(dim);

  // kron(U1, U2) is ordered (a1, s1, a2, s2); reorder to (a1, a2, s1, s2).
  const CMatrix K = kron(be1.U, be2.U);
  std::vector<Index> perm(static_cast<std::size_t>(dim));
  for (Index a1 = 0; a1 < A1; ++a1) {
    for (Index a2 = 0; a2 < A2; ++a2) {
      for (Index s1 = 0; s1 < N1; ++s1) {
        for (Index s2 = 0; s2 < N2; ++s2) {
          const Index to = ((a1 * A2 + a2) * N1 + s1) * N2 + s2;
          const Index from = ((a1 * N1 + s1) * A2 + a2) * N2 + s2;
          perm[static_cast<std::size_t>(to)] = from;
        }
      }
    }
  }
  BlockEncoding out;
  out.U.resize(dim, dim);
  for (Index c = 0; c < dim; ++c) {
    const Index fc = perm[static_cast<std::size_t>(c)];
    for (Index r = 0; r < dim; ++r) out.U(r, c) = K(perm[static_cast<std::size_t>(r)], fc);
  }
  out.alpha = be1.alpha * be2.alpha;
  out.q = be1.q + be2.q;
  out.idle = be1.idle + be2.idle;
  out.err = be1.alpha * be2.err + be2.alpha * be1.err + be1.err * be2.err;
  out.system_dim = N1 * N2;
  return out;
}

BlockEncoding unitary_be(const CMatrix& V) {
  if (V.rows() != V.cols()) throw Error(Errc::NotUnitary, "matrix is not square");
  if (unitarity_defect(V) > 1e-10) throw Error(Errc::NotUnitary, "V^H V differs from I");
  BlockEncoding out;
  out.U = V;
  out.system_dim = V.rows();
  return out;
}

BlockEncoding projected_row_be(Index p) {
  if (p < 1) throw Error(Errc::InvalidArgument, "p must be positive");
  const int L = ceil_log2(p);
  const Index A = pow2(L);
  const CMatrix Ft = dft_matrix(p).transpose();
  const CMatrix base = kron(CMatrix::Identity(A, A), Ft);
  // Swap (a, s) <-> (s, a) whenever both fit in [0, p).
  const Index dim = A * p;
  CMatrix U(dim, dim);
  for (Index a = 0; a < A; ++a) {
    for (Index s = 0; s < p; ++s) {
      const Index to = (a < p) ? s * p + a : a * p + s;
      U.row(to) = base.row(a * p + s);
    }
  }
  BlockEncoding out;
  out.U = std::move(U);
  out.q = L;
  out.system_dim = p;
  return out;
}

BlockEncoding lcu_combine(const std::vector<std::pair<double, BlockEncoding>>& terms) {
  if (terms.empty()) throw Error(Errc::EmptyTerms, "no terms to combine");
  const Index N = terms.front().second.system_dim;
  int qa = 0;
  int qmax = 0;
  double alpha = 0.0;
  double err = 0.0;
  for (const auto& [c, be] : terms) {
    if (be.system_dim != N) throw Error(Errc::DimensionMismatch, "terms differ in system size");
    qa = std::max(qa, be.active());
    qmax = std::max(qmax, be.q);
    alpha += std::abs(c) * be.alpha;
    err += std::abs(c) * be.err;
  }
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "all coefficients vanish");

  const Index T = static_cast<Index>(terms.size());
  const int m = std::max(1, ceil_log2(T));
  const Index S = pow2(m);
  const Index R = pow2(qa) * N;
  check_active_dim(S * R);

  // Householder reflection sending e0 to psi, psi_i = sqrt(|c_i| alpha_i / alpha).
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(S);
  for (Index i = 0; i < T; ++i) {
    const auto& [c, be] = terms[static_cast<std::size_t>(i)];
    psi(i) = std::sqrt(std::abs(c) * be.alpha / alpha);
  }
  Eigen::VectorXd v = -psi;
  v(0) += 1.0;
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(S, S);
  if (v.norm() > 1e-15) P -= 2.0 * v * v.transpose() / v.squaredNorm();

  std::vector<CMatrix> select(static_cast<std::size_t>(S));
  for (Index k = 0; k < S; ++k) {
    if (k < T) {
      const auto& [c, be] = terms[static_cast<std::size_t>(k)];
      select[static_cast<std::size_t>(k)] = (c < 0.0 ? -1.0 : 1.0) * widen(be.U, qa - be.active());
    } else {
      select[static_cast<std::size_t>(k)] = CMatrix::Identity(R, R);
    }
  }
  // U = (P (x) I) Sel (P (x) I), block (i, j) = sum_k P_ik P_kj S_k.
  BlockEncoding out;
  out.U = CMatrix::Zero(S * R, S * R);
  for (Index i = 0; i < S; ++i) {
    for (Index j = 0; j < S; ++j) {
      auto blk = out.U.block(i * R, j * R, R, R);
      for (Index k = 0; k < S; ++k) {
        const double w = P(i, k) * P(k, j);
        if (w != 0.0) blk += w * select[static_cast<std::size_t>(k)];
      }
    }
  }
  out.alpha = alpha;
  out.q = m + qmax;
  out.idle = out.q - (m + qa);
  out.err = err;
  out.system_dim = N;
  return out;
}

BlockEncoding build_M_be(const GepInstance& inst, const SpectralParams& params) {
  validate_shape(inst);
  const Index n = inst.n();
  const Index p = params.p;
  if (n * p > kMaxBeSystem) {
    throw Error(Errc::TooLarge, "n p = " + std::to_string(n * p) + " exceeds " +
                                    std::to_string(kMaxBeSystem));
  }
  if (p < 3 || p % 2 == 0) throw Error(Errc::InvalidArgument, "p must be odd and at least 3");
  const int L = ceil_log2(p);
  check_active_dim(pow2(L + 5) * n * p);

  const double normA = op_norm(inst.A);
  const double normB = op_norm(inst.B);
  const double alphaA = normA > 0.0 ? 2.0 * normA : 1.0;
  const double alphaB = normB > 0.0 ? 2.0 * normB : 1.0;
  const double dscale = static_cast<double>(p - 1) / (2.0 * params.tau);

  const BlockEncoding UA = dilate(inst.A, alphaA);
  const BlockEncoding UB = dilate(inst.B, alphaB);
  const BlockEncoding UD = pad_be(dilate(build_D(p) / params.tau, dscale), L - 1);

  const CMatrix In = CMatrix::Identity(n, n);
  const BlockEncoding FtI = unitary_be(kron(dft_matrix(p).transpose(), In));
  const BlockEncoding Ip = unitary_be(CMatrix::Identity(p, p));
  const BlockEncoding IA = tensor_be(Ip, UA);
  const BlockEncoding DB = tensor_be(UD, UB);
  const BlockEncoding row = tensor_be(projected_row_be(p), unitary_be(In));

  // Each V_i is normalized to alpha = 1 so the LCU weights carry the scales.
  const BlockEncoding V1 = rescale_be(pad_be(product_be(FtI, IA), L), 1.0 / alphaA);
  const BlockEncoding V2 = rescale_be(product_be(FtI, DB), 1.0 / (alphaB * dscale));
  const BlockEncoding V3 = row;
  const BlockEncoding V4 = rescale_be(pad_be(product_be(row, IA), L), 1.0 / alphaA);
  const BlockEncoding V5 = rescale_be(product_be(row, DB), 1.0 / (alphaB * dscale));

  std::vector<std::pair<double, BlockEncoding>> terms;
  terms.emplace_back(alphaA, V1);
  terms.emplace_back(-alphaB * dscale, V2);
  terms.emplace_back(1.0, V3);
  terms.emplace_back(-alphaA, V4);
  terms.emplace_back(alphaB * dscale, V5);
  return lcu_combine(terms);
}

BeDefects verify_be(const BlockEncoding& be, const CMatrix& target) {
  if (target.rows() != be.system_dim || target.cols() != be.system_dim) {
    throw Error(Errc::DimensionMismatch, "target size differs from the encoded system");
  }
  BeDefects out;
  out.extraction = op_norm(target - be.alpha * be.block());
  out.unitarity = unitarity_defect(be.U);
  return out;
}

CMatrix full_unitary(const BlockEncoding& be) {
  const Index dim = pow2(be.idle) * be.U.rows();
  if (dim > 4 * kMaxBeActiveDim) throw Error(Errc::TooLarge, "full unitary too large");
  return widen(be.U, be.idle);
}

}  // namespace gepsim
