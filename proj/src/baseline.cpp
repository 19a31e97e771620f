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

#include "gepsim/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gepsim {

SymmetricReduction reduce_symmetric(const GepInstance& inst) {
  validate_shape(inst);
  if (!is_hermitian(inst.A) || !is_hermitian(inst.B)) {
    throw Error(Errc::NotSymmetricPair, "A and B must be Hermitian");
  }
  SymmetricReduction out;
  try {
    out.Bhalf = matfun_herm(inst.B, MatFun::Sqrt);
    out.Bneghalf = matfun_herm(inst.B, MatFun::InvSqrt);
  } catch (const Error&) {
    throw Error(Errc::NotSymmetricPair, "B is not positive definite");
  }
  out.Atilde = hermitian_part(out.Bneghalf * inst.A * out.Bneghalf);
  return out;
}

QpeConfig qpe_config(const CMatrix& H, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be positive");
  double lo = 0.0;
  double hi = 0.0;
  for (Index i = 0; i < H.rows(); ++i) {
    const double r = H.row(i).cwiseAbs().sum() - std::abs(H(i, i));
    const double c = H(i, i).real();
    if (i == 0 || c - r < lo) lo = c - r;
    if (i == 0 || c + r > hi) hi = c + r;
  }
  double width = hi - lo;
  if (width < 1e-12) {
    width = 1.0;
    lo -= 0.5;
    hi = lo + width;
  }
  QpeConfig cfg;
  cfg.shift = lo - 0.05 * width;
  cfg.scale = 1.1 * width;
  cfg.m = std::max(1, static_cast<int>(std::ceil(std::log2(cfg.scale / epsilon))) + 2);
  if (cfg.m > kMaxQpeBits) {
    throw Error(Errc::ParameterCap, "phase register would need " + std::to_string(cfg.m) + " bits");
  }
  return cfg;
}

cd qpe_kernel(double delta, Index M) {
  const double s = std::sin(std::numbers::pi * delta);
  if (std::abs(s) < 1e-13) return 1.0;
  const double md = static_cast<double>(M);
  const double mag = std::sin(std::numbers::pi * md * delta) / (md * s);
  return std::polar(mag, std::numbers::pi * (md - 1.0) * delta);
}

PhaseDistribution qpe_emulate(const CMatrix& H, const CVector& phi, const QpeConfig& cfg) {
  if (phi.size() != H.rows()) throw Error(Errc::DimensionMismatch, "phi size differs from H");
  if (std::abs(phi.norm() - 1.0) > 1e-10) throw Error(Errc::InvalidArgument, "phi must be unit");
  const EigDecomp eig = herm_eig(H);
  const CVector beta = eig.vectors.adjoint() * phi;
  const Index M = cfg.grid();
  const Index n = H.rows();

  PhaseDistribution out;
  out.amps = CMatrix::Zero(M, n);
  for (Index j = 0; j < n; ++j) {
    if (beta(j) == cd(0.0)) continue;
    const double theta = cfg.phase_of(eig.values(j).real());
    const CVector v = beta(j) * eig.vectors.col(j);
    for (Index k = 0; k < M; ++k) {
      const cd g = qpe_kernel(theta - static_cast<double>(k) / static_cast<double>(M), M);
      out.amps.row(k) += g * v.transpose();
    }
  }
  out.probs = out.amps.rowwise().squaredNorm();
  return out;
}

RunReport run_standard(const GepInstance& inst, const CVector& phi0, double epsilon) {
  const SymmetricReduction red = reduce_symmetric(inst);
  const Index n = inst.n();
  if (phi0.size() != n) throw Error(Errc::DimensionMismatch, "phi0 size differs from n");

  CVector phi1 = red.Bhalf * phi0;
  phi1.normalize();
  const QpeConfig cfg = qpe_config(red.Atilde, epsilon);
  PhaseDistribution reg = qpe_emulate(red.Atilde, phi1, cfg);

  // Undo the change of basis on the system register and renormalize.
  PhaseDistribution dist;
  dist.amps = (red.Bneghalf * reg.amps.transpose()).transpose();
  dist.amps /= dist.amps.norm();
  dist.probs = dist.amps.rowwise().squaredNorm();

  EigDecomp truth;
  if (inst.truth) {
    truth = *inst.truth;
  } else {
    const EigDecomp h = herm_eig(red.Atilde);
    truth.values = h.values;
    truth.vectors = normalize_columns(red.Bneghalf * h.vectors);
  }

  Eigen::MatrixXd W;
  bool have_branches = true;
  try {
    W = lu_solve(truth.vectors, CMatrix(dist.amps.transpose())).cwiseAbs2();
  } catch (const Error&) {
    have_branches = false;
  }
  const double max_total = have_branches ? W.rowwise().sum().maxCoeff() : 0.0;

  const Index M = cfg.grid();
  RunReport report;
  report.method = "qpe";
  report.params.epsilon = epsilon;
  report.params.rho = choose_rho(inst);
  report.params.h = 0.0;
  report.params.p = M;
  report.params.tau = static_cast<double>(M) / cfg.scale;
  report.qpe_bits = cfg.m;

  for (Index j = 0; j < truth.values.size(); ++j) {
    const double lambda = truth.values(j).real();
    const double x = cfg.phase_of(lambda) * static_cast<double>(M);
    const Index center = std::clamp<Index>(static_cast<Index>(std::llround(x)), 0, M - 1);
    std::vector<Index> cands;
    for (Index k = center - 2; k <= center + 2; ++k) {
      if (k >= 0 && k < M) cands.push_back(k);
    }
    std::stable_sort(cands.begin(), cands.end(), [&](Index a, Index b) {
      return std::abs(static_cast<double>(a) - x) < std::abs(static_cast<double>(b) - x);
    });
    if (cands.size() > 3) cands.resize(3);
    const bool branch = have_branches && W.row(j).sum() > 1e-12 * max_total;
    const double total = branch ? W.row(j).sum() : dist.probs.sum();
    auto weight = [&](Index k) { return branch ? W(j, k) : dist.probs(k); };
    Index best = cands.front();
    for (Index k : cands) {
      if (weight(k) > weight(best)) best = k;
    }
    const double est = cfg.value_of(static_cast<double>(best) / static_cast<double>(M));
    report.truth.push_back(lambda);
    report.estimates.push_back(est);
    report.truth_errors.push_back(std::abs(truth.values(j) - cd(est)));
    report.peak_masses.push_back(total > 0.0 ? weight(best) / total : 0.0);
    report.supported.push_back(branch || !have_branches);
  }
  report.dist = std::move(dist);
  return report;
}

}  // namespace gepsim
