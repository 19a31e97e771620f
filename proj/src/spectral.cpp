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

#include "gepsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gepsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(2 pi i r / p) / sqrt(p) for r in [0, p).
std::vector<cd> root_table(Index p) {
  std::vector<cd> w(static_cast<std::size_t>(p));
  const double scale = 1.0 / std::sqrt(static_cast<double>(p));
  for (Index r = 0; r < p; ++r) {
    w[static_cast<std::size_t>(r)] =
        std::polar(scale, kTwoPi * static_cast<double>(r) / static_cast<double>(p));
  }
  return w;
}

double frequency(Index k, Index p) { return static_cast<double>(k - (p - 1) / 2); }

Index register_of(Index d, Index p) { return d >= 0 ? d : d + p; }

struct ExactSolution {
  CVector y;
  double residual = 0.0;
};

ExactSolution exact_solve(const SpectralSystem& sys) {
  ExactSolution out;
  out.y = lu_solve(sys.M, sys.rhs);
  const double rn = sys.rhs.norm();
  out.residual = (sys.M * out.y - sys.rhs).norm() / (rn > 0.0 ? rn : 1.0);
  return out;
}

// Fourier samples (U_p F (x) I) applied to a stacked coefficient vector.
CVector grid_samples(const CVector& vecC, Index p, Index n) {
  const std::vector<cd> w = root_table(p);
  const Index s = (p - 1) / 2;
  CVector out = CVector::Zero(p * n);
  for (Index l = 0; l < p; ++l) {
    for (Index k = 0; k < p; ++k) {
      // exp(2 pi i l d_k / p) with d_k = k - s, reduced mod p.
      Index r = (l * (k - s)) % p;
      if (r < 0) r += p;
      out.segment(l * n, n) += w[static_cast<std::size_t>(r)] * vecC.segment(k * n, n);
    }
  }
  return out;
}

}  // namespace

double RunReport::max_error() const {
  double worst = 0.0;
  for (std::size_t j = 0; j < truth_errors.size(); ++j) {
    if (j < supported.size() && !supported[j]) continue;
    worst = std::max(worst, truth_errors[j]);
  }
  return worst;
}

SpectralParams params_with_nodes(double epsilon, double rho, Index p) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(Errc::InvalidArgument, "epsilon must lie in (0, 1)");
  }
  if (!(rho >= 1.0) || !std::isfinite(rho)) throw Error(Errc::InvalidArgument, "rho must be >= 1");
  if (p < 1) throw Error(Errc::InvalidArgument, "p must be positive");
  if (p % 2 == 0) throw Error(Errc::EvenP, "p must be odd, got " + std::to_string(p));
  if (p > kMaxNodes) {
    throw Error(Errc::ParameterCap, "p = " + std::to_string(p) + " exceeds the cap of " +
                                        std::to_string(kMaxNodes));
  }
  SpectralParams out;
  out.epsilon = epsilon;
  out.rho = rho;
  out.h = 1.0 / (2.0 * rho);
  out.p = p;
  out.tau = static_cast<double>(p) * out.h;
  return out;
}

SpectralParams choose_params(double epsilon, double rho) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(Errc::InvalidArgument, "epsilon must lie in (0, 1)");
  }
  if (!(rho >= 1.0) || !std::isfinite(rho)) throw Error(Errc::InvalidArgument, "rho must be >= 1");
  const double x = 2.0 * rho / epsilon;
  const double up = std::ceil(x - 1e-9 * x);
  if (up > static_cast<double>(kMaxNodes)) {
    throw Error(Errc::ParameterCap, "2 rho / epsilon = " + std::to_string(x) +
                                        " needs more than " + std::to_string(kMaxNodes) +
                                        " nodes");
  }
  Index p = static_cast<Index>(up);
  if (p % 2 == 0) ++p;
  return params_with_nodes(epsilon, rho, p);
}

void require_nonsingular_B(const CMatrix& B) {
  const SvdExtremes s = svd_extremes(B);
  if (!(s.sigma_max > 0.0) || s.sigma_min <= 1e-10 * s.sigma_max) {
    throw Error(Errc::SingularB, "sigma_min(B) = " + std::to_string(s.sigma_min));
  }
}

double choose_rho(const GepInstance& inst) {
  double rho = 1.0;
  if (inst.truth) {
    for (Index j = 0; j < inst.truth->values.size(); ++j) {
      rho = std::max(rho, std::abs(inst.truth->values(j)));
    }
    return rho;
  }
  const SvdExtremes sb = svd_extremes(inst.B);
  if (!(sb.sigma_min > 0.0)) throw Error(Errc::SingularB, "B is singular");
  return std::max(rho, op_norm(inst.A) / sb.sigma_min);
}

CMatrix build_D(Index p) {
  if (p < 1) throw Error(Errc::InvalidArgument, "p must be positive");
  if (p % 2 == 0) throw Error(Errc::EvenP, "p must be odd, got " + std::to_string(p));
  CMatrix D = CMatrix::Zero(p, p);
  for (Index k = 0; k < p; ++k) D(k, k) = frequency(k, p);
  return D;
}

CMatrix build_Up(Index p) {
  if (p < 1) throw Error(Errc::InvalidArgument, "p must be positive");
  CMatrix U = CMatrix::Zero(p, p);
  const double pd = static_cast<double>(p);
  for (Index l = 0; l < p; ++l) {
    U(l, l) = std::polar(1.0, std::numbers::pi * (1.0 - pd) * static_cast<double>(l) / pd);
  }
  return U;
}

Index unwrap_index(Index k, Index p) { return k > (p - 1) / 2 ? k - p : k; }

SpectralSystem build_system(const GepInstance& inst, const CVector& phi0,
                            const SpectralParams& params) {
  validate_shape(inst);
  const Index n = inst.n();
  const Index p = params.p;
  if (phi0.size() != n) {
    throw Error(Errc::DimensionMismatch, "phi0 has length " + std::to_string(phi0.size()) +
                                             ", expected " + std::to_string(n));
  }
  if (std::abs(phi0.norm() - 1.0) > 1e-10) {
    throw Error(Errc::InvalidArgument, "phi0 must be a unit vector");
  }
  if (p % 2 == 0) throw Error(Errc::EvenP, "p must be odd");

  const std::vector<cd> w = root_table(p);
  SpectralSystem sys;
  sys.params = params;
  sys.n = n;
  sys.M = CMatrix::Zero(n * p, n * p);
  sys.rhs = CVector::Zero(n * p);
  sys.rhs.head(n) = phi0;

  // Row block 0: <0| F^T (x) I, i.e. x(0) = sum_k c_k / sqrt(p).
  for (Index k = 0; k < p; ++k) {
    for (Index j = 0; j < n; ++j) sys.M(j, k * n + j) = w[0];
  }
  // Row block l >= 1: sum_k F[k][l] (A - d_k B / tau).
  for (Index k = 0; k < p; ++k) {
    const CMatrix Nk = inst.A - (frequency(k, p) / params.tau) * inst.B;
    for (Index l = 1; l < p; ++l) {
      sys.M.block(l * n, k * n, n, n) = w[static_cast<std::size_t>((k * l) % p)] * Nk;
    }
  }
  return sys;
}

namespace {

CVector perturb(const CVector& y, double solver_error, std::uint64_t seed) {
  if (!(solver_error >= 0.0) || solver_error > 2.0) {
    throw Error(Errc::InvalidArgument, "solver_error must lie in [0, 2]");
  }
  const double norm = y.norm();
  if (!(norm > 0.0)) throw Error(Errc::SingularMatrix, "zero solution");
  CVector u = y / norm;
  if (solver_error == 0.0) return u;

  Rng rng(seed);
  CVector w;
  for (int attempt = 0; attempt < 16; ++attempt) {
    w = random_unit_vector(u.size(), rng);
    w -= u * u.dot(w);
    if (w.norm() > 1e-6) break;
  }
  if (w.norm() <= 1e-6) return u;  // one-dimensional state space
  w.normalize();
  const double phi = 2.0 * std::asin(solver_error / 2.0);
  return std::cos(phi) * u + std::sin(phi) * w;
}

}  // namespace

CVector solve_system(const SpectralSystem& sys, double solver_error, std::uint64_t seed) {
  if (!(solver_error >= 0.0) || solver_error > 2.0) {
    throw Error(Errc::InvalidArgument, "solver_error must lie in [0, 2]");
  }
  return perturb(exact_solve(sys).y, solver_error, seed);
}

PhaseDistribution postprocess(const CVector& vecC, const SpectralParams& params, Index n) {
  const Index p = params.p;
  if (n < 1 || vecC.size() != n * p) {
    throw Error(Errc::DimensionMismatch, "state has length " + std::to_string(vecC.size()) +
                                             ", expected n p = " + std::to_string(n * p));
  }
  if (std::abs(vecC.norm() - 1.0) > 1e-8) {
    throw Error(Errc::InvalidArgument, "state must be unit norm");
  }
  // F^{-1} U_p F is the cyclic shift a -> a + (p-1)/2 on the register.
  const Index s = (p - 1) / 2;
  PhaseDistribution out;
  out.amps.resize(p, n);
  out.probs.resize(p);
  for (Index a = 0; a < p; ++a) {
    const Index src = (a + s) % p;
    out.amps.row(a) = vecC.segment(src * n, n).transpose();
    out.probs(a) = out.amps.row(a).squaredNorm();
  }
  return out;
}

Extraction extract_blind(const PhaseDistribution& dist, const SpectralParams& params) {
  const Index p = params.p;
  const Index s = params.half_band();
  const Index n = std::max<Index>(dist.amps.cols(), 1);
  if (dist.probs.size() != p) throw Error(Errc::DimensionMismatch, "distribution size != p");

  const double max_prob = dist.probs.maxCoeff();
  const double floor = std::max(0.5 * max_prob, 4.0 / (std::numbers::pi * std::numbers::pi) /
                                                    (2.0 * static_cast<double>(n)));
  auto prob_at = [&](Index d) { return dist.probs(register_of(d, p)); };

  Extraction out;
  for (Index d = -s; d <= s; ++d) {
    const double v = prob_at(d);
    if (v < floor) continue;
    const bool left_ok = d == -s || v > prob_at(d - 1);
    const bool right_ok = d == s || v >= prob_at(d + 1);
    if (!left_ok || !right_ok) continue;
    out.estimates.push_back(static_cast<double>(d) / params.tau);
    out.frequencies.push_back(d);
    out.peak_masses.push_back(v);
  }
  return out;
}

Extraction extract_assisted(const PhaseDistribution& dist, const SpectralParams& params,
                            const EigDecomp& truth) {
  const Index p = params.p;
  const Index s = params.half_band();
  const Index n = dist.amps.cols();
  if (dist.probs.size() != p || dist.amps.rows() != p) {
    throw Error(Errc::DimensionMismatch, "distribution size != p");
  }
  if (truth.vectors.rows() != n) throw Error(Errc::DimensionMismatch, "truth dimension != n");

  // Branch weights: coefficients of each register row in the eigenbasis.
  Eigen::MatrixXd W;
  bool have_branches = true;
  try {
    const CMatrix coeffs = lu_solve(truth.vectors, CMatrix(dist.amps.transpose()));
    W = coeffs.cwiseAbs2();
  } catch (const Error&) {
    have_branches = false;
  }
  double max_total = 0.0;
  Eigen::VectorXd register_total;
  if (have_branches) {
    max_total = W.rowwise().sum().maxCoeff();
    register_total = W.colwise().sum().transpose();
  }

  Extraction out;
  for (Index j = 0; j < truth.values.size(); ++j) {
    const double x = truth.values(j).real() * params.tau;
    const Index center = std::clamp<Index>(static_cast<Index>(std::llround(x)), -s, s);
    std::vector<Index> cands;
    for (Index d = center - 2; d <= center + 2; ++d) {
      if (d >= -s && d <= s) cands.push_back(d);
    }
    std::stable_sort(cands.begin(), cands.end(), [&](Index a, Index b) {
      return std::abs(static_cast<double>(a) - x) < std::abs(static_cast<double>(b) - x);
    });
    if (cands.size() > 3) cands.resize(3);

    const bool branch = have_branches && j < W.rows() && W.row(j).sum() > 1e-12 * max_total;
    const double total = branch ? W.row(j).sum() : dist.probs.sum();
    auto weight = [&](Index d) {
      const Index a = register_of(d, p);
      return branch ? W(j, a) : dist.probs(a);
    };
    // Selection score: measured probability times the share of that register owned by
    // branch j. Branch weights alone amplify solver noise through E^{-1}.
    auto score = [&](Index d) {
      const Index a = register_of(d, p);
      if (!branch) return dist.probs(a);
      const double t = register_total(a);
      return t > 0.0 ? dist.probs(a) * W(j, a) / t : 0.0;
    };
    Index best = cands.front();
    for (Index d : cands) {
      if (score(d) > score(best)) best = d;
    }
    out.estimates.push_back(static_cast<double>(best) / params.tau);
    out.frequencies.push_back(best);
    out.peak_masses.push_back(total > 0.0 ? weight(best) / total : 0.0);
    out.supported.push_back(branch || !have_branches);
  }
  return out;
}

double collocation_operator_norm(const GepInstance& inst, const SpectralParams& params) {
  double worst = 0.0;
  for (Index k = 0; k < params.p; ++k) {
    const CMatrix Nk = inst.A - (frequency(k, params.p) / params.tau) * inst.B;
    worst = std::max(worst, op_norm(Nk));
  }
  return worst;
}

double inverse_norm_bound(const CMatrix& A, const CMatrix& B, double kappaE, double epsilon) {
  const SvdExtremes sa = svd_extremes(A);
  const SvdExtremes sb = svd_extremes(B);
  if (!(sb.sigma_min > 0.0)) throw Error(Errc::SingularB, "B is singular");
  const double inv_b = 1.0 / sb.sigma_min;
  const bool singular_a = !(sa.sigma_max > 0.0) || sa.sigma_min <= 1e-10 * sa.sigma_max;
  const double m = singular_a ? inv_b : std::min(1.0 / sa.sigma_min, inv_b);
  return 8.0 * std::numbers::pi * kappaE * m / epsilon;
}

namespace {

// Above this n p the pipeline solves through the block structure instead of a dense LU.
constexpr Index kDenseSolveLimit = 1024;
constexpr Index kDiagnosticsLimit = 4096;

// Rows l >= 1 of M say F^T z = c e_0 for z_k = N_k y_k, so every z_k equals
// v / sqrt(p); row 0 then gives v = p (sum_k N_k^{-1})^{-1} phi0.
ExactSolution structured_solve(const GepInstance& inst, const CVector& phi0,
                               const SpectralParams& params) {
  const Index n = inst.n();
  const Index p = params.p;
  if (phi0.size() != n) throw Error(Errc::DimensionMismatch, "phi0 length != n");
  if (std::abs(phi0.norm() - 1.0) > 1e-10) {
    throw Error(Errc::InvalidArgument, "phi0 must be a unit vector");
  }
  if (p % 2 == 0) throw Error(Errc::EvenP, "p must be odd");

  std::vector<Eigen::PartialPivLU<CMatrix>> lus;
  lus.reserve(static_cast<std::size_t>(p));
  CMatrix S = CMatrix::Zero(n, n);
  const CMatrix eye = CMatrix::Identity(n, n);
  for (Index k = 0; k < p; ++k) {
    const CMatrix Nk = inst.A - (frequency(k, p) / params.tau) * inst.B;
    lus.emplace_back(Nk);
    const double rc = lus.back().rcond();
    if (!(rc > 1e-14)) {
      throw Error(Errc::SingularMatrix, "collocation block " + std::to_string(k) + " is singular");
    }
    S += lus.back().solve(eye);
  }
  const double sq = std::sqrt(static_cast<double>(p));
  const CVector v = static_cast<double>(p) * lu_solve(S, phi0);

  ExactSolution out;
  out.y.resize(n * p);
  CVector zsum = CVector::Zero(n);
  std::vector<CVector> z(static_cast<std::size_t>(p));
  for (Index k = 0; k < p; ++k) {
    out.y.segment(k * n, n) = lus[static_cast<std::size_t>(k)].solve(CVector(v / sq));
    const CMatrix Nk = inst.A - (frequency(k, p) / params.tau) * inst.B;
    z[static_cast<std::size_t>(k)] = Nk * out.y.segment(k * n, n);
    zsum += z[static_cast<std::size_t>(k)];
  }
  // ||M y - rhs||^2: row 0 directly, rows l >= 1 by Parseval on the z_k.
  CVector first = CVector::Zero(n);
  for (Index k = 0; k < p; ++k) first += out.y.segment(k * n, n);
  double r2 = (first / sq - phi0).squaredNorm();
  const CVector zbar = zsum / static_cast<double>(p);
  for (const CVector& zk : z) r2 += (zk - zbar).squaredNorm();
  out.residual = std::sqrt(r2);
  return out;
}

ExactSolution solve_exact(const GepInstance& inst, const CVector& phi0,
                          const SpectralParams& params) {
  if (inst.n() * params.p > kDenseSolveLimit) return structured_solve(inst, phi0, params);
  return exact_solve(build_system(inst, phi0, params));
}

}  // namespace

CVector block_solve(const GepInstance& inst, const CVector& phi0, const SpectralParams& params) {
  validate_shape(inst);
  return structured_solve(inst, phi0, params).y;
}

double truncation_residual(const GepInstance& inst, const CVector& phi0,
                           const SpectralParams& params) {
  if (!inst.truth) throw Error(Errc::InvalidArgument, "truncation residual needs truth");
  const Index n = inst.n();
  const Index p = params.p;
  const EigDecomp& truth = *inst.truth;
  const CVector beta = lu_solve(truth.vectors, phi0);

  CVector exact(n * p);
  for (Index l = 0; l < p; ++l) {
    const double t = static_cast<double>(l) * params.h;
    CVector x = CVector::Zero(n);
    for (Index j = 0; j < truth.values.size(); ++j) {
      x += beta(j) * std::exp(cd(0.0, kTwoPi * t) * truth.values(j)) * truth.vectors.col(j);
    }
    exact.segment(l * n, n) = x;
  }
  exact.normalize();

  CVector y = solve_exact(inst, phi0, params).y;
  y.normalize();
  return (exact - grid_samples(y, p, n)).norm();
}

RunReport run_pipeline(const GepInstance& inst, const CVector& phi0, double epsilon,
                       double solver_error, const RunOptions& opts) {
  validate_shape(inst);
  require_nonsingular_B(inst.B);
  const SpectralParams params = choose_params(epsilon, choose_rho(inst));
  RunReport report;
  report.method = "ode";
  report.params = params;
  const ExactSolution exact = solve_exact(inst, phi0, params);
  report.solve_residual = exact.residual;
  const CVector y = perturb(exact.y, solver_error, opts.seed);
  report.dist = postprocess(y, params, inst.n());

  if (inst.truth) {
    const Extraction ex = extract_assisted(report.dist, params, *inst.truth);
    report.estimates = ex.estimates;
    report.peak_masses = ex.peak_masses;
    report.supported = ex.supported;
    for (Index j = 0; j < inst.truth->values.size(); ++j) {
      const cd lambda = inst.truth->values(j);
      report.truth.push_back(lambda.real());
      report.truth_errors.push_back(std::abs(lambda - cd(ex.estimates[static_cast<std::size_t>(j)])));
    }
  } else {
    const Extraction ex = extract_blind(report.dist, params);
    report.estimates = ex.estimates;
    report.peak_masses = ex.peak_masses;
  }

  // Dense diagnostics are skipped above the exact-SVD size; their columns stay empty.
  if (opts.diagnostics && inst.n() * params.p <= kDiagnosticsLimit) {
    const SvdExtremes sm = svd_extremes(build_system(inst, phi0, params).M);
    report.kappaM = sm.sigma_min > 0.0 ? sm.sigma_max / sm.sigma_min
                                       : std::numeric_limits<double>::infinity();
    double kappaE = 0.0;
    if (inst.truth) {
      kappaE = inst.truth->kappaE;
    } else {
      try {
        kappaE = gen_eig(inst.A, inst.B).kappaE;
      } catch (const Error&) {
        kappaE = 0.0;
      }
    }
    if (kappaE > 0.0 && sm.sigma_min > 0.0) {
      report.bound_ratio = (1.0 / sm.sigma_min) / inverse_norm_bound(inst.A, inst.B, kappaE, epsilon);
    }
    if (inst.truth) report.truncation = truncation_residual(inst, phi0, params);
  }
  return report;
}

std::vector<Index> sample_shots(const PhaseDistribution& dist, Index shots, std::uint64_t seed) {
  if (shots < 0) throw Error(Errc::InvalidArgument, "shot count must be non-negative");
  std::vector<Index> counts(static_cast<std::size_t>(dist.probs.size()), 0);
  if (shots == 0 || dist.probs.size() == 0) return counts;
  std::discrete_distribution<Index> pick(dist.probs.data(), dist.probs.data() + dist.probs.size());
  Rng rng(seed);
  for (Index s = 0; s < shots; ++s) ++counts[static_cast<std::size_t>(pick(rng))];
  return counts;
}

}  // namespace gepsim
