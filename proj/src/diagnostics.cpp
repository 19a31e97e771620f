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

#include "gepsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "gepsim/baseline.hpp"

namespace gepsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kCrawfordGrid = 1024;
constexpr int kCrawfordSamples = 100000;

double quad_form(const CMatrix& H, const CVector& x) { return x.dot(H * x).real(); }

double crawford_objective(const CMatrix& A, const CMatrix& B, const CVector& x) {
  return std::hypot(quad_form(A, x), quad_form(B, x));
}

// Random restarts plus projected gradient descent on the unit sphere.
double crawford_by_sampling(const CMatrix& A, const CMatrix& B) {
  const Index n = A.rows();
  Rng rng(0xC2A3F0D5ULL);
  std::vector<std::pair<double, CVector>> best;
  constexpr std::size_t kKeep = 8;
  for (int s = 0; s < kCrawfordSamples; ++s) {
    CVector x = random_unit_vector(n, rng);
    const double g = crawford_objective(A, B, x);
    if (best.size() < kKeep || g < best.back().first) {
      best.emplace_back(g, std::move(x));
      std::sort(best.begin(), best.end(),
                [](const auto& l, const auto& r) { return l.first < r.first; });
      if (best.size() > kKeep) best.pop_back();
    }
  }
  double gamma = best.front().first;
  const double scale = std::max(op_norm(A) + op_norm(B), 1e-300);
  for (auto& [g, x] : best) {
    double step = 0.1 / scale;
    for (int it = 0; it < 500 && step > 1e-16 / scale; ++it) {
      const double a = quad_form(A, x);
      const double b = quad_form(B, x);
      const CVector grad = a * (A * x) + b * (B * x);
      CVector y = x - step * grad;
      y.normalize();
      const double gy = crawford_objective(A, B, y);
      if (gy < g) {
        x = y;
        g = gy;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    gamma = std::min(gamma, g);
  }
  return gamma;
}

void require_symmetric_pair(const CMatrix& A, const CMatrix& B) {
  if (!is_hermitian(A) || !is_hermitian(B)) {
    throw Error(Errc::NotSymmetricPair, "A and B must be Hermitian");
  }
  const EigDecomp eb = herm_eig(B);
  if (!(eb.values(0).real() > 0.0)) {
    throw Error(Errc::NotSymmetricPair, "B is not positive definite");
  }
}

std::vector<double> sorted_real_eigs(const CMatrix& A, const CMatrix& B) {
  const EigDecomp e = gen_eig(A, B);
  std::vector<double> out(static_cast<std::size_t>(e.values.size()));
  for (Index i = 0; i < e.values.size(); ++i) out[static_cast<std::size_t>(i)] = e.values(i).real();
  std::sort(out.begin(), out.end());
  return out;
}

double pencil_kappaE(const GepInstance& inst) {
  if (inst.truth) return inst.truth->kappaE;
  return gen_eig(inst.A, inst.B).kappaE;
}

}  // namespace

std::pair<BoundCheck, BoundCheck> check_condM(const GepInstance& inst, const CVector& phi0,
                                              const SpectralParams& params) {
  validate_shape(inst);
  const Index dim = inst.n() * params.p;
  if (dim > kMaxCondMSystem) {
    throw Error(Errc::TooLarge, "n p = " + std::to_string(dim) + " exceeds " +
                                    std::to_string(kMaxCondMSystem));
  }
  const SpectralSystem sys = build_system(inst, phi0, params);
  const SvdExtremes sm = svd_extremes(sys.M);
  const double normN = collocation_operator_norm(inst, params);
  const double p = static_cast<double>(params.p);

  BoundCheck sandwich;
  sandwich.name = "norm_sandwich";
  sandwich.measured = sm.sigma_max;
  sandwich.lower = std::sqrt((p - 1.0) / p) * normN;
  sandwich.bound = std::sqrt(1.0 + normN * normN);
  sandwich.ratio = sandwich.measured / sandwich.bound;
  sandwich.pass = sandwich.lower <= sandwich.measured * (1.0 + 1e-9) + 1e-9 &&
                  sandwich.measured <= sandwich.bound * (1.0 + 1e-9);

  BoundCheck inverse;
  inverse.name = "inverse_norm";
  inverse.measured = sm.sigma_min > 0.0 ? 1.0 / sm.sigma_min
                                        : std::numeric_limits<double>::infinity();
  inverse.bound = inverse_norm_bound(inst.A, inst.B, pencil_kappaE(inst), params.epsilon);
  inverse.ratio = inverse.measured / inverse.bound;
  inverse.pass = inverse.ratio <= 1.0;
  return {sandwich, inverse};
}

double rotated_min_eig(const CMatrix& A, const CMatrix& B, double theta) {
  const CMatrix H = hermitian_part(CMatrix(std::sin(theta) * A + std::cos(theta) * B));
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(H, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

CrawfordResult crawford_number(const CMatrix& A, const CMatrix& B) {
  if (A.rows() != B.rows() || A.rows() != A.cols() || B.rows() != B.cols()) {
    throw Error(Errc::DimensionMismatch, "A and B must be square of equal size");
  }
  if (!is_hermitian(A) || !is_hermitian(B)) {
    throw Error(Errc::NotHermitian, "Crawford number needs Hermitian A and B");
  }
  const double step = kTwoPi / kCrawfordGrid;
  int best_i = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kCrawfordGrid; ++i) {
    const double v = rotated_min_eig(A, B, step * i);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }

  CrawfordResult out;
  if (best > 0.0) {
    // Golden-section search for the maximum around the best grid point.
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = step * best_i - step;
    double b = step * best_i + step;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = rotated_min_eig(A, B, c);
    double fd = rotated_min_eig(A, B, d);
    while (b - a > 1e-10) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = rotated_min_eig(A, B, c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = rotated_min_eig(A, B, d);
      }
    }
    double theta = 0.5 * (a + b);
    double gamma = rotated_min_eig(A, B, theta);
    if (best > gamma) {
      theta = step * best_i;
      gamma = best;
    }
    theta = std::fmod(theta, kTwoPi);
    if (theta < 0.0) theta += kTwoPi;
    out.gamma = gamma;
    out.theta_star = theta;
    return out;
  }
  out.gamma = crawford_by_sampling(A, B);
  return out;
}

BoundCheck crawford_norm_diagnostic(const CMatrix& A, const CMatrix& B, double gamma) {
  const double sa = svd_extremes(A).sigma_min;
  const double sb = svd_extremes(B).sigma_min;
  BoundCheck out;
  out.name = "crawford_vs_inverse_norms";
  out.measured = gamma;
  out.bound = std::hypot(sa, sb);
  out.ratio = out.bound > 0.0 ? out.bound / std::max(gamma, 1e-300) : 0.0;
  out.pass = gamma >= out.bound * (1.0 - 1e-9);
  return out;
}

double chord(cd a, cd b) {
  return std::abs(a - b) / (std::sqrt(1.0 + std::norm(a)) * std::sqrt(1.0 + std::norm(b)));
}

CMatrix b_orthonormal_basis(const GepInstance& inst) {
  validate_shape(inst);
  require_symmetric_pair(inst.A, inst.B);
  CVector values;
  CMatrix E;
  if (inst.truth) {
    values = inst.truth->values;
    E = inst.truth->vectors;
  } else {
    const SymmetricReduction red = reduce_symmetric(inst);
    const EigDecomp h = herm_eig(red.Atilde);
    values = h.values;
    E = red.Bneghalf * h.vectors;
  }
  const Index n = E.cols();
  for (Index j = 0; j < n; ++j) {
    CVector v = E.col(j);
    for (Index i = 0; i < j; ++i) {
      if (std::abs(values(i) - values(j)) <= 1e-8 * (1.0 + std::abs(values(j)))) {
        v -= E.col(i) * E.col(i).dot(inst.B * v);
      }
    }
    const double bn = std::sqrt(quad_form(inst.B, v));
    E.col(j) = v / bn;
  }
  return E;
}

BoundCheck check_kappaE(const GepInstance& inst) {
  const CMatrix E = b_orthonormal_basis(inst);
  BoundCheck out;
  out.name = "kappaE_sqrt_kappaB";
  out.measured = condition_number(E);
  out.bound = std::sqrt(condition_number(inst.B));
  out.ratio = out.measured / out.bound;
  out.pass = std::abs(out.measured - out.bound) <= 1e-6 * out.bound;
  return out;
}

PerturbationReport perturbation_probe(const GepInstance& inst, const CMatrix& dA,
                                      const CMatrix& dB) {
  validate_shape(inst);
  require_symmetric_pair(inst.A, inst.B);
  const Index n = inst.n();
  if (dA.rows() != n || dA.cols() != n || dB.rows() != n || dB.cols() != n) {
    throw Error(Errc::DimensionMismatch, "perturbation size differs from n");
  }
  if (!is_hermitian(dA) || !is_hermitian(dB)) {
    throw Error(Errc::NotHermitian, "perturbations must be Hermitian");
  }
  const SvdExtremes sb = svd_extremes(inst.B);
  PerturbationReport out;
  out.delta = std::max(op_norm(dA), op_norm(dB));
  if (out.delta > 0.01 * sb.sigma_min) {
    throw Error(Errc::PerturbationTooLarge, "delta exceeds 0.01 sigma_min(B)");
  }
  out.kappaB = sb.sigma_max / sb.sigma_min;
  const std::vector<double> before = sorted_real_eigs(inst.A, inst.B);
  const std::vector<double> after = sorted_real_eigs(inst.A + dA, inst.B + dB);
  for (std::size_t i = 0; i < before.size(); ++i) {
    const double shift = after[i] - before[i];
    out.shifts.push_back(shift);
    out.max_shift = std::max(out.max_shift, std::abs(shift));
    if (out.delta > 0.0) {
      const double r = std::abs(shift) / ((1.0 + std::abs(before[i])) * out.delta * out.kappaB);
      out.ratio = std::max(out.ratio, r);
    }
  }
  return out;
}

PerturbationReport perturbation_probe(const GepInstance& inst, double delta, std::uint64_t seed) {
  validate_shape(inst);
  require_symmetric_pair(inst.A, inst.B);
  if (!(delta >= 0.0)) throw Error(Errc::InvalidArgument, "delta must be non-negative");
  const SvdExtremes sb = svd_extremes(inst.B);
  if (delta > 0.01 * sb.sigma_min) {
    throw Error(Errc::PerturbationTooLarge, "delta exceeds 0.01 sigma_min(B)");
  }
  const Index n = inst.n();
  Rng rng(seed);
  auto random_hermitian = [&]() -> CMatrix {
    if (delta == 0.0) return CMatrix::Zero(n, n);
    const CMatrix G = complex_gaussian(n, n, rng);
    const CMatrix H = hermitian_part(G);
    return H * (delta / op_norm(H));
  };
  const CMatrix dA = random_hermitian();
  const CMatrix dB = random_hermitian();
  return perturbation_probe(inst, dA, dB);
}

ComplexityReport complexity_report(const GepInstance& inst, double epsilon) {
  validate_shape(inst);
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be positive");
  ComplexityReport r;
  r.epsilon = epsilon;
  r.normA = op_norm(inst.A);
  r.normB = op_norm(inst.B);
  r.kappaB = condition_number(inst.B);
  try {
    r.kappaE = pencil_kappaE(inst);
  } catch (const Error&) {
    r.kappaE = std::numeric_limits<double>::infinity();
  }
  r.alphaA = r.normA > 0.0 ? 2.0 * r.normA : 1.0;
  r.alphaB = r.normB > 0.0 ? 2.0 * r.normB : 1.0;
  r.rho = choose_rho(inst);
  r.ode = r.kappaE * (r.alphaA + r.rho * r.alphaB) * r.kappaB / epsilon;
  r.qpe_product = r.alphaA * r.alphaB * std::pow(r.kappaB, 2.5) / epsilon;
  r.qpe_alt = (r.alphaA + r.normA * r.kappaB * r.alphaB) * r.kappaB * r.kappaB / epsilon;
  return r;
}

std::string format_complexity_table(const ComplexityReport& r) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line,
                "kappa_B=%.6g kappa_E=%.6g |A|=%.6g |B|=%.6g alpha_A=%.6g alpha_B=%.6g "
                "rho=%.6g eps=%.6g\n",
                r.kappaB, r.kappaE, r.normA, r.normB, r.alphaA, r.alphaB, r.rho, r.epsilon);
  out << line;
  out << "method        formula                                   value\n";
  std::snprintf(line, sizeof line, "ode           kE (aA + rho aB) kB / eps                 %.6e\n",
                r.ode);
  out << line;
  std::snprintf(line, sizeof line, "qpe-product   aA aB kB^2.5 / eps                        %.6e\n",
                r.qpe_product);
  out << line;
  std::snprintf(line, sizeof line, "qpe-alt       (aA + |A| kB aB) kB^2 / eps               %.6e\n",
                r.qpe_alt);
  out << line;
  return out.str();
}

}  // namespace gepsim
