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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "gepsim/cli.hpp"

namespace gepsim::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view tok, const std::string& what) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw Error(Errc::ParseError, what + ": bad number '" + std::string(tok) + "'");
  }
  return v;
}

template <typename Int>
Int to_int(std::string_view tok, const std::string& what) {
  tok = trim(tok);
  Int v{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error(Errc::ParseError, what + ": bad integer '" + std::string(tok) + "'");
  }
  return v;
}

CMatrix square_from_list(const std::vector<double>& v, const char* name) {
  const auto m = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (m < 1 || m * m != static_cast<Index>(v.size())) {
    throw Error(Errc::InvalidArgument, std::string(name) + " needs m*m entries");
  }
  CMatrix M(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) M(i, j) = v[static_cast<std::size_t>(i * m + j)];
  }
  return M;
}

// Hermitian with eigenvalues uniform in [lo, hi].
CMatrix random_hermitian(Index m, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  RVector d(m);
  for (Index i = 0; i < m; ++i) d(i) = u(rng);
  const CMatrix Q = haar_unitary(m, rng);
  return hermitian_part(CMatrix(Q * d.cast<cd>().asDiagonal() * Q.adjoint()));
}

}  // namespace

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::IoError:
    case Errc::ParseError:
    case Errc::SchemaError:
    case Errc::SchemaVersionMismatch:
      return kExitIo;
    case Errc::SingularB:
    case Errc::SingularMatrix:
    case Errc::IllConditionedEigenbasis:
      return kExitSingular;
    case Errc::NotUnitary:
    case Errc::AlphaTooSmall:
      return kExitBlockEncoding;
    default:
      return kExitUsage;
  }
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) return std::nullopt;
  return it->second;
}

KeyValueConfig parse_config(std::string_view text) {
  KeyValueConfig cfg;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": empty key");
    cfg.values[key] = std::string(trim(line.substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    out.push_back(to_double(text.substr(pos, comma == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : comma - pos),
                            "list"));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<double> default_spectrum(const GeneratorSpec& spec) {
  Rng rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> out(static_cast<std::size_t>(spec.n));
  for (auto& x : out) x = u(rng);
  std::sort(out.begin(), out.end());
  if (spec.family == Family::SingularA && !out.empty()) {
    auto nearest = std::min_element(out.begin(), out.end(), [](double a, double b) {
      return std::abs(a) < std::abs(b);
    });
    *nearest = 0.0;
  }
  return out;
}

GepInstance make_instance(const GeneratorSpec& spec) {
  if (spec.family == Family::QuadraticLinearized) {
    CMatrix a2;
    CMatrix a1;
    CMatrix a0;
    if (!spec.a2.empty() || !spec.a1.empty() || !spec.a0.empty()) {
      a2 = square_from_list(spec.a2, "a2");
      a1 = square_from_list(spec.a1, "a1");
      a0 = square_from_list(spec.a0, "a0");
      if (spec.n != 0 && spec.n != 2 * a2.rows()) {
        throw Error(Errc::InvalidArgument, "n must be twice the coefficient size");
      }
    } else {
      if (spec.n < 2 || spec.n % 2 != 0) {
        throw Error(Errc::InvalidArgument, "quadratic family needs an even n >= 2");
      }
      // Overdamped: (x^H A1 x)^2 > 4 (x^H A2 x)(x^H A0 x), so all roots are real.
      const Index m = spec.n / 2;
      Rng rng(spec.seed);
      a2 = CMatrix::Identity(m, m);
      a1 = random_hermitian(m, 3.0, 4.0, rng);
      a0 = random_hermitian(m, 0.5, 1.0, rng);
    }
    return gen_quadratic_linearized(a2, a1, a0, spec.seed);
  }

  if (spec.n < 1) throw Error(Errc::InvalidArgument, "n must be positive");
  const std::vector<double> spectrum = spec.spectrum ? *spec.spectrum : default_spectrum(spec);
  switch (spec.family) {
    case Family::Symmetric:
      return gen_symmetric(spec.n, spec.kappaB, spectrum, spec.seed);
    case Family::DiagonalizableReal:
      return gen_diagonalizable_real(spec.n, spec.kappaE, spectrum, spec.kappaB, spec.seed);
    case Family::SingularA:
      return gen_singular_A(spec.n, spectrum, spec.kappaB, spec.seed, spec.kappaE);
    case Family::DefiniteRotated:
      return gen_definite_rotated(spec.n, spec.theta,
                                  gen_symmetric(spec.n, spec.kappaB, spectrum, spec.seed));
    case Family::QuadraticLinearized:
      break;
  }
  throw Error(Errc::InvalidArgument, "unsupported family");
}

CVector make_phi0(const std::string& choice, const GepInstance& inst, std::uint64_t seed) {
  const Index n = inst.n();
  if (choice == "uniform") return CVector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  if (choice == "random") {
    Rng rng(seed);
    return random_unit_vector(n, rng);
  }
  if (choice.rfind("eigvec:", 0) == 0) {
    if (!inst.truth) throw Error(Errc::InvalidArgument, "eigvec input needs a known eigenbasis");
    const auto j = to_int<Index>(std::string_view(choice).substr(7), "eigvec index");
    if (j < 0 || j >= inst.truth->vectors.cols()) {
      throw Error(Errc::InvalidArgument, "eigvec index out of range");
    }
    return inst.truth->vectors.col(j).normalized();
  }
  if (choice.rfind("file:", 0) == 0) {
    const std::filesystem::path path = choice.substr(5);
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    std::vector<cd> entries;
    std::string tok;
    while (in >> tok) {
      const auto comma = tok.find(',');
      if (comma == std::string::npos) {
        entries.emplace_back(to_double(tok, "phi0"), 0.0);
      } else {
        entries.emplace_back(to_double(std::string_view(tok).substr(0, comma), "phi0"),
                             to_double(std::string_view(tok).substr(comma + 1), "phi0"));
      }
    }
    if (static_cast<Index>(entries.size()) != n) {
      throw Error(Errc::ParseError, "phi0 file has " + std::to_string(entries.size()) +
                                        " entries, expected " + std::to_string(n));
    }
    CVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = entries[static_cast<std::size_t>(i)];
    if (!(v.norm() > 0.0)) throw Error(Errc::InvalidArgument, "phi0 is zero");
    return v.normalized();
  }
  throw Error(Errc::InvalidArgument, "unknown phi0 choice '" + choice + "'");
}

SweepSpec sweep_spec_from_config(const KeyValueConfig& cfg) {
  static const std::set<std::string> known = {
      "family", "n", "kappa_b", "kappa_e", "theta", "spectrum", "instances",
      "epsilons", "solver_errors", "reps", "seed", "phi0", "a2", "a1", "a0"};
  for (const auto& [key, value] : cfg.values) {
    if (!known.count(key)) throw Error(Errc::InvalidArgument, "unknown config key '" + key + "'");
  }
  SweepSpec spec;
  if (auto v = cfg.get("family")) {
    const auto fam = parse_family(*v);
    if (!fam) throw Error(Errc::InvalidArgument, "unknown family '" + *v + "'");
    spec.gen.family = *fam;
  }
  if (auto v = cfg.get("n")) spec.gen.n = to_int<Index>(*v, "n");
  if (auto v = cfg.get("kappa_b")) spec.gen.kappaB = to_double(*v, "kappa_b");
  if (auto v = cfg.get("kappa_e")) spec.gen.kappaE = to_double(*v, "kappa_e");
  if (auto v = cfg.get("theta")) spec.gen.theta = to_double(*v, "theta");
  if (auto v = cfg.get("spectrum")) spec.gen.spectrum = parse_list(*v);
  if (auto v = cfg.get("a2")) spec.gen.a2 = parse_list(*v);
  if (auto v = cfg.get("a1")) spec.gen.a1 = parse_list(*v);
  if (auto v = cfg.get("a0")) spec.gen.a0 = parse_list(*v);
  if (auto v = cfg.get("instances")) spec.instances = to_int<Index>(*v, "instances");
  if (auto v = cfg.get("epsilons")) spec.epsilons = parse_list(*v);
  if (auto v = cfg.get("solver_errors")) spec.solver_errors = parse_list(*v);
  if (auto v = cfg.get("reps")) spec.reps = to_int<Index>(*v, "reps");
  if (auto v = cfg.get("seed")) spec.seed = to_int<std::uint64_t>(*v, "seed");
  if (auto v = cfg.get("phi0")) spec.phi0 = *v;
  return spec;
}

unsigned sweep_threads() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GEPSIM_THREADS")) {
    try {
      const auto v = to_int<unsigned>(env, "GEPSIM_THREADS");
      if (v >= 1) return v;
    } catch (const Error&) {
    }
  }
  return hw;
}

}  // namespace gepsim::cli
