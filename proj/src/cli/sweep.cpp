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

#include <atomic>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include "gepsim/cli.hpp"
#include "gepsim/diagnostics.hpp"

namespace gepsim::cli {
namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_seed(std::uint64_t seed, Index i, Index e, Index s, Index r) {
  std::uint64_t h = splitmix(seed);
  for (Index v : {i, e, s, r}) h = splitmix(h ^ static_cast<std::uint64_t>(v));
  return h;
}

struct Prepared {
  GepInstance inst;
  CVector phi0;
  std::uint64_t seed = 0;
};

}  // namespace

std::string run_sweep(const SweepSpec& spec, unsigned threads) {
  if (spec.epsilons.empty()) throw Error(Errc::InvalidArgument, "sweep needs at least one epsilon");
  if (spec.solver_errors.empty()) {
    throw Error(Errc::InvalidArgument, "sweep needs at least one solver_error");
  }
  if (spec.reps < 1) throw Error(Errc::InvalidArgument, "reps must be >= 1");
  if (spec.instances < 1) throw Error(Errc::InvalidArgument, "instances must be >= 1");

  std::vector<Prepared> prepared;
  for (Index i = 0; i < spec.instances; ++i) {
    GeneratorSpec gen = spec.gen;
    gen.seed = spec.seed + static_cast<std::uint64_t>(i);
    Prepared p;
    p.inst = make_instance(gen);
    if (!p.inst.truth) {
      try {
        p.inst.truth = gen_eig(p.inst.A, p.inst.B);
      } catch (const Error&) {
      }
    }
    p.seed = gen.seed;
    p.phi0 = make_phi0(spec.phi0, p.inst, gen.seed);
    prepared.push_back(std::move(p));
  }

  const Index E = static_cast<Index>(spec.epsilons.size());
  const Index tasks = spec.instances * E;
  std::vector<std::string> chunks(static_cast<std::size_t>(tasks));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(tasks));

  auto work = [&](Index task) {
    const Index i = task / E;
    const Index e = task % E;
    const Prepared& pr = prepared[static_cast<std::size_t>(i)];
    const double eps = spec.epsilons[static_cast<std::size_t>(e)];
    const SpectralParams params = choose_params(eps, choose_rho(pr.inst));

    std::string cond_cols = ",,,,,,,";
    if (pr.inst.n() * params.p <= kMaxCondMSystem) {
      const auto [sandwich, inverse] = check_condM(pr.inst, pr.phi0, params);
      cond_cols = num(sandwich.measured) + "," + num(sandwich.lower) + "," + num(sandwich.bound) +
                  "," + (sandwich.pass ? "1" : "0") + "," + num(inverse.measured) + "," +
                  num(inverse.bound) + "," + num(inverse.ratio) + "," + (inverse.pass ? "1" : "0");
    }

    std::ostringstream rows;
    for (Index s = 0; s < static_cast<Index>(spec.solver_errors.size()); ++s) {
      const double se = spec.solver_errors[static_cast<std::size_t>(s)];
      for (Index r = 0; r < spec.reps; ++r) {
        RunOptions opts;
        opts.seed = cell_seed(spec.seed, i, e, s, r);
        opts.diagnostics = false;
        const RunReport rep = run_pipeline(pr.inst, pr.phi0, eps, se, opts);
        const double err = rep.max_error();
        // Injected solver error widens the accepted band by eps / 2.
        const double tol = se > 0.0 ? 1.5 * eps : eps;
        rows << "inst" << i << ',' << family_tag(pr.inst.family) << ',' << pr.inst.n() << ','
             << pr.seed << ',' << num(eps) << ',' << num(se) << ',' << r << ','
             << num(params.rho) << ',' << params.p << ',' << num(params.tau) << ',' << num(err)
             << ',' << (err <= tol ? 1 : 0) << ',' << cond_cols << '\n';
      }
    }
    chunks[static_cast<std::size_t>(task)] = rows.str();
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tasks)));
  std::atomic<Index> next{0};
  auto loop = [&]() {
    for (Index t = next++; t < tasks; t = next++) {
      try {
        work(t);
      } catch (...) {
        failures[static_cast<std::size_t>(t)] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    loop();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop);
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::ostringstream out;
  out << kSweepCsvHeader << '\n';
  out << "instance_id,family,n,seed,epsilon,solver_error,rep,rho,p,tau,max_abs_err,accuracy_pass,"
         "norm_M,norm_lower,norm_upper,sandwich_pass,invM_norm,invM_bound,invM_ratio,invM_pass\n";
  for (const auto& c : chunks) out << c;
  return out.str();
}

}  // namespace gepsim::cli
