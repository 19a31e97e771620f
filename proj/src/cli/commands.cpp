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

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gepsim/baseline.hpp"
#include "gepsim/blockenc.hpp"
#include "gepsim/cli.hpp"
#include "gepsim/diagnostics.hpp"

namespace gepsim::cli {
namespace {

constexpr double kBeDefectLimit = 1e-8;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot write " + path);
  f << text;
  if (!f) throw Error(Errc::IoError, "write failed for " + path);
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text(path, text);
  }
}

// Supplies the dense eigendecomposition when the file carries no truth.
GepInstance load_with_truth(const std::string& path) {
  GepInstance inst = load_instance(path);
  if (!inst.truth) {
    try {
      inst.truth = gen_eig(inst.A, inst.B);
    } catch (const Error& e) {
      if (e.code() == Errc::SingularB) throw;
    }
  }
  return inst;
}

struct GenerateArgs {
  std::string family;
  Index n = 0;
  double kappaB = 1.0;
  double kappaE = 4.0;
  double theta = 0.3;
  std::string spectrum;
  std::string a2, a1, a0;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  GeneratorSpec spec;
  const auto fam = parse_family(a.family);
  if (!fam) throw Error(Errc::InvalidArgument, "unknown family '" + a.family + "'");
  spec.family = *fam;
  spec.n = a.n;
  if (spec.family != Family::QuadraticLinearized && a.n < 1) {
    throw Error(Errc::InvalidArgument, "--n is required");
  }
  spec.kappaB = a.kappaB;
  spec.kappaE = a.kappaE;
  spec.theta = a.theta;
  spec.seed = a.seed;
  if (!a.spectrum.empty()) spec.spectrum = parse_list(a.spectrum);
  spec.a2 = parse_list(a.a2);
  spec.a1 = parse_list(a.a1);
  spec.a0 = parse_list(a.a0);

  const GepInstance inst = make_instance(spec);
  save_instance(inst, a.output);

  out << "wrote " << a.output << ": family=" << family_tag(inst.family) << " n=" << inst.n()
      << " kappa_B=" << num(condition_number(inst.B));
  if (inst.truth) out << " kappa_E=" << num(inst.truth->kappaE);
  if (inst.family == Family::Symmetric) {
    out << " kappa_E(B-orthonormal)=" << num(check_kappaE(inst).measured);
  }
  out << " rho=" << num(choose_rho(inst)) << '\n';
  return kExitOk;
}

struct RunArgs {
  std::string instance;
  std::string method = "ode";
  double epsilon = 0.05;
  double solver_error = 0.0;
  std::string phi0 = "uniform";
  std::uint64_t seed = 0;
  std::string output;
  std::string plot;
  Index shots = 0;
  bool no_diagnostics = false;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  const GepInstance inst = load_with_truth(a.instance);
  const CVector phi0 = make_phi0(a.phi0, inst, a.seed);
  RunReport report;
  if (a.method == "ode") {
    RunOptions opts;
    opts.seed = a.seed;
    opts.diagnostics = !a.no_diagnostics;
    report = run_pipeline(inst, phi0, a.epsilon, a.solver_error, opts);
  } else if (a.method == "qpe") {
    report = run_standard(inst, phi0, a.epsilon);
  } else {
    throw Error(Errc::InvalidArgument, "unknown method '" + a.method + "'");
  }

  const std::string id = std::filesystem::path(a.instance).stem().string();
  emit(a.output, format_run_csv(id, report, inst.n()), out);
  if (!a.plot.empty()) {
    write_text(a.plot, plot_script(a.output.empty() || a.output == "-" ? "run.csv" : a.output));
  }
  if (a.shots > 0) {
    const std::vector<Index> counts = sample_shots(report.dist, a.shots, a.seed);
    err << "shots:";
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (counts[k] > 0) err << ' ' << k << ':' << counts[k];
    }
    err << '\n';
  }
  if (!report.truth_errors.empty() && report.max_error() > a.epsilon) {
    err << "accuracy failure: max error " << num(report.max_error()) << " > epsilon "
        << num(a.epsilon) << '\n';
    return kExitAccuracy;
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string instance;
  double epsilon = 0.5;
  Index p = 0;
};

int cmd_verify_be(const VerifyArgs& a, std::ostream& out) {
  const GepInstance inst = load_instance(a.instance);
  const double rho = choose_rho(inst);
  const SpectralParams params =
      a.p > 0 ? params_with_nodes(a.epsilon, rho, a.p) : choose_params(a.epsilon, rho);
  if (inst.n() * params.p > kMaxBeSystem) {
    throw Error(Errc::TooLarge, "n p = " + std::to_string(inst.n() * params.p) + " exceeds " +
                                    std::to_string(kMaxBeSystem));
  }
  const BlockEncoding be = build_M_be(inst, params);
  CVector e0 = CVector::Zero(inst.n());
  e0(0) = 1.0;
  const SpectralSystem sys = build_system(inst, e0, params);
  const BeDefects d = verify_be(be, sys.M);
  out << "n=" << inst.n() << " p=" << params.p << '\n';
  out << "unitarity_defect=" << num(d.unitarity) << '\n';
  out << "extraction_defect=" << num(d.extraction) << '\n';
  out << "alpha=" << num(be.alpha) << '\n';
  out << "q=" << be.q << '\n';
  return d.unitarity <= kBeDefectLimit && d.extraction <= kBeDefectLimit ? kExitOk
                                                                          : kExitBlockEncoding;
}

struct CompareArgs {
  std::string instance;
  double epsilon = 0.05;
  std::string phi0 = "uniform";
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_baseline_compare(const CompareArgs& a, std::ostream& out) {
  const GepInstance inst = load_with_truth(a.instance);
  (void)reduce_symmetric(inst);
  const CVector phi0 = make_phi0(a.phi0, inst, a.seed);
  RunOptions opts;
  opts.seed = a.seed;
  opts.diagnostics = false;
  const RunReport ode = run_pipeline(inst, phi0, a.epsilon, 0.0, opts);
  const RunReport qpe = run_standard(inst, phi0, a.epsilon);
  const double tol = 1.0 / ode.params.tau + 1.0 / qpe.params.tau;

  std::ostringstream csv;
  csv << kCompareCsvHeader << '\n' << "j,lambda_true,ode_est,qpe_est,diff,tolerance,agree\n";
  bool all = true;
  for (std::size_t j = 0; j < ode.estimates.size() && j < qpe.estimates.size(); ++j) {
    const double diff = std::abs(ode.estimates[j] - qpe.estimates[j]);
    const bool ok = diff <= tol;
    all = all && ok;
    csv << j << ',' << num(ode.truth[j]) << ',' << num(ode.estimates[j]) << ','
        << num(qpe.estimates[j]) << ',' << num(diff) << ',' << num(tol) << ',' << (ok ? 1 : 0)
        << '\n';
  }
  emit(a.output, csv.str(), out);
  return all ? kExitOk : kExitAccuracy;
}

struct ReportArgs {
  std::string instance;
  double epsilon = 0.05;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const GepInstance inst = load_with_truth(a.instance);
  out << "instance " << a.instance << " family=" << family_tag(inst.family) << " n=" << inst.n()
      << '\n';
  if (inst.truth) out << "truth_residual=" << num(truth_residual(inst)) << '\n';
  out << format_complexity_table(complexity_report(inst, a.epsilon));

  if (is_hermitian(inst.A) && is_hermitian(inst.B)) {
    const CrawfordResult c = crawford_number(inst.A, inst.B);
    out << "crawford gamma=" << num(c.gamma);
    if (c.theta_star) out << " theta*=" << num(*c.theta_star);
    const BoundCheck d = crawford_norm_diagnostic(inst.A, inst.B, c.gamma);
    out << " norm_bound=" << num(d.bound) << (d.pass ? " holds" : " violated") << '\n';
    try {
      const BoundCheck k = check_kappaE(inst);
      out << "kappaE(B-orthonormal)=" << num(k.measured) << " sqrt(kappaB)=" << num(k.bound)
          << (k.pass ? " pass" : " FAIL") << '\n';
    } catch (const Error&) {
      // Not a symmetric pair.
    }
  }

  try {
    const SpectralParams params = choose_params(a.epsilon, choose_rho(inst));
    CVector e0 = CVector::Zero(inst.n());
    e0(0) = 1.0;
    const auto [sandwich, inverse] = check_condM(inst, e0, params);
    out << "p=" << params.p << " tau=" << num(params.tau) << '\n';
    out << "norm_sandwich lower=" << num(sandwich.lower) << " |M|=" << num(sandwich.measured)
        << " upper=" << num(sandwich.bound) << (sandwich.pass ? " pass" : " FAIL") << '\n';
    out << "inverse_norm |M^-1|=" << num(inverse.measured) << " bound=" << num(inverse.bound)
        << " ratio=" << num(inverse.ratio) << (inverse.pass ? " pass" : " FAIL") << '\n';
  } catch (const Error& e) {
    out << "condition checks skipped: " << e.what() << '\n';
  }
  return kExitOk;
}

struct SweepArgs {
  std::string config;
  std::string output;
  std::string epsilons;
  std::string solver_errors;
  std::optional<Index> reps;
  std::optional<Index> instances;
  std::optional<std::uint64_t> seed;
  std::string family;
  std::optional<Index> n;
  std::optional<double> kappaB;
  std::optional<double> kappaE;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  KeyValueConfig cfg;
  if (!a.config.empty()) cfg = load_config(a.config);
  if (!a.epsilons.empty()) cfg.values["epsilons"] = a.epsilons;
  if (!a.solver_errors.empty()) cfg.values["solver_errors"] = a.solver_errors;
  if (a.reps) cfg.values["reps"] = std::to_string(*a.reps);
  if (a.instances) cfg.values["instances"] = std::to_string(*a.instances);
  if (a.seed) cfg.values["seed"] = std::to_string(*a.seed);
  if (!a.family.empty()) cfg.values["family"] = a.family;
  if (a.n) cfg.values["n"] = std::to_string(*a.n);
  if (a.kappaB) cfg.values["kappa_b"] = num(*a.kappaB);
  if (a.kappaE) cfg.values["kappa_e"] = num(*a.kappaE);
  const SweepSpec spec = sweep_spec_from_config(cfg);
  emit(a.output, run_sweep(spec, sweep_threads()), out);
  return kExitOk;
}

}  // namespace

std::string format_run_csv(const std::string& instance_id, const RunReport& report, Index n) {
  std::ostringstream csv;
  csv << kRunCsvHeader << '\n';
  csv << "instance_id,method,n,epsilon,rho,p,h,tau,kappaM,kappaM_bound_ratio,truncation_residual,"
         "j,lambda_true,lambda_est,abs_err,peak_mass\n";
  const bool diag = report.kappaM > 0.0;
  const SpectralParams& pr = report.params;
  for (std::size_t j = 0; j < report.estimates.size(); ++j) {
    csv << instance_id << ',' << report.method << ',' << n << ',' << num(pr.epsilon) << ','
        << num(pr.rho) << ',' << pr.p << ',' << num(pr.h) << ',' << num(pr.tau) << ','
        << (diag ? num(report.kappaM) : "") << ',' << (diag ? num(report.bound_ratio) : "") << ','
        << (diag ? num(report.truncation) : "") << ',' << j << ','
        << (j < report.truth.size() ? num(report.truth[j]) : "") << ','
        << num(report.estimates[j]) << ','
        << (j < report.truth_errors.size() ? num(report.truth_errors[j]) : "") << ','
        << num(report.peak_masses[j]) << '\n';
  }
  return csv.str();
}

std::string plot_script(const std::filesystem::path& csv_path) {
  std::ostringstream s;
  s << "# gnuplot script; run with: gnuplot -p <this file>\n";
  s << "set datafile separator ','\n";
  s << "set key top left\n";
  s << "set xlabel 'lambda (reference)'\n";
  s << "set ylabel 'lambda (estimate)'\n";
  s << "set grid\n";
  s << "plot '" << csv_path.string()
    << "' every ::1 using 13:14 with points pt 7 title 'estimates', x with lines title 'exact'\n";
  return s.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gepsim: generalized eigenvalue solver emulator"};
  app.name("gepsim");
  app.require_subcommand(1);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a generated instance file");
  gen->add_option("--family", ga.family, "symmetric|diagonalizable|rotated|singular|quadratic")
      ->required();
  gen->add_option("--n", ga.n, "Dimension (quadratic: 2m)");
  gen->add_option("--kappa-b", ga.kappaB, "Condition number of B");
  gen->add_option("--kappa-e", ga.kappaE, "Condition number of the eigenvector matrix");
  gen->add_option("--theta", ga.theta, "Rotation angle for the rotated family");
  gen->add_option("--spectrum", ga.spectrum, "Comma-separated eigenvalues");
  gen->add_option("--a2", ga.a2, "Quadratic A2, row-major comma list");
  gen->add_option("--a1", ga.a1, "Quadratic A1, row-major comma list");
  gen->add_option("--a0", ga.a0, "Quadratic A0, row-major comma list");
  gen->add_option("--seed", ga.seed, "Generator seed");
  gen->add_option("-o,--output", ga.output, "Output instance file")->required();

  RunArgs ra;
  auto* runc = app.add_subcommand("run", "Estimate eigenvalues of an instance");
  runc->add_option("-i,--instance", ra.instance, "Instance file")->required();
  runc->add_option("--method", ra.method, "ode|qpe");
  runc->add_option("--epsilon", ra.epsilon, "Target additive error");
  runc->add_option("--solver-error", ra.solver_error, "Injected linear-solver error");
  runc->add_option("--phi0", ra.phi0, "uniform|random|eigvec:<j>|file:<path>");
  runc->add_option("--seed", ra.seed, "Seed for random inputs and solver perturbation");
  runc->add_option("-o,--output", ra.output, "CSV output (default stdout)");
  runc->add_option("--plot", ra.plot, "Write a gnuplot script here");
  runc->add_option("--shots", ra.shots, "Sample this many register readouts to stderr");
  runc->add_flag("--no-diagnostics", ra.no_diagnostics, "Skip kappa(M) and residual columns");

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("config_file", sa.config, "key=value sweep file");
  sweep->add_option("--config", sa.config, "key=value sweep file");
  sweep->add_option("-o,--output", sa.output, "CSV output (default stdout)");
  sweep->add_option("--epsilons", sa.epsilons, "Comma-separated epsilons");
  sweep->add_option("--solver-errors", sa.solver_errors, "Comma-separated solver errors");
  sweep->add_option("--reps", sa.reps, "Repetitions per cell");
  sweep->add_option("--instances", sa.instances, "Instances to generate");
  sweep->add_option("--seed", sa.seed, "Base seed");
  sweep->add_option("--family", sa.family, "Instance family");
  sweep->add_option("--n", sa.n, "Dimension");
  sweep->add_option("--kappa-b", sa.kappaB, "Condition number of B");
  sweep->add_option("--kappa-e", sa.kappaE, "Eigenbasis condition number");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify-be", "Check the block-encoding of M");
  verify->add_option("-i,--instance", va.instance, "Instance file")->required();
  verify->add_option("--epsilon", va.epsilon, "Target error used to pick p");
  verify->add_option("--p", va.p, "Explicit odd node count");

  CompareArgs ca;
  auto* compare = app.add_subcommand("baseline-compare", "Compare ODE and QPE estimates");
  compare->add_option("-i,--instance", ca.instance, "Symmetric instance file")->required();
  compare->add_option("--epsilon", ca.epsilon, "Target additive error");
  compare->add_option("--phi0", ca.phi0, "uniform|random|eigvec:<j>|file:<path>");
  compare->add_option("--seed", ca.seed, "Seed for random inputs");
  compare->add_option("-o,--output", ca.output, "CSV output (default stdout)");

  ReportArgs pa;
  auto* report = app.add_subcommand("report", "Print complexity and conditioning diagnostics");
  report->add_option("-i,--instance", pa.instance, "Instance file")->required();
  report->add_option("--epsilon", pa.epsilon, "Target additive error");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(ga, out);
    if (*runc) return cmd_run(ra, out, err);
    if (*sweep) return cmd_sweep(sa, out);
    if (*verify) return cmd_verify_be(va, out);
    if (*compare) return cmd_baseline_compare(ca, out);
    if (*report) return cmd_report(pa, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace gepsim::cli
