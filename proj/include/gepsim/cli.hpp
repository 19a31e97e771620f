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

// Command-line front end. Every verb is reachable in-process through run(),
// which is what the tool binary and the tests call.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gepsim/instances.hpp"
#include "gepsim/spectral.hpp"

namespace gepsim::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitIo = 3,
  kExitSingular = 4,
  kExitAccuracy = 5,
  kExitBlockEncoding = 6,
};

inline constexpr std::string_view kRunCsvHeader = "# gepsim run-csv v1";
inline constexpr std::string_view kSweepCsvHeader = "# gepsim sweep-csv v1";
inline constexpr std::string_view kCompareCsvHeader = "# gepsim compare-csv v1";

int exit_code_for(Errc code) noexcept;

/// Dispatches `args` (without the program name) to a verb.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Configuration files: one `key = value` per line, `#` starts a comment.

struct KeyValueConfig {
  std::map<std::string, std::string> values;

  std::optional<std::string> get(const std::string& key) const;
};

KeyValueConfig parse_config(std::string_view text);
KeyValueConfig load_config(const std::filesystem::path& path);

/// Comma-separated reals; empty input gives an empty list.
std::vector<double> parse_list(std::string_view text);

struct GeneratorSpec {
  Family family = Family::Symmetric;
  Index n = 0;
  double kappaB = 1.0;
  double kappaE = 4.0;
  double theta = 0.3;
  std::optional<std::vector<double>> spectrum;
  std::uint64_t seed = 0;
  // Quadratic coefficients, row-major real m x m; random when empty.
  std::vector<double> a2;
  std::vector<double> a1;
  std::vector<double> a0;
};

/// Default spectrum: n seeded values in [-1, 1] (one forced to zero for the
/// singular family).
std::vector<double> default_spectrum(const GeneratorSpec& spec);

GepInstance make_instance(const GeneratorSpec& spec);

/// uniform | random | eigvec:<j> | file:<path>
CVector make_phi0(const std::string& choice, const GepInstance& inst, std::uint64_t seed);

struct SweepSpec {
  GeneratorSpec gen;
  Index instances = 1;
  std::vector<double> epsilons;
  std::vector<double> solver_errors{0.0};
  Index reps = 1;
  std::uint64_t seed = 0;
  std::string phi0 = "random";
};

SweepSpec sweep_spec_from_config(const KeyValueConfig& cfg);

/// Worker count: GEPSIM_THREADS when set, else the hardware concurrency.
unsigned sweep_threads();

/// Runs every (instance, epsilon, solver_error, rep) cell; rows are ordered
/// by that tuple regardless of scheduling.
std::string run_sweep(const SweepSpec& spec, unsigned threads);

std::string format_run_csv(const std::string& instance_id, const RunReport& report, Index n);

/// gnuplot script plotting estimates against truth from a run CSV.
std::string plot_script(const std::filesystem::path& csv_path);

}  // namespace gepsim::cli
