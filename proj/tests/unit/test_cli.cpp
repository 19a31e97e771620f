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

#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "gepsim/cli.hpp"
#include "gepsim/diagnostics.hpp"
#include "helpers.hpp"

using namespace gepsim;
using namespace gepsim::testing;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Rows of a versioned CSV keyed by column name.
std::vector<std::map<std::string, std::string>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> cols;
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cols.empty()) {
      cols = cells;
      continue;
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < cols.size() && i < cells.size(); ++i) row[cols[i]] = cells[i];
    rows.push_back(row);
  }
  return rows;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("generate") {
  const auto dir = scratch_dir("cli_gen");
  const std::string path = (dir / "inst.gep").string();
  const Outcome o = invoke({"generate", "--family", "symmetric", "--n", "4", "--kappa-b", "100",
                            "--spectrum", "1,2,3,4", "--seed", "7", "-o", path});
  CHECK(o.code == 0);
  CHECK(o.out.find("kappa_E(B-orthonormal)=10") != std::string::npos);
  const GepInstance inst = load_instance(path);
  CHECK(inst.n() == 4);
  CHECK(std::abs(check_kappaE(inst).measured - 10.0) < 1e-6);

  CHECK(invoke({"generate", "--family", "symmetric", "-o", path}).code == 2);
  CHECK(invoke({"generate", "--family", "nonsense", "--n", "2", "-o", path}).code == 2);
  CHECK(invoke({"generate", "--n", "2", "-o", path}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"--help"}).code == 0);

  const Outcome q = invoke({"generate", "--family", "quadratic", "--a2", "0", "--a1", "1", "--a0",
                            "1", "-o", path});
  CHECK(q.code == 2);
  CHECK(q.err.find("SingularLeadingCoefficient") != std::string::npos);

  CHECK(invoke({"generate", "--family", "symmetric", "--n", "2", "-o",
                (dir / "missing" / "x.gep").string()})
            .code == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run") {
  const auto dir = scratch_dir("cli_run");
  const std::string sym = (dir / "sym.gep").string();
  const std::string dia = (dir / "dia.gep").string();
  REQUIRE(invoke({"generate", "--family", "symmetric", "--n", "4", "--kappa-b", "30", "--seed",
                  "3", "-o", sym})
              .code == 0);
  REQUIRE(invoke({"generate", "--family", "diagonalizable", "--n", "3", "--kappa-e", "5",
                  "--seed", "3", "-o", dia})
              .code == 0);

  const Outcome r = invoke({"run", "--instance", sym, "--method", "ode", "--epsilon", "0.05",
                            "--phi0", "uniform", "--plot", (dir / "plot.gp").string()});
  CHECK(r.code == 0);
  CHECK(r.out.rfind(std::string(cli::kRunCsvHeader), 0) == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 4);
  const GepInstance inst = load_instance(sym);
  const auto ref = symmetric_pair_spectrum(inst.A, inst.B);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(std::stod(rows[j].at("abs_err")) <= 0.05);
    CHECK(std::abs(std::stod(rows[j].at("lambda_est")) - ref[j]) <= 0.05);
    CHECK(rows[j].at("method") == "ode");
    CHECK_FALSE(rows[j].at("kappaM").empty());
  }
  CHECK(slurp(dir / "plot.gp").find("plot '") != std::string::npos);

  const Outcome e = invoke({"run", "--instance", sym, "--epsilon", "0.05", "--phi0", "eigvec:0"});
  CHECK(e.code == 0);
  const auto erows = parse_csv(e.out);
  REQUIRE(!erows.empty());
  CHECK(std::stod(erows[0].at("peak_mass")) >= 0.405);

  CHECK(invoke({"run", "--instance", dia, "--method", "qpe", "--epsilon", "0.05"}).code == 2);
  const Outcome qs = invoke({"run", "--instance", sym, "--method", "qpe", "--epsilon", "0.05"});
  CHECK(qs.code == 0);
  CHECK(parse_csv(qs.out)[0].at("method") == "qpe");

  const Outcome nd = invoke({"run", "--instance", sym, "--epsilon", "0.05", "--no-diagnostics"});
  CHECK(parse_csv(nd.out)[0].at("kappaM").empty());

  GepInstance sing;
  sing.A = CMatrix::Identity(2, 2);
  sing.B = CMatrix::Zero(2, 2);
  save_instance(sing, dir / "sing.gep");
  CHECK(invoke({"run", "--instance", (dir / "sing.gep").string(), "--epsilon", "0.1"}).code == 4);

  const Outcome bad = invoke({"run", "--instance", sym, "--epsilon", "0.05", "--solver-error",
                              "1.9", "--phi0", "eigvec:3", "--seed", "1"});
  CHECK(bad.code == 5);

  CHECK(invoke({"run", "--instance", (dir / "none.gep").string(), "--epsilon", "0.1"}).code == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep") {
  const auto dir = scratch_dir("cli_sweep");
  {
    std::ofstream cfg(dir / "s.cfg");
    cfg << "# three epsilons, two reps\nfamily = symmetric\nn = 3\nkappa_b = 10\ninstances = 2\n"
           "epsilons = 0.2, 0.1, 0.05\nreps = 2\nseed = 5\n";
  }
  const Outcome a = invoke({"sweep", (dir / "s.cfg").string()});
  CHECK(a.code == 0);
  const auto rows = parse_csv(a.out);
  CHECK(rows.size() == 12);
  int violations = 0;
  for (const auto& row : rows) {
    CHECK(row.at("accuracy_pass") == "1");
    CHECK(row.at("sandwich_pass") == "1");
    const double ratio = std::stod(row.at("invM_ratio"));
    CHECK((row.at("invM_pass") == "1") == (ratio <= 1.0));
    if (ratio > 1.0) ++violations;
  }
  // Near a zero of det M the inverse bound can be exceeded; it is reported, not hidden.
  MESSAGE("inverse-norm bound violations in sweep: " << violations << " of " << rows.size());
  CHECK(rows[0].at("instance_id") == "inst0");
  CHECK(rows[6].at("instance_id") == "inst1");
  CHECK(rows[1].at("rep") == "1");

  const Outcome b = invoke({"sweep", "--config", (dir / "s.cfg").string()});
  CHECK(a.out == b.out);

  const Outcome c = invoke({"sweep", (dir / "s.cfg").string(), "--epsilons", "0.1", "--reps",
                            "1", "--instances", "1", "--solver-errors", "0,0.025"});
  CHECK(parse_csv(c.out).size() == 2);

  {
    std::ofstream cfg(dir / "bad.cfg");
    cfg << "colour = blue\n";
  }
  CHECK(invoke({"sweep", (dir / "bad.cfg").string()}).code == 2);
  CHECK(invoke({"sweep", (dir / "nope.cfg").string()}).code == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify-be") {
  const auto dir = scratch_dir("cli_be");
  GepInstance one;
  one.A = CMatrix::Constant(1, 1, 0.4);
  one.B = CMatrix::Identity(1, 1);
  save_instance(one, dir / "one.gep");
  const Outcome o = invoke({"verify-be", "--instance", (dir / "one.gep").string(), "--p", "3"});
  CHECK(o.code == 0);
  CHECK(o.out.find("alpha=") != std::string::npos);
  CHECK(o.out.find("q=8") != std::string::npos);

  GepInstance big;
  big.A = CMatrix::Identity(40, 40);
  big.B = CMatrix::Identity(40, 40);
  save_instance(big, dir / "big.gep");
  CHECK(invoke({"verify-be", "--instance", (dir / "big.gep").string(), "--p", "15"}).code == 2);

  {
    std::ofstream f(dir / "corrupt.gep");
    f << "GEPINST v1 n=2 family=symmetric seed=0\nA\n1,0 zz\n";
  }
  CHECK(invoke({"verify-be", "--instance", (dir / "corrupt.gep").string()}).code == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("baseline-compare and report") {
  const auto dir = scratch_dir("cli_cmp");
  const std::string path = (dir / "eye.gep").string();
  REQUIRE(invoke({"generate", "--family", "symmetric", "--n", "3", "--kappa-b", "1", "--seed",
                  "2", "-o", path})
              .code == 0);
  const Outcome c = invoke({"baseline-compare", "--instance", path, "--epsilon", "0.05"});
  CHECK(c.code == 0);
  const auto rows = parse_csv(c.out);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) CHECK(row.at("agree") == "1");

  const Outcome r = invoke({"report", "--instance", path, "--epsilon", "0.1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("crawford gamma=") != std::string::npos);
  CHECK(r.out.find("norm_sandwich") != std::string::npos);
  CHECK(r.out.find("qpe-product") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config and list parsing") {
  const cli::KeyValueConfig cfg = cli::parse_config("a = 1\n# comment\n b=two  # trailing\n\n");
  CHECK(cfg.get("a") == "1");
  CHECK(cfg.get("b") == "two");
  CHECK_FALSE(cfg.get("c").has_value());
  CHECK_THROWS_AS(cli::parse_config("novalue\n"), Error);
  const auto v = cli::parse_list(" 0.5, -1,2e-1 ");
  REQUIRE(v.size() == 3);
  CHECK(v[2] == 0.2);
  CHECK(cli::parse_list("").empty());
  CHECK_THROWS_AS(cli::parse_list("1,x"), Error);
  CHECK(cli::exit_code_for(Errc::SingularB) == 4);
  CHECK(cli::exit_code_for(Errc::ParseError) == 3);
  CHECK(cli::exit_code_for(Errc::NotUnitary) == 6);
  CHECK(cli::exit_code_for(Errc::TooLarge) == 2);
}
