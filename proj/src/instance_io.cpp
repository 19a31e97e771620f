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

// Text format:
//
//   GEPINST v1 n=<n> family=<tag> seed=<u64>
//   META rotation=<value>            (optional)
//   A                                 n rows of n "re,im" tokens
//   B                                 n rows
//   TRUTH kappaE=<value>              (optional) then one row of n eigenvalues
//                                     and n rows of eigenvector entries
//   A2 / A1 / A0                      (optional) quadratic source, m rows each
//
// Numbers are printed with 17 significant digits so a round trip is exact.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gepsim/instances.hpp"

namespace gepsim {
namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_complex(cd z) { return fmt_double(z.real()) + "," + fmt_double(z.imag()); }

void write_matrix(std::ostringstream& out, const CMatrix& M) {
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) out << ' ';
      out << fmt_complex(M(i, j));
    }
    out << '\n';
  }
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view tok) {
  double v = 0.0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error(Errc::ParseError, "bad number '" + std::string(tok) + "'");
  }
  return v;
}

cd parse_complex(std::string_view tok) {
  const auto comma = tok.find(',');
  if (comma == std::string_view::npos) return {parse_double(tok), 0.0};
  return {parse_double(tok.substr(0, comma)), parse_double(tok.substr(comma + 1))};
}

// key=value token; returns the value part or throws.
std::string_view kv(std::string_view tok, std::string_view key) {
  if (tok.size() <= key.size() || tok.substr(0, key.size()) != key || tok[key.size()] != '=') {
    throw Error(Errc::ParseError, "expected " + std::string(key) + "=..., got '" +
                                      std::string(tok) + "'");
  }
  return tok.substr(key.size() + 1);
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next non-empty line, or nullopt at end.
  std::optional<std::string_view> next() {
    while (pos_ < text_.size()) {
      const auto end = text_.find('\n', pos_);
      const auto stop = end == std::string_view::npos ? text_.size() : end;
      std::string_view line = text_.substr(pos_, stop - pos_);
      pos_ = stop + 1;
      ++line_no_;
      if (!split_ws(line).empty()) return line;
    }
    return std::nullopt;
  }

  int line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

CMatrix read_rows(LineReader& reader, Index rows, Index cols, const char* name) {
  CMatrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    auto line = reader.next();
    if (!line) throw Error(Errc::SchemaError, std::string(name) + ": missing rows");
    const auto toks = split_ws(*line);
    if (static_cast<Index>(toks.size()) != cols) {
      throw Error(Errc::SchemaError, std::string(name) + ": row " + std::to_string(i) + " has " +
                                         std::to_string(toks.size()) + " entries, expected " +
                                         std::to_string(cols));
    }
    for (Index j = 0; j < cols; ++j) M(i, j) = parse_complex(toks[static_cast<std::size_t>(j)]);
  }
  if (!all_finite(M)) throw Error(Errc::SchemaError, std::string(name) + ": non-finite entry");
  return M;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

}  // namespace

std::string format_instance(const GepInstance& inst) {
  validate_shape(inst);
  std::ostringstream out;
  out << kInstanceMagic << " v" << kInstanceVersion << " n=" << inst.n()
      << " family=" << family_tag(inst.family) << " seed=" << inst.seed << '\n';
  if (inst.rotation) out << "META rotation=" << fmt_double(*inst.rotation) << '\n';
  out << "A\n";
  write_matrix(out, inst.A);
  out << "B\n";
  write_matrix(out, inst.B);
  if (inst.truth) {
    out << "TRUTH kappaE=" << fmt_double(inst.truth->kappaE) << '\n';
    write_matrix(out, inst.truth->values.transpose());
    write_matrix(out, inst.truth->vectors);
  }
  if (inst.quadratic) {
    const Index m = inst.quadratic->a2.rows();
    out << "A2 m=" << m << '\n';
    write_matrix(out, inst.quadratic->a2);
    out << "A1 m=" << m << '\n';
    write_matrix(out, inst.quadratic->a1);
    out << "A0 m=" << m << '\n';
    write_matrix(out, inst.quadratic->a0);
  }
  return out.str();
}

GepInstance parse_instance(std::string_view text) {
  LineReader reader(text);
  auto header = reader.next();
  if (!header) throw Error(Errc::ParseError, "empty instance file");
  const auto h = split_ws(*header);
  if (h.empty() || h[0] != kInstanceMagic) throw Error(Errc::ParseError, "missing GEPINST header");
  if (h.size() != 5) throw Error(Errc::ParseError, "malformed header");
  if (h[1] != "v" + std::to_string(kInstanceVersion)) {
    throw Error(Errc::SchemaVersionMismatch, "unsupported version '" + std::string(h[1]) + "'");
  }

  GepInstance inst;
  const double n_val = parse_double(kv(h[2], "n"));
  if (n_val < 1 || n_val != std::floor(n_val) || n_val > 1e6) {
    throw Error(Errc::SchemaError, "bad dimension");
  }
  const Index n = static_cast<Index>(n_val);
  const auto fam = parse_family(kv(h[3], "family"));
  if (!fam) throw Error(Errc::SchemaError, "unknown family '" + std::string(h[3]) + "'");
  inst.family = *fam;
  {
    const auto s = kv(h[4], "seed");
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), inst.seed);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw Error(Errc::ParseError, "bad seed");
    }
  }

  bool have_a = false;
  bool have_b = false;
  CMatrix a2;
  CMatrix a1;
  CMatrix a0;
  while (auto line = reader.next()) {
    const auto toks = split_ws(*line);
    const std::string_view tag = toks[0];
    if (tag == "A" && toks.size() == 1) {
      inst.A = read_rows(reader, n, n, "A");
      have_a = true;
    } else if (tag == "B" && toks.size() == 1) {
      inst.B = read_rows(reader, n, n, "B");
      have_b = true;
    } else if (tag == "META") {
      for (std::size_t i = 1; i < toks.size(); ++i) {
        inst.rotation = parse_double(kv(toks[i], "rotation"));
      }
    } else if (tag == "TRUTH") {
      if (toks.size() != 2) throw Error(Errc::ParseError, "malformed TRUTH line");
      EigDecomp truth;
      truth.kappaE = parse_double(kv(toks[1], "kappaE"));
      truth.values = read_rows(reader, 1, n, "TRUTH values").row(0).transpose();
      truth.vectors = read_rows(reader, n, n, "TRUTH vectors");
      inst.truth = std::move(truth);
    } else if (tag == "A2" || tag == "A1" || tag == "A0") {
      if (toks.size() != 2) throw Error(Errc::ParseError, "malformed quadratic section");
      const double m_val = parse_double(kv(toks[1], "m"));
      if (m_val < 1 || m_val != std::floor(m_val) || 2 * m_val != static_cast<double>(n)) {
        throw Error(Errc::SchemaError, "quadratic block size must be n/2");
      }
      const Index m = static_cast<Index>(m_val);
      CMatrix blk = read_rows(reader, m, m, std::string(tag).c_str());
      (tag == "A2" ? a2 : tag == "A1" ? a1 : a0) = std::move(blk);
    } else {
      throw Error(Errc::ParseError, "unexpected line " + std::to_string(reader.line_no()) + ": '" +
                                        std::string(*line) + "'");
    }
  }
  if (!have_a || !have_b) throw Error(Errc::SchemaError, "instance needs both A and B");
  if (a2.size() || a1.size() || a0.size()) {
    if (!(a2.size() && a1.size() && a0.size())) {
      throw Error(Errc::SchemaError, "quadratic source needs A2, A1 and A0");
    }
    inst.quadratic = QuadraticCoefficients{a2, a1, a0};
  }
  validate_shape(inst);
  return inst;
}

void save_instance(const GepInstance& inst, const std::filesystem::path& path) {
  write_file(path, format_instance(inst));
}

GepInstance load_instance(const std::filesystem::path& path) {
  return parse_instance(read_file(path));
}

void save_matrix_market(const CMatrix& M, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "%%MatrixMarket matrix array complex general\n";
  out << M.rows() << ' ' << M.cols() << '\n';
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      out << fmt_double(M(i, j).real()) << ' ' << fmt_double(M(i, j).imag()) << '\n';
    }
  }
  write_file(path, out.str());
}

CMatrix load_matrix_market(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  LineReader reader(text);
  auto banner = reader.next();
  if (!banner) throw Error(Errc::ParseError, "empty Matrix Market file");
  const auto b = split_ws(*banner);
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  if (b.size() != 5 || lower(b[0]) != "%%matrixmarket" || lower(b[1]) != "matrix" ||
      lower(b[2]) != "array" || lower(b[4]) != "general") {
    throw Error(Errc::ParseError, "only dense 'matrix array ... general' files are supported");
  }
  const std::string field = lower(b[3]);
  const bool is_complex = field == "complex";
  if (!is_complex && field != "real" && field != "double") {
    throw Error(Errc::ParseError, "unsupported field '" + field + "'");
  }
  auto next_data = [&]() -> std::optional<std::string_view> {
    while (auto line = reader.next()) {
      if (!line->empty() && line->front() == '%') continue;
      return line;
    }
    return std::nullopt;
  };
  auto size_line = next_data();
  if (!size_line) throw Error(Errc::ParseError, "missing size line");
  const auto sz = split_ws(*size_line);
  if (sz.size() != 2) throw Error(Errc::ParseError, "malformed size line");
  const double r = parse_double(sz[0]);
  const double c = parse_double(sz[1]);
  if (r < 1 || c < 1 || r != std::floor(r) || c != std::floor(c)) {
    throw Error(Errc::ParseError, "bad matrix size");
  }
  CMatrix M(static_cast<Index>(r), static_cast<Index>(c));
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      auto line = next_data();
      if (!line) throw Error(Errc::ParseError, "truncated Matrix Market data");
      const auto t = split_ws(*line);
      if (t.size() != (is_complex ? 2u : 1u)) throw Error(Errc::ParseError, "malformed entry");
      M(i, j) = cd(parse_double(t[0]), is_complex ? parse_double(t[1]) : 0.0);
    }
  }
  if (!all_finite(M)) throw Error(Errc::SchemaError, "non-finite entry");
  return M;
}

GepInstance load_matrix_market_pair(const std::filesystem::path& a_path,
                                    const std::filesystem::path& b_path, Family family) {
  GepInstance inst;
  inst.A = load_matrix_market(a_path);
  inst.B = load_matrix_market(b_path);
  inst.family = family;
  validate_shape(inst);
  try {
    inst.truth = gen_eig(inst.A, inst.B);
  } catch (const Error&) {
  }
  return inst;
}

}  // namespace gepsim
