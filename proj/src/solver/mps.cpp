#include "ira/solver/mps.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "ira/error.hpp"

namespace ira::solver {

namespace {

constexpr std::size_t kMaxIndex = 9'999'999;

std::string indexed_name(char prefix, std::size_t i) {
  if (i > kMaxIndex) throw SizeError("write_mps: more than 10^7 rows or columns");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%07zu", prefix, i);
  return buf;
}

std::string row_name(std::size_t i) { return indexed_name('R', i); }
std::string col_name(std::size_t j) { return indexed_name('C', j); }

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

// Columns: field1 2-3, field2 5-12, field3 15-22, field4 25-36, field5 40-47.
std::string line(const std::string& f1, const std::string& f2, const std::string& f3 = {},
                 const std::string& f4 = {}, const std::string& f5 = {}) {
  std::string s = " " + pad(f1, 2) + " " + pad(f2, 8);
  if (!f3.empty() || !f4.empty() || !f5.empty()) s += "  " + pad(f3, 8);
  if (!f4.empty() || !f5.empty()) s += "  " + pad(f4, 12);
  if (!f5.empty()) s += "   " + f5;
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

std::string mps_number(double v) {
  if (!std::isfinite(v)) throw ParameterError("mps_number: non-finite value");
  if (v == 0.0) return "0";
  char buf[64];
  for (int precision = 12; precision >= 1; --precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::string(buf).size() <= 12) return buf;
  }
  throw ParameterError("mps_number: value does not fit the numeric field");
}

void write_mps(const MilpProblem& problem, std::ostream& out, const std::string& name) {
  problem.validate();
  const std::size_t m = problem.num_rows();
  const std::size_t n = problem.num_cols();
  std::vector<bool> binary(n, false);
  for (std::size_t j : problem.binary_idx) binary[j] = true;

  // Column-wise view of the rows.
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(n);
  for (std::size_t i = 0; i < m; ++i) {
    const auto c = problem.constraints.row_columns(i);
    const auto v = problem.constraints.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) cols[c[k]].emplace_back(i, v[k]);
  }

  out << "NAME          " << name << '\n';
  out << "ROWS\n";
  out << line("N", "COST") << '\n';
  for (std::size_t i = 0; i < m; ++i) {
    const RowSense s = problem.sense.empty() ? RowSense::LessEqual : problem.sense[i];
    out << line(s == RowSense::LessEqual ? "L" : s == RowSense::Equal ? "E" : "G", row_name(i)) << '\n';
  }
  out << "COLUMNS\n";
  bool in_integer = false;
  std::size_t marker = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (binary[j] != in_integer) {
      out << line("", indexed_name('M', marker++), "'MARKER'", "", binary[j] ? "'INTORG'" : "'INTEND'") << '\n';
      in_integer = binary[j];
    }
    const std::string cname = col_name(j);
    bool written = false;
    if (problem.objective[j] != 0.0) {
      out << line("", cname, "COST", mps_number(problem.objective[j])) << '\n';
      written = true;
    }
    for (const auto& [row, value] : cols[j]) {
      out << line("", cname, row_name(row), mps_number(value)) << '\n';
      written = true;
    }
    if (!written) out << line("", cname, "COST", "0") << '\n';
  }
  if (in_integer) {
    out << line("", indexed_name('M', marker++), "'MARKER'", "", "'INTEND'") << '\n';
  }
  out << "RHS\n";
  for (std::size_t i = 0; i < m; ++i) {
    if (problem.rhs[i] != 0.0) out << line("", "RHS", row_name(i), mps_number(problem.rhs[i])) << '\n';
  }
  out << "BOUNDS\n";
  for (std::size_t j = 0; j < n; ++j) {
    const std::string cname = col_name(j);
    const double lo = problem.lower[j];
    const double up = problem.upper[j];
    if (lo == up) {
      out << line("FX", "BND", cname, mps_number(lo)) << '\n';
      continue;
    }
    if (std::isfinite(lo)) {
      out << line("LO", "BND", cname, mps_number(lo)) << '\n';
    } else {
      out << line("MI", "BND", cname) << '\n';
    }
    if (std::isfinite(up)) {
      out << line("UP", "BND", cname, mps_number(up)) << '\n';
    } else {
      out << line("PL", "BND", cname) << '\n';
    }
  }
  out << "ENDATA\n";
}

void write_mps(const MilpProblem& problem, const std::filesystem::path& path, const std::string& name) {
  std::ofstream out(path);
  if (!out) throw DataError("write_mps: cannot open " + path.string());
  write_mps(problem, out, name);
  if (!out) throw DataError("write_mps: write failed for " + path.string());
}

}  // namespace ira::solver
