#pragma once

// Minimal free-format MPS reader used only to cross-check the writer. It shares no code
// with the library writer: tokens are split on whitespace and names are kept as strings.

#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ira/solver/linear_program.hpp"

namespace ira::test {

struct ParsedMps {
  std::string name;
  std::vector<std::string> row_names;
  std::vector<std::string> col_names;
  solver::MilpProblem problem;
};

inline ParsedMps read_mps(std::istream& in) {
  ParsedMps out;
  std::string objective_row;
  std::map<std::string, std::size_t> row_index;
  std::map<std::string, std::size_t> col_index;
  std::vector<solver::RowSense> sense;
  std::vector<solver::Triplet> entries;
  std::vector<double> objective, rhs, lower, upper;
  std::vector<bool> integer;
  std::string section;
  bool in_integer = false;
  std::string text;
  const double inf = std::numeric_limits<double>::infinity();

  auto column = [&](const std::string& c) {
    auto it = col_index.find(c);
    if (it != col_index.end()) return it->second;
    const std::size_t j = out.col_names.size();
    col_index[c] = j;
    out.col_names.push_back(c);
    objective.push_back(0.0);
    lower.push_back(0.0);
    upper.push_back(inf);
    integer.push_back(in_integer);
    return j;
  };

  while (std::getline(in, text)) {
    if (text.empty() || text[0] == '*') continue;
    std::istringstream ls(text);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (text[0] != ' ') {
      section = tok[0];
      if (section == "NAME" && tok.size() > 1) out.name = tok[1];
      if (section == "ENDATA") break;
      continue;
    }
    if (section == "ROWS") {
      if (tok[0] == "N") {
        if (objective_row.empty()) objective_row = tok[1];
        continue;
      }
      row_index[tok[1]] = out.row_names.size();
      out.row_names.push_back(tok[1]);
      sense.push_back(tok[0] == "L" ? solver::RowSense::LessEqual
                      : tok[0] == "E" ? solver::RowSense::Equal
                                      : solver::RowSense::GreaterEqual);
    } else if (section == "COLUMNS") {
      if (tok.size() >= 3 && tok[1] == "'MARKER'") {
        in_integer = tok[2] == "'INTORG'";
        continue;
      }
      const std::size_t j = column(tok[0]);
      for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
        const double v = std::stod(tok[k + 1]);
        if (tok[k] == objective_row) {
          objective[j] += v;
        } else {
          entries.push_back({row_index.at(tok[k]), j, v});
        }
      }
    } else if (section == "RHS") {
      if (rhs.empty()) rhs.assign(out.row_names.size(), 0.0);
      for (std::size_t k = 1; k + 1 < tok.size(); k += 2) rhs[row_index.at(tok[k])] = std::stod(tok[k + 1]);
    } else if (section == "BOUNDS") {
      const std::size_t j = col_index.at(tok[2]);
      const std::string& type = tok[0];
      const double v = tok.size() > 3 ? std::stod(tok[3]) : 0.0;
      if (type == "LO") lower[j] = v;
      else if (type == "UP") upper[j] = v;
      else if (type == "FX") lower[j] = upper[j] = v;
      else if (type == "MI") lower[j] = -inf;
      else if (type == "PL") upper[j] = inf;
      else if (type == "BV") { lower[j] = 0.0; upper[j] = 1.0; }
      else throw std::runtime_error("unsupported bound type " + type);
    }
  }
  if (rhs.empty()) rhs.assign(out.row_names.size(), 0.0);
  auto& p = out.problem;
  p.constraints = solver::SparseMatrix::from_triplets(out.row_names.size(), out.col_names.size(), entries);
  p.rhs = rhs;
  p.sense = sense;
  p.objective = objective;
  p.lower = lower;
  p.upper = upper;
  for (std::size_t j = 0; j < integer.size(); ++j) {
    if (integer[j]) p.binary_idx.push_back(j);
  }
  return out;
}

inline ParsedMps read_mps_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_mps(in);
}

}  // namespace ira::test
