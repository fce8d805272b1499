#include "ira/solver/linear_program.hpp"

#include <algorithm>
#include <cmath>

#include "ira/error.hpp"

namespace ira::solver {

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= rows || t.col >= cols) {
      throw ShapeError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                       ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix m(rows, cols);
  m.col_index_.reserve(entries.size());
  m.values_.reserve(entries.size());
  std::size_t i = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    m.row_start_[r] = m.values_.size();
    while (i < entries.size() && entries[i].row == r) {
      const std::size_t c = entries[i].col;
      double v = 0.0;
      while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
        v += entries[i].value;
        ++i;
      }
      if (v != 0.0) {
        m.col_index_.push_back(c);
        m.values_.push_back(v);
      }
    }
  }
  m.row_start_[rows] = m.values_.size();
  return m;
}

double SparseMatrix::coeff(std::size_t r, std::size_t c) const {
  const auto cols = row_columns(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return values_[row_start_[r] + static_cast<std::size_t>(it - cols.begin())];
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw ShapeError("SparseMatrix::multiply: vector length mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) acc += values_[k] * x[col_index_[k]];
    y[r] = acc;
  }
  return y;
}

std::vector<double> SparseMatrix::multiply_transpose(std::span<const double> x) const {
  if (x.size() != rows_) throw ShapeError("SparseMatrix::multiply_transpose: vector length mismatch");
  std::vector<double> y(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (x[r] == 0.0) continue;
    for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) y[col_index_[k]] += values_[k] * x[r];
  }
  return y;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) out.push_back({r, col_index_[k], values_[k]});
  }
  return out;
}

void MilpProblem::validate() const {
  const std::size_t n = num_cols();
  const std::size_t m = num_rows();
  if (objective.size() != n || lower.size() != n || upper.size() != n) {
    throw ShapeError("MilpProblem: objective/bounds length must equal column count " + std::to_string(n));
  }
  if (rhs.size() != m) throw ShapeError("MilpProblem: rhs length must equal row count " + std::to_string(m));
  if (!sense.empty() && sense.size() != m) throw ShapeError("MilpProblem: sense length must equal row count");
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j]) {
      throw ParameterError("MilpProblem: invalid bounds on column " + std::to_string(j));
    }
  }
  for (std::size_t j : binary_idx) {
    if (j >= n) throw ShapeError("MilpProblem: binary index out of range");
    if (lower[j] < 0.0 || upper[j] > 1.0) throw ParameterError("MilpProblem: binary bounds must lie in [0,1]");
  }
}

double MilpProblem::evaluate_objective(std::span<const double> x) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < objective.size(); ++j) acc += objective[j] * x[j];
  return acc;
}

double MilpProblem::max_violation(std::span<const double> x, bool check_integrality) const {
  double worst = 0.0;
  const auto ax = constraints.multiply(x);
  for (std::size_t r = 0; r < ax.size(); ++r) {
    const RowSense s = sense.empty() ? RowSense::LessEqual : sense[r];
    double v = 0.0;
    switch (s) {
      case RowSense::LessEqual: v = ax[r] - rhs[r]; break;
      case RowSense::GreaterEqual: v = rhs[r] - ax[r]; break;
      case RowSense::Equal: v = std::abs(ax[r] - rhs[r]); break;
    }
    worst = std::max(worst, v);
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    worst = std::max({worst, lower[j] - x[j], x[j] - upper[j]});
  }
  if (check_integrality) {
    for (std::size_t j : binary_idx) worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
  }
  return worst;
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Limit: return "limit";
  }
  return "unknown";
}

}  // namespace ira::solver
