#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ira::solver {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix. Entries within a row are sorted by column.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_start_(rows + 1, 0) {}

  /// Duplicate (row, col) pairs are summed; explicit zeros are dropped.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const std::size_t> row_columns(std::size_t r) const {
    return {col_index_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
  }

  /// Entry lookup by binary search; zero when absent.
  double coeff(std::size_t r, std::size_t c) const;

  /// y = A x
  std::vector<double> multiply(std::span<const double> x) const;
  /// y = A^T x
  std::vector<double> multiply_transpose(std::span<const double> x) const;

  std::vector<Triplet> triplets() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_start_{0};
  std::vector<std::size_t> col_index_;
  std::vector<double> values_;
};

enum class RowSense : std::uint8_t { LessEqual, Equal, GreaterEqual };

/// min f^T x  s.t.  A x (<=|=|>=) b,  lower <= x <= upper,  x_j in {0,1} for j in binary_idx.
///
/// Rows default to `<=`, matching the standard form min f^T X, A X <= b.
struct MilpProblem {
  std::vector<double> objective;
  SparseMatrix constraints;
  std::vector<double> rhs;
  std::vector<RowSense> sense;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::size_t> binary_idx;
  /// Horizon length for problems laid out per time step; 0 for generic problems.
  std::size_t horizon = 0;

  std::size_t num_rows() const { return constraints.rows(); }
  std::size_t num_cols() const { return constraints.cols(); }

  /// Throws ShapeError on inconsistent dimensions and ParameterError on lower > upper
  /// or binaries whose bounds are not a subset of [0, 1].
  void validate() const;

  double evaluate_objective(std::span<const double> x) const;

  /// Largest violation over rows, bounds and (optionally) integrality of binaries.
  double max_violation(std::span<const double> x, bool check_integrality) const;
};

enum class LpStatus : std::uint8_t { Optimal, Infeasible, Unbounded, Limit };

std::string to_string(LpStatus status);

/// Simplex basis: per-variable status over structural columns followed by one slack per row.
struct Basis {
  enum class State : std::uint8_t { Basic, AtLower, AtUpper };
  std::vector<State> state;
  bool empty() const { return state.empty(); }
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
  /// Row duals y with reduced costs f - A^T y; sign follows d(objective)/d(rhs).
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  Basis basis;
};

}  // namespace ira::solver
