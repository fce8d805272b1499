#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cstddef>
#include <vector>

#include "ira/solver/linear_program.hpp"

namespace ira::solver {

struct SimplexOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  /// Eta updates applied before the kernel is refactorized.
  std::size_t refactor_interval = 64;
  std::size_t iteration_limit = 2'000'000;
  /// Magnitude used to box columns whose bounds are infinite.
  double artificial_bound = 1e7;
};

/// Bounded-variable revised dual simplex.
///
/// Every row gets a slack with unit coefficient (`<=`: s in [0, inf), `=`: s in [0, 0],
/// `>=`: s in (-inf, 0]). With all structural columns boxed the all-slack basis is
/// dual feasible, so no phase 1 is needed. The basis inverse is represented by an LU
/// (dense when small, sparse otherwise) of the structural kernel (rows with nonbasic
/// slack x basic structural columns)
/// plus product-form eta updates between refactorizations.
///
/// Column bounds may be changed between solves; the previous basis is kept and
/// re-optimized with dual pivots, which is how branch-and-bound warm-starts children.
class DualSimplex {
 public:
  explicit DualSimplex(const MilpProblem& problem, SimplexOptions options = {});

  void set_column_bounds(std::size_t j, double lower, double upper);
  double column_lower(std::size_t j) const { return lo_[j]; }
  double column_upper(std::size_t j) const { return hi_[j]; }

  /// Installs a basis (e.g. from a parent node). Falls back to the slack basis when the
  /// basis has the wrong shape or is singular.
  void warm_start(const Basis& basis);
  void reset_to_slack_basis();

  LpResult solve();

  std::size_t total_iterations() const { return total_iterations_; }

 private:
  struct Eta {
    std::size_t pos;
    double pivot;
    std::vector<std::size_t> index;
    std::vector<double> value;
  };

  bool is_slack(std::size_t j) const { return j >= n_; }
  bool is_fixed(std::size_t j) const { return hi_[j] - lo_[j] <= 0.0; }

  bool refactor();
  void ftran(std::vector<double>& rows_in, std::vector<double>& pos_out);
  void btran(std::vector<double>& pos_in, std::vector<double>& rows_out);
  void load_column(std::size_t j, std::vector<double>& dense) const;
  void compute_primal();
  void compute_duals();
  /// Moves boxed nonbasic columns to the bound matching their reduced cost sign.
  /// Returns false if a one-sided column is dual infeasible beyond tolerance.
  bool restore_dual_feasibility();
  double nonbasic_value(std::size_t j) const;
  double infeasibility(std::size_t pos) const;
  LpResult extract(LpStatus status, std::size_t iterations);

  const MilpProblem& problem_;
  SimplexOptions opt_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;

  // Column-wise copy of A for FTRAN and kernel assembly.
  std::vector<std::size_t> col_start_;
  std::vector<std::size_t> col_row_;
  std::vector<double> col_val_;

  std::vector<double> cost_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<bool> artificial_lo_;
  std::vector<bool> artificial_hi_;

  std::vector<Basis::State> state_;
  std::vector<std::size_t> basic_;  // position -> variable
  std::vector<std::ptrdiff_t> pos_;  // variable -> position or -1
  std::vector<double> x_;
  std::vector<double> d_;

  // Kernel factorization.
  std::vector<std::size_t> kernel_rows_;
  std::vector<std::size_t> kernel_cols_;
  std::vector<std::ptrdiff_t> row_in_kernel_;
  std::vector<std::size_t> kernel_col_pos_;
  std::vector<std::ptrdiff_t> slack_pos0_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> sparse_lu_;
  bool use_sparse_ = false;
  bool factor_valid_ = false;
  std::vector<Eta> etas_;

  // Scratch.
  std::vector<double> work_rows_;
  std::vector<double> work_pos_;
  std::vector<double> alpha_;
  std::vector<double> column_;

  std::size_t total_iterations_ = 0;
};

/// Solves the LP relaxation (binary restrictions dropped) from the slack basis.
LpResult solve_lp(const MilpProblem& problem, const SimplexOptions& options = {});

}  // namespace ira::solver
