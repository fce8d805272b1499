#include "ira/solver/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ira/error.hpp"

namespace ira::solver {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSingularRcond = 1e-13;
constexpr std::size_t kDenseKernelLimit = 48;

}  // namespace

DualSimplex::DualSimplex(const MilpProblem& problem, SimplexOptions options)
    : problem_(problem), opt_(options), n_(problem.num_cols()), m_(problem.num_rows()) {
  problem_.validate();

  // Column-wise copy of A.
  const auto& a = problem_.constraints;
  col_start_.assign(n_ + 1, 0);
  for (std::size_t r = 0; r < m_; ++r) {
    for (std::size_t c : a.row_columns(r)) ++col_start_[c + 1];
  }
  for (std::size_t c = 0; c < n_; ++c) col_start_[c + 1] += col_start_[c];
  col_row_.resize(a.nonzeros());
  col_val_.resize(a.nonzeros());
  std::vector<std::size_t> fill(col_start_.begin(), col_start_.end() - 1);
  for (std::size_t r = 0; r < m_; ++r) {
    const auto cols = a.row_columns(r);
    const auto vals = a.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t at = fill[cols[k]]++;
      col_row_[at] = r;
      col_val_[at] = vals[k];
    }
  }

  const std::size_t total = n_ + m_;
  cost_.assign(total, 0.0);
  lo_.assign(total, 0.0);
  hi_.assign(total, 0.0);
  artificial_lo_.assign(total, false);
  artificial_hi_.assign(total, false);
  for (std::size_t j = 0; j < n_; ++j) {
    cost_[j] = problem_.objective[j];
    set_column_bounds(j, problem_.lower[j], problem_.upper[j]);
  }
  for (std::size_t i = 0; i < m_; ++i) {
    const RowSense s = problem_.sense.empty() ? RowSense::LessEqual : problem_.sense[i];
    switch (s) {
      case RowSense::LessEqual: lo_[n_ + i] = 0.0; hi_[n_ + i] = kInf; break;
      case RowSense::Equal: lo_[n_ + i] = 0.0; hi_[n_ + i] = 0.0; break;
      case RowSense::GreaterEqual: lo_[n_ + i] = -kInf; hi_[n_ + i] = 0.0; break;
    }
  }

  state_.assign(total, Basis::State::AtLower);
  basic_.assign(m_, 0);
  pos_.assign(total, -1);
  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  row_in_kernel_.assign(m_, -1);
  slack_pos0_.assign(m_, -1);
  work_rows_.assign(m_, 0.0);
  work_pos_.assign(m_, 0.0);
  alpha_.assign(total, 0.0);
  column_.assign(m_, 0.0);
  reset_to_slack_basis();
}

void DualSimplex::set_column_bounds(std::size_t j, double lower, double upper) {
  if (j >= n_) throw ShapeError("DualSimplex::set_column_bounds: column out of range");
  if (lower > upper) throw ParameterError("DualSimplex::set_column_bounds: lower > upper");
  artificial_lo_[j] = !std::isfinite(lower);
  artificial_hi_[j] = !std::isfinite(upper);
  lo_[j] = artificial_lo_[j] ? -opt_.artificial_bound : lower;
  hi_[j] = artificial_hi_[j] ? opt_.artificial_bound : upper;
}

void DualSimplex::reset_to_slack_basis() {
  for (std::size_t j = 0; j < n_; ++j) {
    state_[j] = cost_[j] >= 0.0 ? Basis::State::AtLower : Basis::State::AtUpper;
    pos_[j] = -1;
  }
  for (std::size_t i = 0; i < m_; ++i) {
    state_[n_ + i] = Basis::State::Basic;
    basic_[i] = n_ + i;
    pos_[n_ + i] = static_cast<std::ptrdiff_t>(i);
  }
  etas_.clear();
  kernel_rows_.clear();
  kernel_cols_.clear();
  kernel_col_pos_.clear();
  std::fill(row_in_kernel_.begin(), row_in_kernel_.end(), -1);
  for (std::size_t i = 0; i < m_; ++i) slack_pos0_[i] = static_cast<std::ptrdiff_t>(i);
  factor_valid_ = false;
}

void DualSimplex::warm_start(const Basis& basis) {
  if (basis.state == state_) return;  // current factorization stays valid
  if (basis.state.size() != n_ + m_ ||
      static_cast<std::size_t>(std::count(basis.state.begin(), basis.state.end(), Basis::State::Basic)) != m_) {
    reset_to_slack_basis();
    return;
  }
  std::size_t p = 0;
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    state_[j] = basis.state[j];
    if (state_[j] == Basis::State::Basic) {
      basic_[p] = j;
      pos_[j] = static_cast<std::ptrdiff_t>(p);
      ++p;
    } else {
      pos_[j] = -1;
    }
  }
  // Factorized lazily by solve(), which falls back to the slack basis if singular.
  etas_.clear();
  factor_valid_ = false;
}

bool DualSimplex::refactor() {
  factor_valid_ = false;
  etas_.clear();
  kernel_rows_.clear();
  kernel_cols_.clear();
  std::fill(row_in_kernel_.begin(), row_in_kernel_.end(), -1);
  for (std::size_t i = 0; i < m_; ++i) {
    if (state_[n_ + i] != Basis::State::Basic) {
      row_in_kernel_[i] = static_cast<std::ptrdiff_t>(kernel_rows_.size());
      kernel_rows_.push_back(i);
    }
  }
  for (std::size_t j = 0; j < n_; ++j) {
    if (state_[j] == Basis::State::Basic) kernel_cols_.push_back(j);
  }
  // Positions are frozen here; eta updates later reuse them.
  kernel_col_pos_.resize(kernel_cols_.size());
  for (std::size_t ci = 0; ci < kernel_cols_.size(); ++ci) kernel_col_pos_[ci] = static_cast<std::size_t>(pos_[kernel_cols_[ci]]);
  slack_pos0_.assign(m_, -1);
  for (std::size_t i = 0; i < m_; ++i) {
    if (state_[n_ + i] == Basis::State::Basic) slack_pos0_[i] = pos_[n_ + i];
  }
  const std::size_t k = kernel_rows_.size();
  if (kernel_cols_.size() != k) return false;
  if (k == 0) return factor_valid_ = true;

  use_sparse_ = k > kDenseKernelLimit;
  if (use_sparse_) {
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t ci = 0; ci < k; ++ci) {
      const std::size_t s = kernel_cols_[ci];
      for (std::size_t e = col_start_[s]; e < col_start_[s + 1]; ++e) {
        const std::ptrdiff_t ri = row_in_kernel_[col_row_[e]];
        if (ri >= 0) entries.emplace_back(static_cast<int>(ri), static_cast<int>(ci), col_val_[e]);
      }
    }
    Eigen::SparseMatrix<double> kernel(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    kernel.setFromTriplets(entries.begin(), entries.end());
    kernel.makeCompressed();
    sparse_lu_.analyzePattern(kernel);
    sparse_lu_.factorize(kernel);
    return factor_valid_ = sparse_lu_.info() == Eigen::Success;
  }
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t ci = 0; ci < k; ++ci) {
    const std::size_t s = kernel_cols_[ci];
    for (std::size_t e = col_start_[s]; e < col_start_[s + 1]; ++e) {
      const std::ptrdiff_t ri = row_in_kernel_[col_row_[e]];
      if (ri >= 0) kernel(ri, static_cast<Eigen::Index>(ci)) = col_val_[e];
    }
  }
  lu_.compute(kernel);
  const double rc = lu_.rcond();
  return factor_valid_ = std::isfinite(rc) && rc > kSingularRcond;
}

void DualSimplex::ftran(std::vector<double>& rows_in, std::vector<double>& pos_out) {
  const std::size_t k = kernel_rows_.size();
  if (k > 0) {
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(k));
    for (std::size_t ri = 0; ri < k; ++ri) rhs[static_cast<Eigen::Index>(ri)] = rows_in[kernel_rows_[ri]];
    const Eigen::VectorXd z = use_sparse_ ? Eigen::VectorXd(sparse_lu_.solve(rhs)) : Eigen::VectorXd(lu_.solve(rhs));
    for (std::size_t ci = 0; ci < k; ++ci) {
      const std::size_t s = kernel_cols_[ci];
      const double v = z[static_cast<Eigen::Index>(ci)];
      pos_out[kernel_col_pos_[ci]] = v;
      if (v == 0.0) continue;
      for (std::size_t e = col_start_[s]; e < col_start_[s + 1]; ++e) rows_in[col_row_[e]] -= col_val_[e] * v;
    }
  }
  for (std::size_t i = 0; i < m_; ++i) {
    if (slack_pos0_[i] >= 0) pos_out[static_cast<std::size_t>(slack_pos0_[i])] = rows_in[i];
  }
  for (const Eta& eta : etas_) {
    double t = pos_out[eta.pos];
    if (t == 0.0) continue;
    t /= eta.pivot;
    pos_out[eta.pos] = t;
    for (std::size_t e = 0; e < eta.index.size(); ++e) pos_out[eta.index[e]] -= eta.value[e] * t;
  }
}

void DualSimplex::btran(std::vector<double>& pos_in, std::vector<double>& rows_out) {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = pos_in[it->pos];
    for (std::size_t e = 0; e < it->index.size(); ++e) s -= pos_in[it->index[e]] * it->value[e];
    pos_in[it->pos] = s / it->pivot;
  }
  for (std::size_t i = 0; i < m_; ++i) {
    rows_out[i] = slack_pos0_[i] >= 0 ? pos_in[static_cast<std::size_t>(slack_pos0_[i])] : 0.0;
  }
  const std::size_t k = kernel_rows_.size();
  if (k == 0) return;
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(k));
  for (std::size_t ci = 0; ci < k; ++ci) {
    const std::size_t s = kernel_cols_[ci];
    double v = pos_in[kernel_col_pos_[ci]];
    for (std::size_t e = col_start_[s]; e < col_start_[s + 1]; ++e) {
      if (row_in_kernel_[col_row_[e]] < 0) v -= col_val_[e] * rows_out[col_row_[e]];
    }
    rhs[static_cast<Eigen::Index>(ci)] = v;
  }
  const Eigen::VectorXd u =
      use_sparse_ ? Eigen::VectorXd(sparse_lu_.transpose().solve(rhs)) : Eigen::VectorXd(lu_.transpose().solve(rhs));
  for (std::size_t ri = 0; ri < k; ++ri) rows_out[kernel_rows_[ri]] = u[static_cast<Eigen::Index>(ri)];
}

void DualSimplex::load_column(std::size_t j, std::vector<double>& dense) const {
  std::fill(dense.begin(), dense.end(), 0.0);
  if (is_slack(j)) {
    dense[j - n_] = 1.0;
    return;
  }
  for (std::size_t e = col_start_[j]; e < col_start_[j + 1]; ++e) dense[col_row_[e]] = col_val_[e];
}

double DualSimplex::nonbasic_value(std::size_t j) const {
  if (state_[j] == Basis::State::AtUpper && std::isfinite(hi_[j])) return hi_[j];
  if (std::isfinite(lo_[j])) return lo_[j];
  return hi_[j];
}

void DualSimplex::compute_primal() {
  for (std::size_t i = 0; i < m_; ++i) work_rows_[i] = problem_.rhs[i];
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (state_[j] == Basis::State::Basic) continue;
    const double v = nonbasic_value(j);
    x_[j] = v;
    if (v == 0.0) continue;
    if (is_slack(j)) {
      work_rows_[j - n_] -= v;
    } else {
      for (std::size_t e = col_start_[j]; e < col_start_[j + 1]; ++e) work_rows_[col_row_[e]] -= col_val_[e] * v;
    }
  }
  ftran(work_rows_, work_pos_);
  for (std::size_t p = 0; p < m_; ++p) x_[basic_[p]] = work_pos_[p];
}

void DualSimplex::compute_duals() {
  for (std::size_t p = 0; p < m_; ++p) work_pos_[p] = cost_[basic_[p]];
  btran(work_pos_, work_rows_);
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (state_[j] == Basis::State::Basic) {
      d_[j] = 0.0;
    } else if (is_slack(j)) {
      d_[j] = -work_rows_[j - n_];
    } else {
      double v = cost_[j];
      for (std::size_t e = col_start_[j]; e < col_start_[j + 1]; ++e) v -= col_val_[e] * work_rows_[col_row_[e]];
      d_[j] = v;
    }
  }
}

bool DualSimplex::restore_dual_feasibility() {
  bool flipped = false;
  bool ok = true;
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (state_[j] == Basis::State::Basic || is_fixed(j)) continue;
    if (state_[j] == Basis::State::AtLower && d_[j] < -opt_.dual_tol) {
      if (std::isfinite(hi_[j])) {
        state_[j] = Basis::State::AtUpper;
        flipped = true;
      } else if (d_[j] < -1e3 * opt_.dual_tol) {
        ok = false;
      }
    } else if (state_[j] == Basis::State::AtUpper && d_[j] > opt_.dual_tol) {
      if (std::isfinite(lo_[j])) {
        state_[j] = Basis::State::AtLower;
        flipped = true;
      } else if (d_[j] > 1e3 * opt_.dual_tol) {
        ok = false;
      }
    }
  }
  if (flipped) compute_primal();
  return ok;
}

double DualSimplex::infeasibility(std::size_t p) const {
  const std::size_t j = basic_[p];
  const double v = x_[j];
  if (v < lo_[j] - opt_.primal_tol * (1.0 + std::abs(lo_[j]))) return lo_[j] - v;
  if (v > hi_[j] + opt_.primal_tol * (1.0 + std::abs(hi_[j]))) return v - hi_[j];
  return 0.0;
}

LpResult DualSimplex::solve() {
  std::size_t resets = 0;
  auto fresh_start = [&]() {
    if (!refactor()) {
      reset_to_slack_basis();
      if (!refactor()) throw NumericError("DualSimplex: slack basis could not be factorized");
    }
    compute_primal();
    compute_duals();
    if (!restore_dual_feasibility()) {
      // The installed basis is dual infeasible in a one-sided column; restart from slacks.
      reset_to_slack_basis();
      refactor();
      compute_primal();
      compute_duals();
      restore_dual_feasibility();
    }
  };
  if (factor_valid_) {
    // Basis and factorization carried over from the previous solve; only bounds changed.
    compute_primal();
    compute_duals();
    if (!restore_dual_feasibility()) fresh_start();
  } else {
    fresh_start();
  }

  std::size_t iterations = 0;
  std::size_t degenerate_run = 0;
  bool fresh = true;  // true right after a refactorization with recomputed values
  const std::size_t bland_threshold = 10 * std::max<std::size_t>(m_, 1);

  while (true) {
    if (iterations >= opt_.iteration_limit) return extract(LpStatus::Limit, iterations);
    const bool bland = degenerate_run >= bland_threshold;

    // Leaving row.
    std::ptrdiff_t leave_pos = -1;
    double best = 0.0;
    for (std::size_t p = 0; p < m_; ++p) {
      const double inf = infeasibility(p);
      if (inf <= 0.0) continue;
      if (bland) {
        if (leave_pos < 0 || basic_[p] < basic_[static_cast<std::size_t>(leave_pos)]) leave_pos = static_cast<std::ptrdiff_t>(p);
      } else if (inf > best) {
        best = inf;
        leave_pos = static_cast<std::ptrdiff_t>(p);
      }
    }
    if (leave_pos < 0) {
      if (!fresh) {
        fresh_start();
        fresh = true;
        continue;
      }
      return extract(LpStatus::Optimal, iterations);
    }
    const std::size_t r = static_cast<std::size_t>(leave_pos);
    const std::size_t leave = basic_[r];
    const bool to_lower = x_[leave] < lo_[leave];
    const double sgn = to_lower ? 1.0 : -1.0;
    const double target = to_lower ? lo_[leave] : hi_[leave];

    // Pivot row alpha_j = (e_r^T B^-1) a_j over nonbasic columns.
    std::fill(work_pos_.begin(), work_pos_.end(), 0.0);
    work_pos_[r] = 1.0;
    btran(work_pos_, work_rows_);
    std::fill(alpha_.begin(), alpha_.end(), 0.0);
    const auto& a = problem_.constraints;
    for (std::size_t i = 0; i < m_; ++i) {
      const double rho = work_rows_[i];
      if (std::abs(rho) < 1e-14) continue;
      const auto cols = a.row_columns(i);
      const auto vals = a.row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) alpha_[cols[k]] += rho * vals[k];
      alpha_[n_ + i] = rho;
    }

    // Harris two-pass ratio test on dual slacks.
    double theta_max = kInf;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (state_[j] == Basis::State::Basic || is_fixed(j)) continue;
      const double s = sgn * alpha_[j];
      double slack;
      if (state_[j] == Basis::State::AtLower) {
        if (s >= -opt_.pivot_tol) continue;
        slack = d_[j];
      } else {
        if (s <= opt_.pivot_tol) continue;
        slack = -d_[j];
      }
      theta_max = std::min(theta_max, (std::max(slack, 0.0) + opt_.dual_tol) / std::abs(alpha_[j]));
    }
    std::ptrdiff_t enter = -1;
    double enter_mag = 0.0;
    double enter_ratio = kInf;
    if (std::isfinite(theta_max)) {
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (state_[j] == Basis::State::Basic || is_fixed(j)) continue;
        const double s = sgn * alpha_[j];
        double slack;
        if (state_[j] == Basis::State::AtLower) {
          if (s >= -opt_.pivot_tol) continue;
          slack = d_[j];
        } else {
          if (s <= opt_.pivot_tol) continue;
          slack = -d_[j];
        }
        const double mag = std::abs(alpha_[j]);
        const double ratio = std::max(slack, 0.0) / mag;
        if (ratio > theta_max) continue;
        if (bland) {
          if (ratio < enter_ratio - 1e-12 || (ratio <= enter_ratio + 1e-12 && enter < 0)) {
            enter = static_cast<std::ptrdiff_t>(j);
            enter_ratio = ratio;
          }
        } else if (mag > enter_mag) {
          enter = static_cast<std::ptrdiff_t>(j);
          enter_mag = mag;
          enter_ratio = ratio;
        }
      }
    }
    if (enter < 0) {
      if (!fresh) {
        fresh_start();
        fresh = true;
        continue;
      }
      return extract(LpStatus::Infeasible, iterations);
    }
    const std::size_t q = static_cast<std::size_t>(enter);
    const double theta = enter_ratio;

    // Entering column in position space.
    load_column(q, work_rows_);
    ftran(work_rows_, column_);
    const double piv = column_[r];
    if (std::abs(piv - alpha_[q]) > 1e-7 * (1.0 + std::abs(alpha_[q])) || std::abs(piv) < opt_.pivot_tol) {
      if (fresh) {
        if (++resets > 5) throw NumericError("DualSimplex: unstable pivot persists after refactorization");
        reset_to_slack_basis();
      }
      fresh_start();
      fresh = true;
      continue;
    }

    // Primal update.
    const double delta = (x_[leave] - target) / piv;
    for (std::size_t p = 0; p < m_; ++p) {
      if (column_[p] != 0.0) x_[basic_[p]] -= column_[p] * delta;
    }
    x_[q] += delta;
    x_[leave] = target;

    // Dual update.
    if (theta != 0.0) {
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (state_[j] != Basis::State::Basic && alpha_[j] != 0.0) d_[j] += theta * sgn * alpha_[j];
      }
    }
    d_[q] = 0.0;
    d_[leave] = sgn * theta;

    // Basis update.
    state_[leave] = to_lower ? Basis::State::AtLower : Basis::State::AtUpper;
    pos_[leave] = -1;
    basic_[r] = q;
    pos_[q] = static_cast<std::ptrdiff_t>(r);
    state_[q] = Basis::State::Basic;

    Eta eta{r, piv, {}, {}};
    for (std::size_t p = 0; p < m_; ++p) {
      if (p != r && column_[p] != 0.0) {
        eta.index.push_back(p);
        eta.value.push_back(column_[p]);
      }
    }
    etas_.push_back(std::move(eta));

    ++iterations;
    ++total_iterations_;
    degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;
    fresh = false;

    if (etas_.size() >= opt_.refactor_interval) {
      fresh_start();
      fresh = true;
    }
  }
}

LpResult DualSimplex::extract(LpStatus status, std::size_t iterations) {
  LpResult res;
  res.status = status;
  res.iterations = iterations;
  res.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
  res.objective = 0.0;
  for (std::size_t j = 0; j < n_; ++j) res.objective += cost_[j] * x_[j];

  for (std::size_t p = 0; p < m_; ++p) work_pos_[p] = cost_[basic_[p]];
  btran(work_pos_, work_rows_);
  res.duals = work_rows_;
  res.reduced_costs.assign(d_.begin(), d_.begin() + static_cast<std::ptrdiff_t>(n_));
  res.basis.state = state_;

  if (status == LpStatus::Optimal) {
    for (std::size_t j = 0; j < n_; ++j) {
      const bool at_art_lo = artificial_lo_[j] && x_[j] <= lo_[j] + 1e-6 * opt_.artificial_bound;
      const bool at_art_hi = artificial_hi_[j] && x_[j] >= hi_[j] - 1e-6 * opt_.artificial_bound;
      if (at_art_lo || at_art_hi) {
        res.status = LpStatus::Unbounded;
        break;
      }
    }
  }
  return res;
}

LpResult solve_lp(const MilpProblem& problem, const SimplexOptions& options) {
  DualSimplex simplex(problem, options);
  return simplex.solve();
}

}  // namespace ira::solver
