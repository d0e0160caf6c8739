#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fockort::lp {

/// Dense column-major matrix: few rows, very many columns.
class ColumnMatrix {
 public:
  ColumnMatrix() = default;
  ColumnMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }

  std::span<const double> column(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }
  std::span<double> column(std::size_t c) { return {data_.data() + c * rows_, rows_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// maximize c.q subject to A q = b, q >= 0.
struct StandardFormLp {
  std::vector<double> objective;
  ColumnMatrix rows;
  std::vector<double> rhs;

  std::size_t num_rows() const { return rows.rows(); }
  std::size_t num_cols() const { return rows.cols(); }
  /// Throws std::invalid_argument when dimensions disagree, entries are not
  /// finite, or there are more rows than columns.
  void validate() const;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(Status s);

struct LpSolution {
  Status status = Status::IterationLimit;
  double objective_value = 0.0;
  /// Nonzero primal entries as (column, value), sorted by column.
  std::vector<std::pair<std::size_t, double>> primal;
  /// Basic columns by row. Indices >= num_cols denote artificial columns
  /// left in the basis at zero level on redundant rows.
  std::vector<std::size_t> basis;
  int iterations = 0;
};

struct SolveOptions {
  double feas_tol = 1e-9;
  int max_iter = 1'000'000;
  /// Columns scanned per pricing block; 0 prices every column each pass.
  std::size_t pricing_block = 4096;
  /// Consecutive degenerate pivots before falling back to Bland's rule.
  int bland_after = 50;
  /// Basis inverse is recomputed from scratch after this many updates.
  int refactor_every = 64;
};

/// Two-phase revised simplex (artificial column on every row, dense basis
/// inverse, Dantzig pricing with lexicographic ratio tie-breaking).
LpSolution solve(const StandardFormLp& lp, const SolveOptions& options = {});

struct Residuals {
  double equality = 0.0;     // ||A q - b||_inf
  double most_negative = 0.0;  // min(0, min_j q_j)
};

Residuals residuals(const StandardFormLp& lp, std::span<const std::pair<std::size_t, double>> primal);
Residuals residuals(const StandardFormLp& lp, const LpSolution& sol);

/// Text dump for cross-checking with external solvers:
///   rows=<R> cols=<C>
///   <C objective coefficients>
///   <C row coefficients> <rhs>      (R lines)
/// All numbers printed with 17 significant digits, space separated.
void write_dump(std::ostream& os, const StandardFormLp& lp);
StandardFormLp read_dump(std::istream& is);

}  // namespace fockort::lp
