#include "fockort/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace fockort::lp {

void StandardFormLp::validate() const {
  const std::size_t m = rows.rows();
  const std::size_t n = rows.cols();
  if (objective.size() != n) throw std::invalid_argument("objective length does not match column count");
  if (rhs.size() != m) throw std::invalid_argument("rhs length does not match row count");
  if (m == 0) throw std::invalid_argument("LP has no rows");
  if (m > n) throw std::invalid_argument("LP has more rows than columns");
  for (double v : objective)
    if (!std::isfinite(v)) throw std::invalid_argument("objective entry is not finite");
  for (double v : rhs)
    if (!std::isfinite(v)) throw std::invalid_argument("rhs entry is not finite");
  for (std::size_t j = 0; j < n; ++j)
    for (double v : rows.column(j))
      if (!std::isfinite(v)) throw std::invalid_argument("matrix entry is not finite");
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::IterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kDualTol = 1e-11;
constexpr double kTieTol = 1e-12;
constexpr double kDegenerateStep = 1e-14;

class RevisedSimplex {
 public:
  RevisedSimplex(const StandardFormLp& lp, const SolveOptions& opt)
      : lp_(lp),
        opt_(opt),
        m_(lp.num_rows()),
        n_(lp.num_cols()),
        sign_(m_, 1.0),
        b_(static_cast<Eigen::Index>(m_)),
        basis_(m_),
        is_basic_(n_ + m_, 0),
        binv_(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_))),
        xb_(static_cast<Eigen::Index>(m_)) {
    for (std::size_t i = 0; i < m_; ++i) {
      if (lp.rhs[i] < 0.0) sign_[i] = -1.0;
      b_(idx(i)) = sign_[i] * lp.rhs[i];
      basis_[i] = n_ + i;
      is_basic_[n_ + i] = 1;
    }
    xb_ = b_;
  }

  LpSolution run() {
    LpSolution sol;
    phase_ = 1;
    Status st = iterate();
    if (st == Status::IterationLimit) return finish(st);
    if (artificial_infeasibility() > opt_.feas_tol) return finish(Status::Infeasible);
    drive_out_artificials();
    phase_ = 2;
    degenerate_streak_ = 0;
    price_start_ = 0;
    st = iterate();
    return finish(st);
  }

 private:
  static Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

  double entry(std::size_t i, std::size_t j) const {
    if (j >= n_) return (j - n_ == i) ? 1.0 : 0.0;
    return sign_[i] * lp_.rows(i, j);
  }

  Eigen::VectorXd column(std::size_t j) const {
    Eigen::VectorXd a(idx(m_));
    for (std::size_t i = 0; i < m_; ++i) a(idx(i)) = entry(i, j);
    return a;
  }

  double cost(std::size_t j) const {
    if (phase_ == 1) return j >= n_ ? -1.0 : 0.0;
    return j >= n_ ? 0.0 : lp_.objective[j];
  }

  double artificial_infeasibility() const {
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= n_) s += std::max(0.0, xb_(idx(i)));
    return s;
  }

  // Duals folded with the row signs so that d_j = c_j - sum_i y_i A_ij.
  Eigen::VectorXd signed_duals() const {
    Eigen::VectorXd cb(idx(m_));
    for (std::size_t i = 0; i < m_; ++i) cb(idx(i)) = cost(basis_[i]);
    Eigen::VectorXd y = binv_.transpose() * cb;
    for (std::size_t i = 0; i < m_; ++i) y(idx(i)) *= sign_[i];
    return y;
  }

  double reduced_cost(std::size_t j, const Eigen::VectorXd& y) const {
    auto col = lp_.rows.column(j);
    double d = cost(j);
    for (std::size_t i = 0; i < m_; ++i) d -= y(idx(i)) * col[i];
    return d;
  }

  // Returns n_ when no improving column exists.
  std::size_t price(const Eigen::VectorXd& y) {
    if (bland_mode()) {
      for (std::size_t j = 0; j < n_; ++j)
        if (!is_basic_[j] && reduced_cost(j, y) > kDualTol) return j;
      return n_;
    }
    const std::size_t block = (opt_.pricing_block == 0 || opt_.pricing_block >= n_) ? n_ : opt_.pricing_block;
    const std::size_t num_blocks = (n_ + block - 1) / block;
    std::size_t start_block = price_start_ % num_blocks;
    for (std::size_t scanned = 0; scanned < num_blocks; ++scanned) {
      const std::size_t b = (start_block + scanned) % num_blocks;
      const std::size_t lo = b * block;
      const std::size_t hi = std::min(n_, lo + block);
      std::size_t best = n_;
      double best_d = kDualTol;
      for (std::size_t j = lo; j < hi; ++j) {
        if (is_basic_[j]) continue;
        const double d = reduced_cost(j, y);
        if (d > best_d) {
          best_d = d;
          best = j;
        }
      }
      if (best != n_) {
        price_start_ = b + 1;
        return best;
      }
    }
    return n_;
  }

  bool bland_mode() const { return degenerate_streak_ >= opt_.bland_after; }

  // Lexicographic comparison of (x_B_i, Binv_i.) / u_i.
  bool lex_less(std::size_t a, std::size_t b, const Eigen::VectorXd& u) const {
    const double ua = u(idx(a));
    const double ub = u(idx(b));
    for (std::size_t k = 0; k < m_; ++k) {
      const double va = binv_(idx(a), idx(k)) / ua;
      const double vb = binv_(idx(b), idx(k)) / ub;
      if (va < vb - kTieTol) return true;
      if (va > vb + kTieTol) return false;
    }
    return basis_[a] < basis_[b];
  }

  // Returns m_ when the column has no blocking row.
  std::size_t ratio_test(const Eigen::VectorXd& u) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_; ++i) {
      if (u(idx(i)) <= kPivotTol) continue;
      best = std::min(best, std::max(0.0, xb_(idx(i))) / u(idx(i)));
    }
    if (!std::isfinite(best)) return m_;
    std::size_t leave = m_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (u(idx(i)) <= kPivotTol) continue;
      const double r = std::max(0.0, xb_(idx(i))) / u(idx(i));
      if (r > best + kTieTol) continue;
      if (leave == m_) {
        leave = i;
      } else if (bland_mode()) {
        if (basis_[i] < basis_[leave]) leave = i;
      } else if (lex_less(i, leave, u)) {
        leave = i;
      }
    }
    return leave;
  }

  void pivot(std::size_t r, std::size_t q, const Eigen::VectorXd& u) {
    const double theta = std::max(0.0, xb_(idx(r))) / u(idx(r));
    xb_ -= theta * u;
    xb_(idx(r)) = theta;
    binv_.row(idx(r)) /= u(idx(r));
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || u(idx(i)) == 0.0) continue;
      binv_.row(idx(i)) -= u(idx(i)) * binv_.row(idx(r));
    }
    is_basic_[basis_[r]] = 0;
    is_basic_[q] = 1;
    basis_[r] = q;
    degenerate_streak_ = theta <= kDegenerateStep ? degenerate_streak_ + 1 : 0;
    ++iterations_;
    if (++since_refactor_ >= opt_.refactor_every) refactor();
  }

  void refactor() {
    Eigen::MatrixXd B(idx(m_), idx(m_));
    for (std::size_t i = 0; i < m_; ++i) B.col(idx(i)) = column(basis_[i]);
    binv_ = B.fullPivLu().inverse();
    xb_ = binv_ * b_;
    since_refactor_ = 0;
  }

  Status iterate() {
    while (true) {
      if (iterations_ >= opt_.max_iter) return Status::IterationLimit;
      const Eigen::VectorXd y = signed_duals();
      const std::size_t q = price(y);
      if (q == n_) return Status::Optimal;
      const Eigen::VectorXd u = binv_ * column(q);
      const std::size_t r = ratio_test(u);
      if (r == m_) return Status::Unbounded;
      pivot(r, q, u);
    }
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) continue;
      std::size_t best = n_;
      double best_abs = 1e-9;
      for (std::size_t j = 0; j < n_; ++j) {
        if (is_basic_[j]) continue;
        double v = 0.0;
        auto col = lp_.rows.column(j);
        for (std::size_t i = 0; i < m_; ++i) v += binv_(idx(r), idx(i)) * sign_[i] * col[i];
        if (std::abs(v) > best_abs) {
          best_abs = std::abs(v);
          best = j;
        }
      }
      if (best == n_) continue;  // redundant row: artificial stays basic at zero
      const Eigen::VectorXd u = binv_ * column(best);
      // Degenerate pivot; the leaving artificial sits at (numerically) zero.
      const double theta = xb_(idx(r)) / u(idx(r));
      xb_ -= theta * u;
      xb_(idx(r)) = theta;
      binv_.row(idx(r)) /= u(idx(r));
      for (std::size_t i = 0; i < m_; ++i)
        if (i != r && u(idx(i)) != 0.0) binv_.row(idx(i)) -= u(idx(i)) * binv_.row(idx(r));
      is_basic_[basis_[r]] = 0;
      is_basic_[best] = 1;
      basis_[r] = best;
      ++iterations_;
    }
    refactor();
  }

  LpSolution finish(Status st) {
    refactor();
    LpSolution sol;
    sol.status = st;
    sol.iterations = iterations_;
    sol.basis = basis_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) continue;
      const double v = xb_(idx(i));
      if (v != 0.0) sol.primal.emplace_back(basis_[i], v);
    }
    std::sort(sol.primal.begin(), sol.primal.end());
    for (const auto& [j, v] : sol.primal) sol.objective_value += lp_.objective[j] * v;
    return sol;
  }

  const StandardFormLp& lp_;
  SolveOptions opt_;
  std::size_t m_;
  std::size_t n_;
  std::vector<double> sign_;
  Eigen::VectorXd b_;
  std::vector<std::size_t> basis_;
  std::vector<char> is_basic_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  int phase_ = 1;
  int iterations_ = 0;
  int since_refactor_ = 0;
  int degenerate_streak_ = 0;
  std::size_t price_start_ = 0;
};

std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

LpSolution solve(const StandardFormLp& lp, const SolveOptions& options) {
  lp.validate();
  if (!(options.feas_tol > 0.0)) throw std::invalid_argument("feas_tol must be positive");
  if (options.max_iter <= 0) throw std::invalid_argument("max_iter must be positive");
  return RevisedSimplex(lp, options).run();
}

Residuals residuals(const StandardFormLp& lp, std::span<const std::pair<std::size_t, double>> primal) {
  std::vector<double> r(lp.rhs.begin(), lp.rhs.end());
  Residuals out;
  for (const auto& [j, v] : primal) {
    auto col = lp.rows.column(j);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= col[i] * v;
    out.most_negative = std::min(out.most_negative, v);
  }
  for (double v : r) out.equality = std::max(out.equality, std::abs(v));
  return out;
}

Residuals residuals(const StandardFormLp& lp, const LpSolution& sol) { return residuals(lp, sol.primal); }

void write_dump(std::ostream& os, const StandardFormLp& lp) {
  const std::size_t m = lp.num_rows();
  const std::size_t n = lp.num_cols();
  os << "rows=" << m << " cols=" << n << '\n';
  for (std::size_t j = 0; j < n; ++j) os << (j ? " " : "") << format17(lp.objective[j]);
  os << '\n';
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) os << (j ? " " : "") << format17(lp.rows(i, j));
    os << ' ' << format17(lp.rhs[i]) << '\n';
  }
}

StandardFormLp read_dump(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("LP dump is empty");
  std::size_t m = 0;
  std::size_t n = 0;
  if (std::sscanf(header.c_str(), "rows=%zu cols=%zu", &m, &n) != 2)
    throw std::runtime_error("malformed LP dump header: " + header);
  StandardFormLp lp;
  lp.objective.resize(n);
  lp.rows = ColumnMatrix(m, n);
  lp.rhs.resize(m);
  auto read = [&is]() {
    double v = 0.0;
    if (!(is >> v)) throw std::runtime_error("LP dump is truncated");
    return v;
  };
  for (std::size_t j = 0; j < n; ++j) lp.objective[j] = read();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) lp.rows(i, j) = read();
    lp.rhs[i] = read();
  }
  return lp;
}

}  // namespace fockort::lp
