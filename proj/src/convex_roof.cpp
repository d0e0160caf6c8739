#include "fockort/convex_roof.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

namespace fockort {
namespace {

std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("grid spacing must lie in (0, 1)");
}

long long isqrt(long long v) {
  if (v <= 0) return 0;
  auto r = static_cast<long long>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

// Depth-first lexicographic enumeration of the free lattice coordinates.
class LatticeEnumerator {
 public:
  LatticeEnumerator(int dims, long long radius_sq, std::size_t max_points)
      : dims_(dims), radius_sq_(radius_sq), max_points_(max_points), current_(static_cast<std::size_t>(dims), 0) {}

  std::vector<int> run() {
    recurse(0, radius_sq_);
    return std::move(out_);
  }

 private:
  void recurse(int depth, long long remaining) {
    const long long top = isqrt(remaining);
    for (long long l = 0; l <= top; ++l) {
      current_[static_cast<std::size_t>(depth)] = static_cast<int>(l);
      if (depth + 1 == dims_) {
        if (++count_ > max_points_) {
          std::ostringstream os;
          os << "grid exceeds the configured maximum of " << max_points_ << " points";
          throw CapacityError(os.str());
        }
        out_.insert(out_.end(), current_.begin(), current_.end());
      } else {
        recurse(depth + 1, remaining - l * l);
      }
    }
  }

  int dims_;
  long long radius_sq_;
  std::size_t max_points_;
  std::size_t count_ = 0;
  std::vector<int> current_;
  std::vector<int> out_;
};

std::size_t count_points(int dims, long long remaining) {
  if (dims == 1) return static_cast<std::size_t>(isqrt(remaining) + 1);
  std::size_t total = 0;
  const long long top = isqrt(remaining);
  for (long long l = 0; l <= top; ++l) total += count_points(dims - 1, remaining - l * l);
  return total;
}

}  // namespace

std::vector<double> GridPoint::amplitudes() const {
  std::vector<double> x;
  x.reserve(free_amplitudes.size() + 1);
  x.push_back(x0);
  x.insert(x.end(), free_amplitudes.begin(), free_amplitudes.end());
  return x;
}

double GridPoint::objective_coeff(int offset) const {
  const auto x = amplitudes();
  const double a = alpha_bar_real(x, offset);
  return a * a;
}

long long lattice_radius_sq(double delta) {
  check_delta(delta);
  return static_cast<long long>(std::floor(1.0 / (delta * delta) + 1e-9));
}

AmplitudeGrid::AmplitudeGrid(int rank, double delta, std::vector<int> lattice)
    : rank_(rank), delta_(delta), radius_sq_(lattice_radius_sq(delta)), lattice_(std::move(lattice)) {
  if (rank_ < 2) throw std::invalid_argument("amplitude grids need rank >= 2");
  if (lattice_.size() % dims() != 0) throw std::invalid_argument("lattice storage is not a multiple of M-1");
  for (std::size_t i = 0; i < lattice_size(); ++i) {
    long long s = 0;
    for (int l : lattice_index(i)) {
      if (l < 0) throw std::invalid_argument("lattice indices must be nonnegative");
      s += static_cast<long long>(l) * l;
    }
    if (s > radius_sq_) throw std::invalid_argument("lattice point lies outside the unit ball");
  }
}

double AmplitudeGrid::free_amplitude(std::size_t i, int k) const {
  const auto kk = static_cast<std::size_t>(k - 1);
  if (is_lattice(i)) return lattice_index(i)[kk] * delta_;
  return std::sqrt(anchor_sq_[(i - lattice_size()) * dims() + kk]);
}

double AmplitudeGrid::free_amplitude_sq(std::size_t i, int k) const {
  const auto kk = static_cast<std::size_t>(k - 1);
  if (!is_lattice(i)) return anchor_sq_[(i - lattice_size()) * dims() + kk];
  const double l = lattice_index(i)[kk];
  return l * l * (delta_ * delta_);
}

double AmplitudeGrid::x0(std::size_t i) const {
  double s = 0.0;
  for (int k = 1; k < rank_; ++k) s += free_amplitude_sq(i, k);
  return std::sqrt(std::max(0.0, 1.0 - s));
}

GridPoint AmplitudeGrid::point(std::size_t i) const {
  GridPoint p;
  p.free_amplitudes.reserve(dims());
  for (int k = 1; k < rank_; ++k) p.free_amplitudes.push_back(free_amplitude(i, k));
  p.x0 = x0(i);
  return p;
}

std::size_t AmplitudeGrid::find(std::span<const int> lattice) const {
  std::size_t lo = 0;
  std::size_t hi = lattice_size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    auto v = lattice_index(mid);
    if (std::lexicographical_compare(v.begin(), v.end(), lattice.begin(), lattice.end()))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < lattice_size() && std::equal(lattice.begin(), lattice.end(), lattice_index(lo).begin())) return lo;
  return size();
}

void AmplitudeGrid::add_anchor(std::span<const double> squares) {
  if (squares.size() != dims()) throw std::invalid_argument("anchor has the wrong number of coordinates");
  double s = 0.0;
  for (double v : squares) {
    if (!(v >= 0.0)) throw std::invalid_argument("anchor coordinates must be nonnegative");
    s += v;
  }
  if (s > 1.0 + kArithmeticTol) throw std::invalid_argument("anchor lies outside the unit ball");
  anchor_sq_.insert(anchor_sq_.end(), squares.begin(), squares.end());
}

bool AmplitudeGrid::contains(std::span<const double> squares) const {
  if (squares.size() != dims()) return false;
  std::vector<int> l(dims());
  bool on_lattice = true;
  for (std::size_t k = 0; k < dims() && on_lattice; ++k) {
    l[k] = static_cast<int>(std::lround(std::sqrt(squares[k]) / delta_));
    on_lattice = std::abs(static_cast<double>(l[k]) * l[k] * (delta_ * delta_) - squares[k]) <= 1e-12;
  }
  if (on_lattice && find(l) < lattice_size()) return true;
  for (std::size_t a = 0; a < anchor_count(); ++a)
    if (std::equal(squares.begin(), squares.end(), anchor_sq_.begin() + static_cast<std::ptrdiff_t>(a * dims())))
      return true;
  return false;
}

AmplitudeGrid build_grid(int M, double delta, std::size_t max_points) {
  if (M < 2) throw std::invalid_argument("build_grid requires M >= 2");
  const long long r2 = lattice_radius_sq(delta);
  return AmplitudeGrid(M, delta, LatticeEnumerator(M - 1, r2, max_points).run());
}

std::size_t count_grid_points(int M, double delta) {
  if (M < 2) throw std::invalid_argument("count_grid_points requires M >= 2");
  return count_points(M - 1, lattice_radius_sq(delta));
}

lp::StandardFormLp assemble_lp(const FockDiagonalState& state, const AmplitudeGrid& grid) {
  const int M = state.rank();
  if (grid.rank() != M) throw std::invalid_argument("grid rank does not match the state rank");
  const std::size_t cols = grid.size();
  lp::StandardFormLp out;
  out.objective.resize(cols);
  out.rows = lp::ColumnMatrix(static_cast<std::size_t>(M), cols);
  out.rhs.assign(static_cast<std::size_t>(M), 0.0);
  out.rhs[0] = 1.0;
  for (int k = 1; k < M; ++k) out.rhs[static_cast<std::size_t>(k)] = state[k];

  std::vector<double> x(static_cast<std::size_t>(M));
  for (std::size_t j = 0; j < cols; ++j) {
    auto col = out.rows.column(j);
    col[0] = 1.0;
    x[0] = grid.x0(j);
    for (int k = 1; k < M; ++k) {
      col[static_cast<std::size_t>(k)] = grid.free_amplitude_sq(j, k);
      x[static_cast<std::size_t>(k)] = grid.free_amplitude(j, k);
    }
    const double a = alpha_bar_real(x, state.offset());
    out.objective[j] = a * a;
  }
  return out;
}

double Histogram::total_weight() const {
  double s = 0.0;
  for (const auto& [i, w] : weights) s += w;
  return s;
}

std::vector<double> Histogram::populations() const {
  const int M = grid->rank();
  std::vector<double> p(static_cast<std::size_t>(M), 0.0);
  for (const auto& [i, w] : weights) {
    double rest = 0.0;
    for (int k = 1; k < M; ++k) {
      const double sq = grid->free_amplitude_sq(i, k);
      p[static_cast<std::size_t>(k)] += w * sq;
      rest += sq;
    }
    p[0] += w * std::max(0.0, 1.0 - rest);
  }
  return p;
}

OrtEstimate estimate_ort(const FockDiagonalState& state, std::shared_ptr<const AmplitudeGrid> grid,
                         const EstimateOptions& options) {
  if (state.rank() < 2) throw std::invalid_argument("estimate_ort requires rank >= 2");
  if (options.simple_anchor) {
    const auto p = state.populations();
    const std::vector<double> squares(p.begin() + 1, p.end());
    if (!grid->contains(squares)) {
      auto augmented = std::make_shared<AmplitudeGrid>(*grid);
      augmented->add_anchor(squares);
      grid = std::move(augmented);
    }
  }
  const lp::StandardFormLp problem = assemble_lp(state, *grid);
  const lp::LpSolution sol = lp::solve(problem, options.solver);
  if (sol.status != lp::Status::Optimal)
    throw SolverError("convex-roof LP finished with status " + lp::to_string(sol.status), sol.status);

  OrtEstimate est;
  est.lp_optimum = sol.objective_value;
  est.n_upper = mean_photon(state) - sol.objective_value;
  est.iterations = sol.iterations;
  est.histogram.grid = grid;
  for (const auto& [j, w] : sol.primal)
    if (w > options.support_threshold) est.histogram.weights.emplace_back(j, w);

  const double floor = 4.0 * grid->delta() * grid->delta();
  for (int k = 0; k < state.rank(); ++k) {
    if (state[k] > 0.0 && state[k] < floor) {
      std::ostringstream os;
      os << "population p_" << state.offset() + k << " = " << state[k] << " is below 4*delta^2 = " << floor
         << "; the lattice cannot resolve its amplitude";
      est.warnings.push_back(os.str());
    }
  }
  return est;
}

OrtEstimate estimate_ort(const FockDiagonalState& state, double delta, const EstimateOptions& options) {
  if (state.rank() < 2) throw std::invalid_argument("estimate_ort requires rank >= 2");
  auto grid = std::make_shared<const AmplitudeGrid>(build_grid(state.rank(), delta, options.max_grid_points));
  return estimate_ort(state, std::move(grid), options);
}

double lp_nonclassicality(const FockDiagonalState& state, double delta, const EstimateOptions& options) {
  if (state.rank() == 1) return static_cast<double>(state.offset());
  return estimate_ort(state, delta, options).n_upper;
}

RefinementResult refine(const FockDiagonalState& state, double delta_start, int levels,
                        const EstimateOptions& options) {
  if (levels < 1) throw std::invalid_argument("refine needs at least one level");
  RefinementResult result;
  result.final_estimate = estimate_ort(state, delta_start, options);
  result.levels.push_back({delta_start, result.final_estimate.n_upper, result.final_estimate.histogram.grid->size()});

  const int dims = state.rank() - 1;
  constexpr int kReach = 4;  // 2 coarse spacings = 4 fine spacings
  for (int level = 1; level < levels; ++level) {
    const AmplitudeGrid& coarse = *result.final_estimate.histogram.grid;
    const double fine_delta = coarse.delta() / 2.0;
    const long long r2 = lattice_radius_sq(fine_delta);

    std::vector<std::vector<int>> points;
    std::vector<int> offset(static_cast<std::size_t>(dims), -kReach);
    for (const auto& [idx, w] : result.final_estimate.histogram.weights) {
      // anchors sit off the lattice; centre on the nearest fine lattice point instead
      std::vector<int> centre(static_cast<std::size_t>(dims));
      int scale = 2;
      if (coarse.is_lattice(idx)) {
        const auto li = coarse.lattice_index(idx);
        centre.assign(li.begin(), li.end());
      } else {
        scale = 1;
        for (int k = 1; k <= dims; ++k)
          centre[static_cast<std::size_t>(k - 1)] = static_cast<int>(std::lround(coarse.free_amplitude(idx, k) / fine_delta));
      }
      std::fill(offset.begin(), offset.end(), -kReach);
      while (true) {
        std::vector<int> cand(static_cast<std::size_t>(dims));
        long long s = 0;
        bool ok = true;
        for (std::size_t d = 0; d < cand.size(); ++d) {
          cand[d] = scale * centre[d] + offset[d];
          if (cand[d] < 0) {
            ok = false;
            break;
          }
          s += static_cast<long long>(cand[d]) * cand[d];
        }
        if (ok && s <= r2) points.push_back(std::move(cand));
        std::size_t d = 0;
        while (d < offset.size() && ++offset[d] > kReach) offset[d++] = -kReach;
        if (d == offset.size()) break;
      }
      if (points.size() > options.max_grid_points) throw CapacityError("refinement grid exceeds the configured maximum");
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    std::vector<int> flat;
    flat.reserve(points.size() * static_cast<std::size_t>(dims));
    for (const auto& p : points) flat.insert(flat.end(), p.begin(), p.end());

    auto grid = std::make_shared<const AmplitudeGrid>(state.rank(), fine_delta, std::move(flat));
    result.final_estimate = estimate_ort(state, grid, options);
    result.levels.push_back({fine_delta, result.final_estimate.n_upper, result.final_estimate.histogram.grid->size()});
  }
  return result;
}

double ExplicitDecomposition::total_probability() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.probability;
  return s;
}

std::complex<double> ExplicitDecomposition::weighted_alpha_square() const {
  std::complex<double> s;
  for (const auto& a : atoms) {
    const auto al = moments(a.state).alpha_bar;
    s += a.probability * al * al;
  }
  return s;
}

double ExplicitDecomposition::weighted_alpha_norm() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.probability * std::norm(moments(a.state).alpha_bar);
  return s;
}

ExplicitDecomposition expand_histogram(const FockDiagonalState& state, const Histogram& histogram, int P) {
  const int M = state.rank();
  if (!histogram.grid || histogram.grid->rank() != M) throw std::invalid_argument("histogram does not match the state rank");
  if (P < std::max(3, M)) throw std::invalid_argument("phase order P must be at least max(3, M)");
  ExplicitDecomposition out;
  out.phase_order = P;
  out.atoms.reserve(histogram.weights.size() * static_cast<std::size_t>(P));
  for (const auto& [idx, w] : histogram.weights) {
    const auto x = histogram.grid->point(idx).amplitudes();
    for (int j = 0; j < P; ++j) {
      std::vector<std::complex<double>> c(static_cast<std::size_t>(M));
      for (int k = 0; k < M; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) * static_cast<double>(M - 1 - k) / P;
        c[static_cast<std::size_t>(k)] = std::polar(x[static_cast<std::size_t>(k)], angle);
      }
      out.atoms.push_back({w / P, PureFockWindowState(state.offset(), std::move(c), kArithmeticTol)});
    }
  }
  return out;
}

std::string to_string(DecompositionClass c) {
  return c == DecompositionClass::SimplyDecomposed ? "SimplyDecomposed" : "CompositelyDecomposed";
}

DecompositionClass classify_simple_composite(const FockDiagonalState& state, double delta, double tol,
                                             const EstimateOptions& options) {
  if (state.rank() < 2) throw std::invalid_argument("classification requires rank >= 2");
  const double gap = simple_bound(state) - estimate_ort(state, delta, options).n_upper;
  return gap <= tol ? DecompositionClass::SimplyDecomposed : DecompositionClass::CompositelyDecomposed;
}

DecompositionClass classify_simple_composite(const FockDiagonalState& state, double delta,
                                             const EstimateOptions& options) {
  return classify_simple_composite(state, delta, default_classification_tol(delta), options);
}

void write_histogram_csv(std::ostream& os, const Histogram& histogram) {
  const int M = histogram.grid->rank();
  for (int k = 1; k < M; ++k) os << 'x' << k << ',';
  os << "weight\n";
  for (const auto& [idx, w] : histogram.weights) {
    for (int k = 1; k < M; ++k) os << format17(histogram.grid->free_amplitude(idx, k)) << ',';
    os << format17(w) << '\n';
  }
}

void write_decomposition_json(std::ostream& os, const ExplicitDecomposition& decomposition) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& atom : decomposition.atoms) {
    nlohmann::ordered_json amps = nlohmann::ordered_json::array();
    for (const auto& c : atom.state.amplitudes()) amps.push_back({{"re", c.real()}, {"im", c.imag()}});
    arr.push_back({{"probability", atom.probability}, {"amplitudes", std::move(amps)}});
  }
  os << arr.dump(2) << '\n';
}

}  // namespace fockort
