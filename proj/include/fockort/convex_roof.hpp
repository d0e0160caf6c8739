#pragma once

#include "fockort/fock.hpp"
#include "fockort/lp.hpp"

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fockort {

/// Raised when a grid would exceed its configured point budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the convex-roof LP does not reach an optimal vertex.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, lp::Status status) : std::runtime_error(what), status_(status) {}
  lp::Status status() const { return status_; }

 private:
  lp::Status status_;
};

inline constexpr std::size_t kDefaultMaxGridPoints = 5'000'000;

/// One amplitude vector (x_0, x_1, ..., x_{M-1}) with x_0 fixed by
/// normalisation and the free coordinates on the lattice l_k * delta.
struct GridPoint {
  std::vector<double> free_amplitudes;  // x_1 .. x_{M-1}
  double x0 = 1.0;

  /// (x_0, x_1, ..., x_{M-1}).
  std::vector<double> amplitudes() const;
  /// (sum_k x_{k+1} x_k sqrt(n+k+1))^2 for a window starting at `offset`.
  double objective_coeff(int offset) const;
};

/// Lattice points (l_1, ..., l_{M-1}) * delta with sum_k (l_k delta)^2 <= 1,
/// stored flat and sorted lexicographically, optionally followed by a few
/// off-lattice anchor points.
class AmplitudeGrid {
 public:
  AmplitudeGrid(int rank, double delta, std::vector<int> lattice);

  int rank() const { return rank_; }
  double delta() const { return delta_; }
  /// Lattice points plus anchors.
  std::size_t size() const { return lattice_size() + anchor_count(); }
  std::size_t lattice_size() const { return lattice_.size() / dims(); }
  std::size_t anchor_count() const { return anchor_sq_.size() / dims(); }
  bool is_lattice(std::size_t i) const { return i < lattice_size(); }

  /// Integer coordinates of lattice point i (i < lattice_size()).
  std::span<const int> lattice_index(std::size_t i) const { return {lattice_.data() + i * dims(), dims()}; }
  /// x_k for k = 1 .. M-1.
  double free_amplitude(std::size_t i, int k) const;
  /// x_k^2, evaluated as l_k^2 delta^2 on the lattice.
  double free_amplitude_sq(std::size_t i, int k) const;
  double x0(std::size_t i) const;
  GridPoint point(std::size_t i) const;
  /// Largest admissible sum of squared lattice indices.
  long long radius_sq() const { return radius_sq_; }
  /// Position of a lattice index, or size() when absent.
  std::size_t find(std::span<const int> lattice) const;

  /// Appends an off-lattice point given by its squared free amplitudes
  /// x_1^2, ..., x_{M-1}^2 (nonnegative, summing to at most 1).
  void add_anchor(std::span<const double> squares);
  /// True when some point has exactly these squared free amplitudes
  /// (lattice points within 1e-12).
  bool contains(std::span<const double> squares) const;

 private:
  std::size_t dims() const { return static_cast<std::size_t>(rank_ - 1); }

  int rank_;
  double delta_;
  long long radius_sq_;
  std::vector<int> lattice_;
  std::vector<double> anchor_sq_;
};

/// floor(1 / delta^2) with a small guard against 1/0.01^2 = 9999.999...
long long lattice_radius_sq(double delta);

AmplitudeGrid build_grid(int M, double delta, std::size_t max_points = kDefaultMaxGridPoints);
/// Number of lattice points build_grid would produce, without materialising them.
std::size_t count_grid_points(int M, double delta);

/// One column per grid point; row 0 is normalisation and row k (k >= 1)
/// carries x_k^2 against p_{n+k}. The k = 0 population row is implied.
lp::StandardFormLp assemble_lp(const FockDiagonalState& state, const AmplitudeGrid& grid);

/// Nonnegative weights over grid points; entries below the support
/// threshold of the solve are dropped.
struct Histogram {
  std::shared_ptr<const AmplitudeGrid> grid;
  std::vector<std::pair<std::size_t, double>> weights;  // (grid index, weight), sorted by index

  std::size_t support_size() const { return weights.size(); }
  double total_weight() const;
  /// sum_j Q_j x_k(j)^2 for k = 0 .. M-1.
  std::vector<double> populations() const;
};

struct EstimateOptions {
  lp::SolveOptions solver;
  /// Adds the simple-decomposition point (sqrt p_{n+1}, ..., sqrt p_{n+M-1})
  /// as an extra column when it is not a lattice point, so the estimate never
  /// exceeds simple_bound.
  bool simple_anchor = true;
  /// Weights at or below this are not part of the histogram support.
  double support_threshold = 1e-12;
  std::size_t max_grid_points = kDefaultMaxGridPoints;
};

struct OrtEstimate {
  double n_upper = 0.0;     // mean photon number minus the LP optimum
  double lp_optimum = 0.0;  // max sum_x Q_x alpha(x)^2
  Histogram histogram;
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// One-sided (never below the true value, up to solver tolerance) estimate
/// of the measure on the lattice of spacing delta. Requires rank >= 2.
/// The histogram's grid is the lattice plus the simple anchor, if one was added.
OrtEstimate estimate_ort(const FockDiagonalState& state, double delta, const EstimateOptions& options = {});
/// Same LP on an explicit grid.
OrtEstimate estimate_ort(const FockDiagonalState& state, std::shared_ptr<const AmplitudeGrid> grid,
                         const EstimateOptions& options = {});

/// Any rank: rank 1 (a Fock state |m>) returns m without solving.
double lp_nonclassicality(const FockDiagonalState& state, double delta, const EstimateOptions& options = {});

struct RefinementLevel {
  double delta = 0.0;
  double n_upper = 0.0;
  std::size_t grid_size = 0;
};

struct RefinementResult {
  std::vector<RefinementLevel> levels;
  OrtEstimate final_estimate;
};

/// Level 1 solves on the full lattice at delta_start. Each further level
/// halves delta and solves on the fine-lattice points within 2 coarse
/// spacings (per coordinate) of the previous support, which includes the
/// previous support itself, so N_upper never increases.
RefinementResult refine(const FockDiagonalState& state, double delta_start, int levels,
                        const EstimateOptions& options = {});

struct DecompositionAtom {
  double probability = 0.0;
  PureFockWindowState state;
};

struct ExplicitDecomposition {
  std::vector<DecompositionAtom> atoms;
  int phase_order = 0;

  double total_probability() const;
  /// sum_j q_j alpha_j^2 (vanishes for a roots-of-unity expansion).
  std::complex<double> weighted_alpha_square() const;
  /// sum_j q_j |alpha_j|^2.
  double weighted_alpha_norm() const;
};

inline int default_phase_order(int M) { return M > 4 ? M : 4; }

/// Expands every support point into P atoms of weight w/P with amplitudes
/// x_k exp(2 pi i j (M-1-k) / P). Requires P >= max(3, M).
ExplicitDecomposition expand_histogram(const FockDiagonalState& state, const Histogram& histogram, int P);

enum class DecompositionClass { SimplyDecomposed, CompositelyDecomposed };

std::string to_string(DecompositionClass c);

inline double default_classification_tol(double delta) { return 1e-6 + 10.0 * delta * delta; }

/// SimplyDecomposed when the LP cannot beat simple_bound by more than tol.
DecompositionClass classify_simple_composite(const FockDiagonalState& state, double delta, double tol,
                                             const EstimateOptions& options = {});
DecompositionClass classify_simple_composite(const FockDiagonalState& state, double delta,
                                             const EstimateOptions& options = {});

/// CSV with header x1,...,x{M-1},weight; 17 significant digits, rows in
/// lattice order.
void write_histogram_csv(std::ostream& os, const Histogram& histogram);
/// JSON array of {probability, amplitudes: [{re, im}, ...]}.
void write_decomposition_json(std::ostream& os, const ExplicitDecomposition& decomposition);

}  // namespace fockort
