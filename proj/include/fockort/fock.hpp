#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fockort {

/// Tolerance used when validating caller-supplied populations or amplitudes.
inline constexpr double kConstructionTol = 1e-12;
/// Tolerance used for quantities produced by arithmetic inside the library.
inline constexpr double kArithmeticTol = 1e-10;

/// Raised when a state fails validation (negative population, bad norm, ...).
class InvalidState : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Populations on a fixed Fock window [offset, offset + size) where the end
/// entries may be zero. This is the coordinate system of the phase diagrams:
/// a rank-3 sweep keeps the window fixed even when a corner population
/// vanishes.
class FockWindow {
 public:
  FockWindow(int offset, std::vector<double> populations);

  int offset() const { return offset_; }
  int size() const { return static_cast<int>(populations_.size()); }
  std::span<const double> populations() const { return populations_; }
  /// Population of |offset + k>.
  double operator[](int k) const { return populations_[static_cast<std::size_t>(k)]; }

 private:
  int offset_;
  std::vector<double> populations_;
};

/// A density matrix diagonal in the Fock basis, stored over the trimmed
/// window [offset, offset + rank). Interior zeros are allowed; the first
/// and last populations are strictly positive.
class FockDiagonalState {
 public:
  FockDiagonalState(int offset, std::vector<double> populations);

  /// Drops zero populations at either end of the window and shifts the
  /// offset accordingly.
  static FockDiagonalState trimmed(const FockWindow& window);
  static FockDiagonalState trimmed(int offset, std::vector<double> populations);

  int offset() const { return offset_; }
  int rank() const { return static_cast<int>(populations_.size()); }
  std::span<const double> populations() const { return populations_; }
  /// Population of |offset + k>, k in [0, rank).
  double operator[](int k) const { return populations_[static_cast<std::size_t>(k)]; }
  /// Population of the photon number m; zero outside the window.
  double population_of(int m) const;

  FockWindow window() const { return FockWindow(offset_, populations_); }
  /// The same state viewed on a wider window of `size` entries starting at
  /// `window_offset`. Throws if the window does not cover the support.
  FockWindow window(int window_offset, int size) const;

 private:
  int offset_;
  std::vector<double> populations_;
};

/// sum_k c_k |offset + k>.
class PureFockWindowState {
 public:
  PureFockWindowState(int offset, std::vector<std::complex<double>> amplitudes,
                      double norm_tol = kConstructionTol);

  int offset() const { return offset_; }
  int size() const { return static_cast<int>(amplitudes_.size()); }
  std::span<const std::complex<double>> amplitudes() const { return amplitudes_; }

 private:
  int offset_;
  std::vector<std::complex<double>> amplitudes_;
};

struct MomentTriple {
  double n_bar = 0.0;                 // <a^dag a>
  std::complex<double> alpha_bar;     // <a>
  std::complex<double> xi_bar;        // <a^2>
};

double mean_photon(const FockDiagonalState& state);
double mean_photon(const FockWindow& window);

MomentTriple moments(const PureFockWindowState& psi);

/// Pure-state measure: n_bar - |alpha|^2 + |xi - alpha^2|.
double pure_ort(const PureFockWindowState& psi);

/// sum_k x_{k+1} x_k sqrt(n + k + 1) for a real nonnegative amplitude
/// vector (x_0, ..., x_{M-1}) with unit norm.
double alpha_bar_real(std::span<const double> amplitudes, int offset);

/// Exact value for two neighbouring populations p|n+1><n+1| + (1-p)|n><n|.
double rank2_closed_form(int offset, double p_upper);

/// <a^dag a> - (sum_k sqrt(p_{n+k+1} p_{n+k} (n+k+1)))^2; the value of the
/// decomposition whose atoms all carry amplitudes sqrt(p).
double simple_bound(const FockDiagonalState& state);
double simple_bound(const FockWindow& window);

/// Thermal populations with mean n_th restricted to photon numbers < M and
/// renormalised.
FockDiagonalState truncated_thermal(double n_th, int M);

}  // namespace fockort
