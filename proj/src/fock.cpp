#include "fockort/fock.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace fockort {
namespace {

void validate_populations(int offset, std::span<const double> p) {
  if (offset < 0) throw InvalidState("offset must be nonnegative");
  if (p.empty()) throw InvalidState("populations must not be empty");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) {
      std::ostringstream os;
      os << "population " << v << " is not a finite nonnegative number";
      throw InvalidState(os.str());
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kConstructionTol) {
    std::ostringstream os;
    os.precision(17);
    os << "populations sum to " << sum << ", expected 1";
    throw InvalidState(os.str());
  }
}

double weighted_photons(int offset, std::span<const double> p) {
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) acc += static_cast<double>(offset + static_cast<int>(k)) * p[k];
  return acc;
}

double neighbour_overlap(int offset, std::span<const double> p) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k)
    acc += std::sqrt(p[k + 1] * p[k] * static_cast<double>(offset + static_cast<int>(k) + 1));
  return acc;
}

}  // namespace

FockWindow::FockWindow(int offset, std::vector<double> populations)
    : offset_(offset), populations_(std::move(populations)) {
  validate_populations(offset_, populations_);
}

FockDiagonalState::FockDiagonalState(int offset, std::vector<double> populations)
    : offset_(offset), populations_(std::move(populations)) {
  validate_populations(offset_, populations_);
  if (populations_.front() <= 0.0 || populations_.back() <= 0.0)
    throw InvalidState("window is not trimmed: end populations must be positive");
}

FockDiagonalState FockDiagonalState::trimmed(const FockWindow& window) {
  auto p = window.populations();
  std::size_t first = 0;
  std::size_t last = p.size();
  while (first < last && p[first] == 0.0) ++first;
  while (last > first && p[last - 1] == 0.0) --last;
  if (first == last) throw InvalidState("all populations are zero");
  return FockDiagonalState(window.offset() + static_cast<int>(first),
                           std::vector<double>(p.begin() + static_cast<std::ptrdiff_t>(first),
                                               p.begin() + static_cast<std::ptrdiff_t>(last)));
}

FockDiagonalState FockDiagonalState::trimmed(int offset, std::vector<double> populations) {
  return trimmed(FockWindow(offset, std::move(populations)));
}

double FockDiagonalState::population_of(int m) const {
  const int k = m - offset_;
  if (k < 0 || k >= rank()) return 0.0;
  return populations_[static_cast<std::size_t>(k)];
}

FockWindow FockDiagonalState::window(int window_offset, int size) const {
  if (window_offset > offset_ || window_offset + size < offset_ + rank())
    throw InvalidState("window does not cover the state's support");
  std::vector<double> p(static_cast<std::size_t>(size), 0.0);
  for (int k = 0; k < size; ++k) p[static_cast<std::size_t>(k)] = population_of(window_offset + k);
  return FockWindow(window_offset, std::move(p));
}

PureFockWindowState::PureFockWindowState(int offset, std::vector<std::complex<double>> amplitudes,
                                         double norm_tol)
    : offset_(offset), amplitudes_(std::move(amplitudes)) {
  if (offset_ < 0) throw InvalidState("offset must be nonnegative");
  if (amplitudes_.empty()) throw InvalidState("amplitudes must not be empty");
  double norm = 0.0;
  for (const auto& c : amplitudes_) norm += std::norm(c);
  if (std::abs(norm - 1.0) > norm_tol) {
    std::ostringstream os;
    os.precision(17);
    os << "state has squared norm " << norm << ", expected 1";
    throw InvalidState(os.str());
  }
}

double mean_photon(const FockDiagonalState& state) {
  return weighted_photons(state.offset(), state.populations());
}

double mean_photon(const FockWindow& window) {
  return weighted_photons(window.offset(), window.populations());
}

MomentTriple moments(const PureFockWindowState& psi) {
  const auto c = psi.amplitudes();
  const int n = psi.offset();
  MomentTriple m;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double photons = static_cast<double>(n + static_cast<int>(k));
    m.n_bar += photons * std::norm(c[k]);
    if (k + 1 < c.size()) m.alpha_bar += std::conj(c[k]) * c[k + 1] * std::sqrt(photons + 1.0);
    if (k + 2 < c.size())
      m.xi_bar += std::conj(c[k]) * c[k + 2] * std::sqrt((photons + 1.0) * (photons + 2.0));
  }
  return m;
}

double pure_ort(const PureFockWindowState& psi) {
  const MomentTriple m = moments(psi);
  return m.n_bar - std::norm(m.alpha_bar) + std::abs(m.xi_bar - m.alpha_bar * m.alpha_bar);
}

double alpha_bar_real(std::span<const double> amplitudes, int offset) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < amplitudes.size(); ++k)
    acc += amplitudes[k + 1] * amplitudes[k] * std::sqrt(static_cast<double>(offset + static_cast<int>(k) + 1));
  return acc;
}

double rank2_closed_form(int offset, double p_upper) {
  if (!(p_upper >= 0.0 && p_upper <= 1.0)) throw InvalidState("population must lie in [0, 1]");
  const double n = static_cast<double>(offset);
  return n + p_upper - (n + 1.0) * p_upper * (1.0 - p_upper);
}

double simple_bound(const FockDiagonalState& state) {
  const double s = neighbour_overlap(state.offset(), state.populations());
  return mean_photon(state) - s * s;
}

double simple_bound(const FockWindow& window) {
  const double s = neighbour_overlap(window.offset(), window.populations());
  return mean_photon(window) - s * s;
}

FockDiagonalState truncated_thermal(double n_th, int M) {
  if (!(n_th > 0.0) || !std::isfinite(n_th)) throw InvalidState("n_th must be positive");
  if (M < 1) throw InvalidState("truncation M must be at least 1");
  const double ratio = n_th / (1.0 + n_th);
  std::vector<double> p(static_cast<std::size_t>(M));
  double total = 0.0;
  for (int k = 0; k < M; ++k) total += p[static_cast<std::size_t>(k)] = std::pow(ratio, k);
  for (double& v : p) v /= total;
  return FockDiagonalState(0, std::move(p));
}

}  // namespace fockort
