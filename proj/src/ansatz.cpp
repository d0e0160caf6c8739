#include "fockort/ansatz.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace fockort::ansatz {
namespace {

constexpr double kFeasibilityTol = 1e-9;  // golden-section mixes
constexpr double kClosedFormTol = 1e-12;  // closed-form mixes
constexpr double kTieTol = 1e-12;
constexpr double kCornerTol = 1e-15;
// Lower end of the mix searches; the objectives have finite limits at 0.
constexpr double kMixFloor = 1e-12;

void require_size(const FockWindow& w, int M) {
  if (w.size() != M) {
    std::ostringstream os;
    os << "expected a rank-" << M << " window, got " << w.size() << " populations";
    throw std::invalid_argument(os.str());
  }
}

FockWindow as_window(const FockDiagonalState& s, int M) {
  if (s.rank() != M) {
    std::ostringstream os;
    os << "expected a rank-" << M << " state, got rank " << s.rank();
    throw std::invalid_argument(os.str());
  }
  return s.window();
}

double alpha_sq(int offset, const std::vector<double>& amplitudes) {
  const double a = alpha_bar_real(amplitudes, offset);
  return a * a;
}

// Index of a population equal to one, or -1.
int fock_corner(const FockWindow& w) {
  for (int k = 0; k < w.size(); ++k)
    if (w[k] >= 1.0 - kCornerTol) return k;
  return -1;
}

AnsatzResult pick_minimum(std::vector<Candidate> candidates) {
  AnsatzResult r;
  r.candidates = std::move(candidates);
  const Candidate* best = nullptr;
  for (const auto& c : r.candidates) {
    if (!c.feasible) continue;
    if (best == nullptr || c.value < best->value - kTieTol) best = &c;
  }
  // The simple decomposition is always feasible and listed first.
  r.label = best->label;
  r.value = best->value;
  return r;
}

}  // namespace

std::string to_string(PhaseLabel label) {
  switch (label) {
    case PhaseLabel::Triplet: return "Triplet";
    case PhaseLabel::UpperPair: return "UpperPair";
    case PhaseLabel::LowerPair: return "LowerPair";
    case PhaseLabel::Quartet: return "Quartet";
    case PhaseLabel::Triplet0: return "Triplet0";
    case PhaseLabel::Triplet1: return "Triplet1";
    case PhaseLabel::Triplet2: return "Triplet2";
    case PhaseLabel::Triplet3: return "Triplet3";
    case PhaseLabel::Pair21: return "Pair21";
  }
  return "Unknown";
}

double golden_section_max(const std::function<double(double)>& fn, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  // The maximiser may sit on an end of the interval.
  double best = 0.5 * (a + b);
  double best_val = fn(best);
  for (double e : {lo, hi}) {
    const double v = fn(e);
    if (v > best_val) {
      best_val = v;
      best = e;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// rank 3

double rank3_triplet(const FockWindow& w) {
  require_size(w, 3);
  const double n = w.offset();
  const double p0 = w[0], p1 = w[1], p2 = w[2];
  const double s = std::sqrt(p2 * (n + 2.0)) + std::sqrt(p0 * (n + 1.0));
  return 2.0 * p2 + p1 + n - s * s * p1;
}

PairPhase rank3_upper_pair(const FockWindow& w) {
  require_size(w, 3);
  const int n = w.offset();
  const double p1 = w[1], p2 = w[2];
  const double s = p1 + p2;
  if (s <= 0.0) throw DegenerateInput("upper pair needs p_{n+2} + p_{n+1} > 0");
  const double f = (2.0 + n) * p2 / ((1.0 + n) * p1 + (3.0 + 2.0 * n) * p2);
  double weighted;
  if (f > 0.0) {
    const std::vector<double> phi{std::sqrt(1.0 - f), std::sqrt(f * p1 / s), std::sqrt(f * p2 / s)};
    weighted = s / f * alpha_sq(n, phi);
  } else {
    weighted = p1 * (n + 1.0);  // f -> 0 limit
  }
  PairPhase out;
  out.mix = f;
  out.value = 2.0 * p2 + p1 + n - weighted;
  out.feasible = s <= f + kClosedFormTol;
  return out;
}

PairPhase rank3_lower_pair(const FockWindow& w) {
  require_size(w, 3);
  const int n = w.offset();
  const double p0 = w[0], p1 = w[1], p2 = w[2];
  if (p2 >= 1.0) throw DegenerateInput("lower pair needs p_{n+2} < 1");
  const double g = (1.0 + n) * (-1.0 + p1 + p2) / (-3.0 - 2.0 * n + (1.0 + n) * p1 + (3.0 + 2.0 * n) * p2);
  const double rest = 1.0 - p2;
  double weighted;
  if (g > 0.0) {
    const std::vector<double> phi{std::sqrt(g * p0 / rest), std::sqrt(g * p1 / rest), std::sqrt(1.0 - g)};
    weighted = rest / g * alpha_sq(n, phi);
  } else {
    weighted = p1 * (n + 2.0);  // g -> 0 limit
  }
  PairPhase out;
  out.mix = g;
  out.value = 2.0 * p2 + p1 + n - weighted;
  out.feasible = rest <= g + kClosedFormTol;
  return out;
}

double rank3_edge_threshold(int n) { return (2.0 + n) / (3.0 + 2.0 * n); }

AnsatzResult classify_rank3(const FockWindow& w) {
  require_size(w, 3);
  if (const int k = fock_corner(w); k >= 0) {
    AnsatzResult r;
    r.label = PhaseLabel::Triplet;
    r.value = static_cast<double>(w.offset() + k);
    r.candidates.push_back({PhaseLabel::Triplet, r.value, true});
    return r;
  }
  std::vector<Candidate> c;
  c.push_back({PhaseLabel::Triplet, rank3_triplet(w), true});
  std::map<std::string, double> upper_params;
  if (w[1] + w[2] > 0.0) {
    const PairPhase up = rank3_upper_pair(w);
    c.push_back({PhaseLabel::UpperPair, up.value, up.feasible});
    upper_params["f"] = up.mix;
  }
  const PairPhase low = rank3_lower_pair(w);
  c.push_back({PhaseLabel::LowerPair, low.value, low.feasible});

  AnsatzResult r = pick_minimum(std::move(c));
  if (r.label == PhaseLabel::UpperPair) r.params = upper_params;
  if (r.label == PhaseLabel::LowerPair) r.params["g"] = low.mix;
  return r;
}

// ---------------------------------------------------------------------------
// rank 4

double rank4_quartet(const FockWindow& w) {
  require_size(w, 4);
  return simple_bound(w);
}

double triplet_k_objective(const FockWindow& w, int k, double f) {
  require_size(w, 4);
  if (k < 0 || k > 3) throw std::invalid_argument("triplet index must be in 0..3");
  const double rest = 1.0 - w[k];
  std::vector<double> phi(4);
  for (int j = 0; j < 4; ++j)
    phi[static_cast<std::size_t>(j)] = j == k ? std::sqrt(1.0 - f) : std::sqrt(f * w[j] / rest);
  return rest / f * alpha_sq(w.offset(), phi);
}

PairPhase rank4_triplet_k(const FockWindow& w, int k) {
  require_size(w, 4);
  if (k < 0 || k > 3) throw std::invalid_argument("triplet index must be in 0..3");
  if (w[k] >= 1.0) throw DegenerateInput("triplet phase needs p_{n+k} < 1");
  const double floor = 1.0 - w[k];
  auto objective = [&](double f) { return triplet_k_objective(w, k, f); };
  const double f_star = golden_section_max(objective, kMixFloor, 1.0);
#ifndef NDEBUG
  for (int i = 0; i <= 1000; ++i) {
    const double f = kMixFloor + (1.0 - kMixFloor) * i / 1000.0;
    assert(objective(f_star) >= objective(f) - 1e-12 && "triplet objective is not unimodal");
  }
#endif
  PairPhase out;
  out.feasible = f_star >= floor - kFeasibilityTol;
  out.mix = std::max(f_star, floor);
  out.value = mean_photon(w) - objective(out.mix);
  return out;
}

double pair21_g(const FockWindow& w) {
  require_size(w, 4);
  const double n = w.offset();
  const double p1 = w[1], p2 = w[2];
  if (p1 + p2 <= 0.0) throw DegenerateInput("pair phase needs p_{n+2} + p_{n+1} > 0");
  return (3.0 + n) * p2 / ((1.0 + n) * p1 + (3.0 + n) * p2);
}

double pair21_objective(const FockWindow& w, double f, double g) {
  require_size(w, 4);
  const double p1 = w[1], p2 = w[2];
  const double s = p1 + p2;
  const std::vector<double> phi{std::sqrt((1.0 - f) * (1.0 - g)), std::sqrt(f * p1 / s), std::sqrt(f * p2 / s),
                                std::sqrt((1.0 - f) * g)};
  return s / f * alpha_sq(w.offset(), phi);
}

Pair21Phase rank4_pair21(const FockWindow& w) {
  require_size(w, 4);
  const double g = pair21_g(w);
  auto objective = [&](double f) { return pair21_objective(w, f, g); };
  const double f = golden_section_max(objective, kMixFloor, 1.0);
  const double s = w[1] + w[2];
  const double spill = (1.0 - f) / f * s;
  Pair21Phase out;
  out.f = f;
  out.g = g;
  out.value = mean_photon(w) - objective(f);
  out.feasible = s <= f + kFeasibilityTol && spill * g <= w[3] + kFeasibilityTol &&
                 spill * (1.0 - g) <= w[0] + kFeasibilityTol;
  return out;
}

AnsatzResult classify_rank4(const FockWindow& w) {
  require_size(w, 4);
  if (const int k = fock_corner(w); k >= 0) {
    AnsatzResult r;
    r.label = PhaseLabel::Quartet;
    r.value = static_cast<double>(w.offset() + k);
    r.candidates.push_back({PhaseLabel::Quartet, r.value, true});
    r.upper_bound_only = true;
    return r;
  }
  static constexpr PhaseLabel kTriplets[] = {PhaseLabel::Triplet0, PhaseLabel::Triplet1, PhaseLabel::Triplet2,
                                             PhaseLabel::Triplet3};
  std::vector<Candidate> c;
  c.push_back({PhaseLabel::Quartet, rank4_quartet(w), true});
  double mixes[4] = {0, 0, 0, 0};
  for (int k = 0; k < 4; ++k) {
    const PairPhase t = rank4_triplet_k(w, k);
    mixes[k] = t.mix;
    c.push_back({kTriplets[k], t.value, t.feasible});
  }
  Pair21Phase pair;
  if (w[1] + w[2] > 0.0) {
    pair = rank4_pair21(w);
    c.push_back({PhaseLabel::Pair21, pair.value, pair.feasible});
  }
  AnsatzResult r = pick_minimum(std::move(c));
  r.upper_bound_only = true;
  for (int k = 0; k < 4; ++k)
    if (r.label == kTriplets[k]) r.params["f" + std::to_string(k)] = mixes[k];
  if (r.label == PhaseLabel::Pair21) {
    r.params["f"] = pair.f;
    r.params["g"] = pair.g;
  }
  return r;
}

double upper_pair_stationary_f(int n, double p_upper, double p_middle) {
  if (p_upper + p_middle <= 0.0) throw DegenerateInput("p_{n+2} + p_{n+1} must be positive");
  // r / f = (n+1) / (1-f)  =>  f = r / (r + n + 1)
  const double r = (n + 2.0) * p_upper / (p_upper + p_middle);
  return r / (r + n + 1.0);
}

double rank3_triplet(const FockDiagonalState& s) { return rank3_triplet(as_window(s, 3)); }
PairPhase rank3_upper_pair(const FockDiagonalState& s) { return rank3_upper_pair(as_window(s, 3)); }
PairPhase rank3_lower_pair(const FockDiagonalState& s) { return rank3_lower_pair(as_window(s, 3)); }
AnsatzResult classify_rank3(const FockDiagonalState& s) { return classify_rank3(as_window(s, 3)); }
double rank4_quartet(const FockDiagonalState& s) { return rank4_quartet(as_window(s, 4)); }
PairPhase rank4_triplet_k(const FockDiagonalState& s, int k) { return rank4_triplet_k(as_window(s, 4), k); }
Pair21Phase rank4_pair21(const FockDiagonalState& s) { return rank4_pair21(as_window(s, 4)); }
AnsatzResult classify_rank4(const FockDiagonalState& s) { return classify_rank4(as_window(s, 4)); }

}  // namespace fockort::ansatz
