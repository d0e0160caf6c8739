#pragma once

#include "fockort/fock.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fockort::ansatz {

/// Raised when a pair/triplet formula is evaluated where it is 0/0.
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class PhaseLabel {
  // rank 3
  Triplet,
  UpperPair,
  LowerPair,
  // rank 4
  Quartet,
  Triplet0,
  Triplet1,
  Triplet2,
  Triplet3,
  Pair21,
};

std::string to_string(PhaseLabel label);

struct Candidate {
  PhaseLabel label;
  double value = 0.0;
  bool feasible = false;
};

struct AnsatzResult {
  PhaseLabel label = PhaseLabel::Triplet;
  double value = 0.0;
  /// Decomposition parameters of the winning phase (f, g, f0..f3 as applicable).
  std::map<std::string, double> params;
  /// Every phase that was evaluated, in tie-break order.
  std::vector<Candidate> candidates;
  /// Rank-4 phases are known to be upper bounds only.
  bool upper_bound_only = false;
};

struct PairPhase {
  double value = 0.0;
  double mix = 0.0;  // f (upper pair, triplet_k) or g (lower pair)
  bool feasible = false;
};

struct Pair21Phase {
  double value = 0.0;
  double f = 0.0;
  double g = 0.0;
  bool feasible = false;
};

// Rank 3, window (p_n, p_{n+1}, p_{n+2}).

/// Triplet decomposition: atoms carry amplitudes sqrt(p).
double rank3_triplet(const FockWindow& w);
/// |n> plus atoms pairing n+2 and n+1 in their population ratio.
PairPhase rank3_upper_pair(const FockWindow& w);
/// |n+2> plus atoms pairing n+1 and n in their population ratio.
PairPhase rank3_lower_pair(const FockWindow& w);
AnsatzResult classify_rank3(const FockWindow& w);

/// Feasibility threshold of both pair phases on the p_{n+1} = 0 edge.
double rank3_edge_threshold(int n);

// Rank 4, window (p_n, ..., p_{n+3}).

double rank4_quartet(const FockWindow& w);
/// Fock state |n+k> plus atoms over the other three photon numbers, the mix
/// f_k found by golden-section search.
PairPhase rank4_triplet_k(const FockWindow& w, int k);
/// (n+2, n+1) pair phase.
Pair21Phase rank4_pair21(const FockWindow& w);
AnsatzResult classify_rank4(const FockWindow& w);

/// Solves (n+2) p2 / (p2 + p1) / f = (n+1) / (1 - f) for f.
double upper_pair_stationary_f(int n, double p_upper, double p_middle);

/// Argmax of a unimodal function on [lo, hi] to within `tol` in the argument.
double golden_section_max(const std::function<double(double)>& fn, double lo, double hi, double tol = 1e-11);

// FockDiagonalState overloads; the state's rank must match.
double rank3_triplet(const FockDiagonalState& s);
PairPhase rank3_upper_pair(const FockDiagonalState& s);
PairPhase rank3_lower_pair(const FockDiagonalState& s);
AnsatzResult classify_rank3(const FockDiagonalState& s);
double rank4_quartet(const FockDiagonalState& s);
PairPhase rank4_triplet_k(const FockDiagonalState& s, int k);
Pair21Phase rank4_pair21(const FockDiagonalState& s);
AnsatzResult classify_rank4(const FockDiagonalState& s);

/// Objective (1 - p_{n+k}) / f * |<a>|^2 of the triplet_k atom at mix f.
double triplet_k_objective(const FockWindow& w, int k, double f);
/// Objective (p_{n+2} + p_{n+1}) / f * |<a>|^2 of the pair-phase atom.
double pair21_objective(const FockWindow& w, double f, double g);
/// The optimal g of the pair phase, a function of n, p_{n+2}, p_{n+1} only.
double pair21_g(const FockWindow& w);

}  // namespace fockort::ansatz
