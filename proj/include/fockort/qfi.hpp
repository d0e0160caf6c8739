#pragma once

#include "fockort/fock.hpp"

namespace fockort {

/// Quadrature Fisher information with the conventional factor of 4 removed,
/// so that a coherent state scores 1/2.
struct QfiReport {
  double fisher = 0.0;
  /// max(fisher - 1/2, 0).
  double power = 0.0;
};

/// For a Fock-diagonal state only neighbouring photon numbers are coupled
/// by a quadrature, giving
///   F = sum_m (p_{m+1} - p_m)^2 / (p_{m+1} + p_m) * (m + 1) / 2
/// independently of the quadrature angle. Pairs with both populations zero
/// are skipped.
QfiReport quadrature_qfi(const FockDiagonalState& state);

}  // namespace fockort
