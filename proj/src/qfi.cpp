#include "fockort/qfi.hpp"

#include <algorithm>

namespace fockort {

QfiReport quadrature_qfi(const FockDiagonalState& state) {
  QfiReport r;
  const int lo = std::max(0, state.offset() - 1);
  const int hi = state.offset() + state.rank() - 1;
  for (int m = lo; m <= hi; ++m) {
    const double a = state.population_of(m);
    const double b = state.population_of(m + 1);
    const double sum = a + b;
    if (sum <= 0.0) continue;
    const double diff = b - a;
    r.fisher += diff * diff / sum * (m + 1) / 2.0;
  }
  r.power = std::max(r.fisher - 0.5, 0.0);
  return r;
}

}  // namespace fockort
