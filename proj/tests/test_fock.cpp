#include "doctest.h"
#include "fockort/fock.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace fockort;

TEST_CASE("window validation") {
  CHECK_NOTHROW(FockWindow(0, {0.5, 0.5}));
  CHECK_NOTHROW(FockWindow(0, {0.0, 1.0, 0.0}));
  CHECK_THROWS_AS(FockWindow(0, {0.6, 0.5}), InvalidState);
  CHECK_THROWS_AS(FockWindow(0, {1.1, -0.1}), InvalidState);
  CHECK_THROWS_AS(FockWindow(-1, {1.0}), InvalidState);
  CHECK_THROWS_AS(FockWindow(0, {}), InvalidState);
  CHECK_THROWS_AS(FockWindow(0, {std::nan(""), 1.0}), InvalidState);
  // normalisation tolerance is 1e-12 at construction
  CHECK_NOTHROW(FockWindow(0, {0.5, 0.5 + 5e-13}));
  CHECK_THROWS_AS(FockWindow(0, {0.5, 0.5 + 5e-12}), InvalidState);
}

TEST_CASE("trimming shifts the offset and keeps interior zeros") {
  const auto s = FockDiagonalState::trimmed(3, {0.0, 0.0, 0.4, 0.0, 0.6, 0.0});
  CHECK(s.offset() == 5);
  CHECK(s.rank() == 3);
  CHECK(s[0] == 0.4);
  CHECK(s[1] == 0.0);
  CHECK(s[2] == 0.6);
  CHECK(s.population_of(7) == 0.6);
  CHECK(s.population_of(4) == 0.0);
  CHECK(s.population_of(8) == 0.0);
  CHECK_THROWS_AS(FockDiagonalState(0, {0.0, 1.0}), InvalidState);
  CHECK_THROWS_AS(FockDiagonalState(0, {1.0, 0.0}), InvalidState);

  const auto w = s.window(4, 5);
  CHECK(w.offset() == 4);
  CHECK(w[0] == 0.0);
  CHECK(w[3] == 0.6);
  CHECK_THROWS(s.window(6, 4));
}

TEST_CASE("mean photon number") {
  CHECK(mean_photon(FockDiagonalState(0, {1.0})) == 0.0);
  CHECK(mean_photon(FockDiagonalState(4, {1.0})) == 4.0);
  CHECK(mean_photon(FockDiagonalState(1, {0.25, 0.75})) == doctest::Approx(1.75).epsilon(1e-15));
}

TEST_CASE("pure-state measure against dense quadrature variances") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 60; ++trial) {
    const int size = 1 + trial % 5;
    const int offset = trial % 4;
    std::vector<std::complex<double>> c(static_cast<std::size_t>(size));
    double norm = 0.0;
    for (auto& v : c) {
      v = {g(rng), g(rng)};
      norm += std::norm(v);
    }
    for (auto& v : c) v /= std::sqrt(norm);
    const PureFockWindowState psi(offset, c);
    const double got = pure_ort(psi);
    CHECK(got == doctest::Approx(oracle::dense_pure_ort(offset, c)).epsilon(1e-10));
    CHECK(got >= -1e-12);
  }
}

TEST_CASE("pure-state measure vanishes only for the vacuum") {
  CHECK(pure_ort(PureFockWindowState(0, {1.0})) == doctest::Approx(0.0));
  for (int m = 1; m < 6; ++m) CHECK(pure_ort(PureFockWindowState(m, {1.0})) == doctest::Approx(m));
  CHECK(pure_ort(PureFockWindowState(0, {std::sqrt(0.9), std::sqrt(0.1)})) > 1e-3);
}

TEST_CASE("moments of a two-level superposition") {
  const PureFockWindowState psi(0, {std::sqrt(0.5), std::sqrt(0.5)});
  const auto m = moments(psi);
  CHECK(m.n_bar == doctest::Approx(0.5));
  CHECK(m.alpha_bar.real() == doctest::Approx(0.5));
  CHECK(std::abs(m.xi_bar) == doctest::Approx(0.0));
  CHECK_THROWS_AS(PureFockWindowState(0, {1.0, 1.0}), InvalidState);
}

TEST_CASE("rank-2 closed form") {
  CHECK(rank2_closed_form(0, 0.16) == doctest::Approx(0.0256).epsilon(1e-14));
  CHECK(rank2_closed_form(0, 0.0) == doctest::Approx(0.0));
  for (int n = 0; n < 4; ++n) {
    CHECK(rank2_closed_form(n, 1.0) == doctest::Approx(n + 1.0));
    // the simple decomposition is exact for rank 2
    for (double p : {0.1, 0.3, 0.5, 0.77}) CHECK(rank2_closed_form(n, p) == doctest::Approx(simple_bound(FockDiagonalState(n, {1 - p, p}))));
    // convex in p
    const int K = 200;
    for (int i = 1; i < K; ++i) {
      const double h = 1.0 / K;
      const double d2 = rank2_closed_form(n, (i - 1) * h) - 2 * rank2_closed_form(n, i * h) + rank2_closed_form(n, (i + 1) * h);
      CHECK(d2 >= -1e-12);
    }
  }
}

TEST_CASE("simple bound") {
  CHECK(simple_bound(FockDiagonalState(0, {0.5, 0.25, 0.25})) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(simple_bound(FockDiagonalState(0, {0.84, 0.16})) == doctest::Approx(0.0256).epsilon(1e-14));
  CHECK(simple_bound(FockDiagonalState(0, {0.25, 0.25, 0.25, 0.25})) == doctest::Approx(1.5 - std::pow(0.25 + std::sqrt(0.125) + std::sqrt(0.1875), 2)));
  // no neighbouring populations: equals the mean photon number
  const FockDiagonalState gap(0, {0.3, 0.0, 0.7});
  CHECK(simple_bound(gap) == doctest::Approx(mean_photon(gap)));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const FockDiagonalState s(t % 3, oracle::random_populations(rng, 2 + t % 5));
    CHECK(simple_bound(s) <= mean_photon(s) + 1e-15);
  }
}

TEST_CASE("truncated thermal states") {
  const auto two = truncated_thermal(0.5, 2);
  CHECK(two.rank() == 2);
  CHECK(two[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(two[1] == doctest::Approx(0.25).epsilon(1e-15));
  const auto one = truncated_thermal(0.5, 1);
  CHECK(one.rank() == 1);
  CHECK(one[0] == 1.0);
  CHECK(mean_photon(truncated_thermal(0.5, 6)) == doctest::Approx(0.491758).epsilon(1e-6));
  for (double nth : {0.01, 0.5, 2.0, 10.0})
    for (int M = 1; M < 12; ++M) {
      const auto s = truncated_thermal(nth, M);
      double sum = 0.0;
      for (int k = 0; k < M; ++k) {
        sum += s[k];
        if (k > 0) CHECK(s[k] < s[k - 1]);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  CHECK_THROWS(truncated_thermal(0.0, 3));
  CHECK_THROWS(truncated_thermal(0.5, 0));
}
