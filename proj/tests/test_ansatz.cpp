#include "doctest.h"
#include "fockort/ansatz.hpp"
#include "fockort/convex_roof.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace fockort;
using namespace fockort::ansatz;

namespace {

// Splitting alpha into the parts with and without the Fock component k gives
//   (1 - p_k)/f * alpha^2 = (1 - p_k) (sqrt(f) A + sqrt(1 - f) B)^2,
// maximised at f = A^2 / (A^2 + B^2).
double analytic_triplet_f(const FockWindow& w, int k) {
  const double rest = 1.0 - w[k];
  double A = 0.0, B = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double c = std::sqrt(w.offset() + j + 1.0);
    if (j == k)
      B += std::sqrt(w[j + 1] / rest) * c;
    else if (j + 1 == k)
      B += std::sqrt(w[j] / rest) * c;
    else
      A += std::sqrt(w[j] * w[j + 1]) / rest * c;
  }
  return A * A / (A * A + B * B);
}

}  // namespace

TEST_CASE("golden-section search against dense sampling") {
  auto check = [](auto fn, double lo, double hi) {
    const double x = golden_section_max(fn, lo, hi);
    const double xs = oracle::sampled_argmax(fn, lo, hi);
    CHECK(fn(x) >= fn(xs) - 1e-12);
  };
  check([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0);
  check([](double x) { return x; }, 0.0, 1.0);
  check([](double x) { return -x; }, 0.0, 1.0);
  check([](double x) { return std::sqrt(x) * 0.2 + std::sqrt(1 - x) * 0.9; }, 0.0, 1.0);
  CHECK(golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0) == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("rank-3 pins") {
  SUBCASE("upper pair at (0.6, 0.2, 0.2)") {
    const FockWindow w(0, {0.6, 0.2, 0.2});
    const auto up = rank3_upper_pair(w);
    CHECK(up.mix == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(up.value == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(up.feasible);
    const auto r = classify_rank3(w);
    CHECK(r.label == PhaseLabel::UpperPair);
    CHECK(r.value == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.params.at("f") == doctest::Approx(0.5));
    CHECK_FALSE(r.upper_bound_only);
  }
  SUBCASE("deep interior is a triplet") {
    const FockWindow w(0, {0.4, 0.4, 0.2});
    CHECK_FALSE(rank3_upper_pair(w).feasible);
    CHECK_FALSE(rank3_lower_pair(w).feasible);
    CHECK(classify_rank3(w).label == PhaseLabel::Triplet);
  }
  SUBCASE("boundary state of the simple region") {
    const FockWindow w(0, {0.5, 0.25, 0.25});
    CHECK(rank3_triplet(w) == doctest::Approx(0.25).epsilon(1e-14));
    const auto r = classify_rank3(w);
    CHECK(r.label == PhaseLabel::Triplet);
    CHECK(r.value == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("lower pair mix") {
    const FockWindow w(0, {0.8, 0.1, 0.1});
    CHECK(rank3_lower_pair(w).mix == doctest::Approx(0.8 / (3 * 0.8 + 2 * 0.1)));
  }
  SUBCASE("Fock corners") {
    for (int n = 0; n < 3; ++n) {
      CHECK(classify_rank3(FockWindow(n, {1, 0, 0})).value == n);
      CHECK(classify_rank3(FockWindow(n, {0, 1, 0})).value == n + 1);
      CHECK(classify_rank3(FockWindow(n, {0, 0, 1})).value == n + 2);
    }
  }
  CHECK_THROWS_AS(rank3_upper_pair(FockWindow(0, {1, 0, 0})), DegenerateInput);
  CHECK_THROWS_AS(rank3_lower_pair(FockWindow(0, {0, 0, 1})), DegenerateInput);
  CHECK_THROWS_AS(classify_rank3(FockWindow(0, {0.5, 0.5})), std::invalid_argument);
}

TEST_CASE("pair feasibility thresholds on the p_{n+1} = 0 edge") {
  for (int n = 0; n < 4; ++n) {
    const double t = rank3_edge_threshold(n);
    CHECK(t == doctest::Approx((2.0 + n) / (3.0 + 2.0 * n)).epsilon(1e-15));
    for (double eps : {-1e-6, 1e-6}) {
      const double p2 = t + eps;
      const FockWindow w(n, {1 - p2, 0.0, p2});
      CHECK(rank3_upper_pair(w).feasible == (eps < 0));
      CHECK(rank3_lower_pair(w).feasible == (eps > 0));
    }
    CHECK(std::abs(rank3_upper_pair(FockWindow(n, {1 - t, 0.0, t})).mix - t) <= 1e-12);
  }
}

TEST_CASE("pair values meet the triplet value on the feasibility boundaries") {
  for (int n = 0; n < 3; ++n) {
    // upper: p1 + p2 = f(p1, p2)  <=>  p2 = (1+n) s^2 / ((2+n)(1-s)) with s = p1 + p2
    for (int i = 1; i <= 30; ++i) {
      const double s = 0.6 * i / 30.0;
      const double p2 = (1.0 + n) * s * s / ((2.0 + n) * (1.0 - s));
      if (p2 > s) continue;
      const FockWindow w(n, {1 - s, s - p2, p2});
      CHECK(std::abs(rank3_upper_pair(w).value - rank3_triplet(w)) <= 1e-10);
    }
    // lower: p0 + p1 = g(p0, p1)  <=>  p0 = (2+n) t^2 / ((1+n)(1-t)) with t = p0 + p1
    for (int i = 1; i <= 30; ++i) {
      const double t = 0.6 * i / 30.0;
      const double p0 = (2.0 + n) * t * t / ((1.0 + n) * (1.0 - t));
      if (p0 > t) continue;
      const FockWindow w(n, {p0, t - p0, 1 - t});
      CHECK(std::abs(rank3_lower_pair(w).value - rank3_triplet(w)) <= 1e-10);
    }
  }
}

TEST_CASE("rank-3 value is continuous along random segments") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int seg = 0; seg < 20; ++seg) {
    const double a2 = u(rng), a1 = u(rng) * (1 - a2);
    const double b2 = u(rng), b1 = u(rng) * (1 - b2);
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = i / 1000.0;
      const double p2 = a2 + t * (b2 - a2), p1 = a1 + t * (b1 - a1);
      const double v = classify_rank3(FockWindow(0, {std::max(0.0, 1 - p1 - p2), p1, p2})).value;
      if (i > 0) CHECK(std::abs(v - prev) <= 1e-2);
      prev = v;
    }
  }
}

TEST_CASE("stationarity condition reproduces the upper-pair mix") {
  CHECK(upper_pair_stationary_f(0, 0.2, 0.2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(upper_pair_stationary_f(0, 1e-14, 0.3) < 1e-12);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.01, 0.49);
  for (int t = 0; t < 100; ++t) {
    const int n = t % 5;
    const double p2 = u(rng), p1 = u(rng);
    const double direct = rank3_upper_pair(FockWindow(n, {1 - p1 - p2, p1, p2})).mix;
    CHECK(std::abs(upper_pair_stationary_f(n, p2, p1) - direct) <= 1e-12);
  }
  const double direct = rank3_upper_pair(FockWindow(1, {0.6, 0.1, 0.3})).mix;
  CHECK(std::abs(upper_pair_stationary_f(1, 0.3, 0.1) - direct) <= 1e-12);
}

TEST_CASE("exception states") {
  SUBCASE("(0.92, 0.06, 0.01, 0.01)") {
    const FockWindow w(0, {0.92, 0.06, 0.01, 0.01});
    const auto t0 = rank4_triplet_k(w, 0);
    CHECK(t0.feasible);
    CHECK(t0.mix == doctest::Approx(0.36).epsilon(1e-9));
    CHECK(std::abs(t0.value - 0.01625) <= 1e-6);
    const auto r = classify_rank4(w);
    CHECK(r.label == PhaseLabel::Triplet0);
    CHECK(std::abs(r.value - 0.01625) <= 1e-6);
    CHECK(r.upper_bound_only);
    CHECK(r.params.count("f0") == 1);
  }
  SUBCASE("(0.83, 0.15, 0.01, 0.01)") {
    const FockWindow w(0, {0.83, 0.15, 0.01, 0.01});
    CHECK_FALSE(rank4_triplet_k(w, 0).feasible);
    const auto r = classify_rank4(w);
    CHECK(r.label == PhaseLabel::Quartet);
    CHECK(std::abs(r.value - 0.0194274) <= 1e-6);
    CHECK(r.upper_bound_only);
  }
}

TEST_CASE("quartet equals the simple bound") {
  const FockWindow w(0, {0.25, 0.25, 0.25, 0.25});
  const double expected = 1.5 - std::pow(std::sqrt(0.0625) + std::sqrt(0.125) + std::sqrt(0.1875), 2);
  CHECK(rank4_quartet(w) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(rank4_quartet(FockWindow(0, {1, 0, 0, 0})) == 0.0);
  CHECK(rank4_quartet(FockWindow(0, {0, 0, 0, 1})) == doctest::Approx(3.0));
}

TEST_CASE("triplet mixes agree with the analytic maximiser and with sampling") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 80; ++t) {
    const FockWindow w(t % 3, oracle::random_populations(rng, 4));
    for (int k = 0; k < 4; ++k) {
      const auto r = rank4_triplet_k(w, k);
      const double f_star = analytic_triplet_f(w, k);
      auto obj = [&](double f) { return triplet_k_objective(w, k, f); };
      const double floor = 1.0 - w[k];
      CHECK(r.feasible == (f_star >= floor - 1e-9));
      if (r.feasible) {
        CHECK(std::abs(r.mix - f_star) <= 1e-7);
        CHECK(r.value == doctest::Approx(mean_photon(w) - triplet_k_objective(w, k, f_star)).epsilon(1e-12));
      }
      const double fs = oracle::sampled_argmax(obj, 1e-12, 1.0);
      CHECK(obj(std::max(f_star, 1e-12)) >= obj(fs) - 1e-12);
    }
  }
}

TEST_CASE("pair phase") {
  SUBCASE("f and g ignore p_{n+3}") {
    const FockWindow a(0, {0.5, 0.2, 0.2, 0.1});
    const FockWindow b(0, {0.55, 0.2, 0.2, 0.05});
    const auto pa = rank4_pair21(a), pb = rank4_pair21(b);
    CHECK(pa.f == doctest::Approx(pb.f).epsilon(1e-10));
    CHECK(pa.g == pb.g);
    CHECK(pa.g == doctest::Approx(3 * 0.2 / (0.2 + 3 * 0.2)));
  }
  SUBCASE("golden mix beats dense sampling") {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 40; ++t) {
      const FockWindow w(t % 3, oracle::random_populations(rng, 4));
      const auto p = rank4_pair21(w);
      auto obj = [&](double f) { return pair21_objective(w, f, p.g); };
      CHECK(obj(p.f) >= obj(oracle::sampled_argmax(obj, 1e-12, 1.0)) - 1e-12);
    }
  }
  SUBCASE("rank-2 limit with p_n = p_{n+3} = 0") {
    for (int n = 0; n < 3; ++n) {
      const FockWindow w(n, {0.0, 0.7, 0.3, 0.0});
      const auto p = rank4_pair21(w);
      // the free optimum spills onto the empty ends, so only f = 1 is realisable
      CHECK(!p.feasible);
      CHECK(mean_photon(w) - pair21_objective(w, 1.0, p.g) == doctest::Approx(rank2_closed_form(n + 1, 0.3)).epsilon(1e-9));
    }
  }
  SUBCASE("pair region beats the outer triplets") {
    // weight on both ends with a light middle
    bool found = false;
    for (double a = 0.4; a < 0.6 && !found; a += 0.05) {
      const FockWindow w(0, {a, 0.05, 0.05, 0.9 - a});
      const auto p = rank4_pair21(w);
      if (!p.feasible) continue;
      CHECK(p.value < rank4_triplet_k(w, 0).value);
      CHECK(p.value < rank4_triplet_k(w, 3).value);
      CHECK(p.value < rank4_quartet(w));
      found = true;
    }
    CHECK(found);
  }
  CHECK_THROWS_AS(rank4_pair21(FockWindow(0, {0.5, 0, 0, 0.5})), DegenerateInput);
}

TEST_CASE("rank-4 vertices") {
  for (int n = 0; n < 2; ++n)
    for (int k = 0; k < 4; ++k) {
      std::vector<double> p(4, 0.0);
      p[static_cast<std::size_t>(k)] = 1.0;
      CHECK(classify_rank4(FockWindow(n, p)).value == n + k);
    }
}

TEST_CASE("rank-4 faces embed the rank-3 diagram") {
  const int K = 20;
  for (int n = 0; n < 2; ++n)
    for (int i = 0; i <= K; ++i)
      for (int j = 0; i + j <= K; ++j) {
        const double a = double(i) / K, b = double(j) / K, c = double(K - i - j) / K;
        // face p_{n+3} = 0
        const auto r3 = classify_rank3(FockWindow(n, {c, b, a}));
        const auto r4 = classify_rank4(FockWindow(n, {c, b, a, 0.0}));
        CHECK(std::abs(r3.value - r4.value) <= 1e-10);
        // face p_n = 0: the rank-3 window starts at n + 1
        const auto u3 = classify_rank3(FockWindow(n + 1, {c, b, a}));
        const auto u4 = classify_rank4(FockWindow(n, {0.0, c, b, a}));
        CHECK(std::abs(u3.value - u4.value) <= 1e-10);
      }
  // the two pair phases continue as triplet phases
  const FockWindow face(0, {0.6, 0.2, 0.2, 0.0});
  CHECK(std::abs(rank4_triplet_k(face, 0).value - rank3_upper_pair(FockWindow(0, {0.6, 0.2, 0.2})).value) <= 1e-10);
  const FockWindow top(0, {0.0, 0.1, 0.1, 0.8});
  CHECK(std::abs(rank4_triplet_k(top, 3).value - rank3_lower_pair(FockWindow(1, {0.1, 0.1, 0.8})).value) <= 1e-10);
}

TEST_CASE("ansatz values are sandwiched by the LP estimate and the simple bound") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 40; ++t) {
    const int M = 3 + t % 2;
    const FockDiagonalState s(t % 3, oracle::random_populations(rng, M));
    const auto r = M == 3 ? classify_rank3(s) : classify_rank4(s);
    CHECK(r.value <= simple_bound(s) + 1e-12);
    CHECK(r.value >= estimate_ort(s, 0.02).n_upper - 5e-3);
  }
}

TEST_CASE("labels") {
  CHECK(to_string(PhaseLabel::UpperPair) == "UpperPair");
  CHECK(to_string(PhaseLabel::Triplet3) == "Triplet3");
  CHECK(to_string(PhaseLabel::Pair21) == "Pair21");
}
