#include <gtest/gtest.h>

#include <random>

#include "idm/exact_concave.hpp"
#include "idm/oracle.hpp"
#include "test_support.hpp"

namespace idm {
namespace {

double entropy_at_t1(const Counts& c, const IdmConfig& cfg, double t1) {
  return expected_entropy(u_from_t(c, cfg, TVector({t1, 1.0 - t1})));
}

TEST(MinVertex, Examples) {
  auto a = exact_min_vertex(Counts{3, 6}, IdmConfig(1.0));
  EXPECT_EQ(a.index, 1u);
  EXPECT_DOUBLE_EQ(a.u[0], 0.3);
  EXPECT_DOUBLE_EQ(a.u[1], 0.7);

  auto b = exact_min_vertex(Counts{5, 5}, IdmConfig(1.0));
  EXPECT_EQ(b.index, 0u);
  EXPECT_DOUBLE_EQ(b.u[0], 6.0 / 11.0);
  EXPECT_DOUBLE_EQ(b.u[1], 5.0 / 11.0);

  auto c = exact_min_vertex(Counts{0, 0, 7}, IdmConfig(2.0));
  EXPECT_EQ(c.index, 2u);
  EXPECT_DOUBLE_EQ(c.u[0], 0.0);
  EXPECT_DOUBLE_EQ(c.u[2], 1.0);
}

TEST(MaxPoint, WorkedExample) {
  const auto w = exact_max_point(Counts{3, 6}, IdmConfig(1.0));
  EXPECT_DOUBLE_EQ(w.u_tilde, 0.4);
  EXPECT_EQ(w.m_star, 1u);
  EXPECT_DOUBLE_EQ(w.u_max[0], 0.4);
  EXPECT_DOUBLE_EQ(w.u_max[1], 0.6);
  EXPECT_EQ(w.t_min[1], 1.0);
  const auto levels = water_levels(Counts{3, 6}, IdmConfig(1.0));
  EXPECT_DOUBLE_EQ(levels[0], 0.4);
  EXPECT_DOUBLE_EQ(levels[1], 0.5);
}

TEST(MaxPoint, NoDataGivesCenter) {
  const auto w = exact_max_point(Counts{0, 0}, IdmConfig(1.0));
  EXPECT_DOUBLE_EQ(w.u_tilde, 0.5);
  EXPECT_EQ(w.m_star, 2u);
  EXPECT_DOUBLE_EQ(w.u_max[0], 0.5);
  EXPECT_DOUBLE_EQ(w.u_max[1], 0.5);
}

TEST(MaxPoint, SymmetricCounts) {
  const auto levels = water_levels(Counts{1, 1, 1}, IdmConfig(1.0));
  EXPECT_DOUBLE_EQ(levels[0], 0.5);
  EXPECT_DOUBLE_EQ(levels[1], 3.0 / 8.0);
  EXPECT_DOUBLE_EQ(levels[2], 1.0 / 3.0);
  const auto w = exact_max_point(Counts{1, 1, 1}, IdmConfig(1.0));
  EXPECT_EQ(w.m_star, 3u);
  for (double x : w.u_max.values) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
}

TEST(ExactInterval, Entropy) {
  const Interval iv = entropy_interval_exact(Counts{3, 6}, IdmConfig(1.0));
  EXPECT_EQ(iv.kind, IntervalKind::exact);
  EXPECT_NEAR(iv.lower, 2761.0 / 8400 + 847.0 / 3600, 1e-12);
  EXPECT_NEAR(iv.upper, 2131.0 / 6300 + 1207.0 / 4200, 1e-12);
}

TEST(ExactInterval, NegativeSquareAgainstScan) {
  auto f = SeparableConcave::certified([](double x) { return -x * x; }, [](double x) { return -2 * x; });
  const Counts c{3, 6};
  const IdmConfig cfg(1.0);
  const Interval iv = exact_interval(f, c, cfg);
  const auto [lo, hi] = testing::scan_two_category(
      [&](double t1) {
        const double a = (3 + t1) / 10, b = (6 + 1 - t1) / 10;
        return -(a * a + b * b);
      },
      10000);
  EXPECT_NEAR(iv.lower, lo, 1e-12);
  EXPECT_NEAR(iv.upper, hi, 1e-12);
  EXPECT_NEAR(iv.lower, -0.58, 1e-12);
  EXPECT_NEAR(iv.upper, -0.52, 1e-12);
}

TEST(ExactInterval, ConvexByNegation) {
  const Interval iv = exact_interval_convex([](double x) { return x * x; }, [](double x) { return 2 * x; },
                                            Counts{3, 6}, IdmConfig(1.0));
  EXPECT_NEAR(iv.lower, 0.52, 1e-12);
  EXPECT_NEAR(iv.upper, 0.58, 1e-12);
}

TEST(ExactInterval, SingleCategory) {
  auto f = SeparableConcave::certified([](double x) { return std::sqrt(x) + 2; },
                                       [](double x) { return 0.5 / std::sqrt(x); });
  const Interval iv = exact_interval(f, Counts{4}, IdmConfig(1.5));
  EXPECT_DOUBLE_EQ(iv.lower, 3.0);
  EXPECT_DOUBLE_EQ(iv.upper, 3.0);
}

TEST(ExactInterval, RefusesUncertified) {
  SeparableConcave f{[](double x) { return x; }, [](double) { return 1.0; }, false};
  EXPECT_THROW(exact_interval(f, Counts{1, 2}, IdmConfig(1.0)), Error);
  EXPECT_THROW(SeparableConcave::certified([](double x) { return x * x; }, [](double x) { return 2 * x; }), Error);
}

TEST(EntropyInterval, NoData) {
  for (std::size_t d : {2u, 3u, 5u}) {
    const Interval iv = entropy_interval_exact(Counts::zeros(d), IdmConfig(2.0));
    EXPECT_EQ(iv.lower, 0.0);
    EXPECT_NEAR(iv.upper, static_cast<double>(d) * h(1.0 / static_cast<double>(d), EntropyContext(2.0)), 1e-14);
  }
}

TEST(EntropyInterval, FiftyFiftyAgainstHarmonicForms) {
  const Interval iv = entropy_interval_exact(Counts{50, 50}, IdmConfig(1.0));
  // lower at u = (51/101, 50/101), both N u integral
  const double lower = testing::harmonic_h(101, 51) + testing::harmonic_h(101, 50);
  // upper at u = (1/2, 1/2): N u + 1 = 51.5, half-integer closed form of psi
  long double psi_top = 0.0L, psi_mid = 0.0L;
  for (int k = 1; k <= 101; ++k) psi_top += 1.0L / k;  // psi(102) + gamma
  for (int k = 1; k <= 51; ++k) psi_mid += 2.0L / (2 * k - 1);
  psi_mid -= 2.0L * std::log(2.0L);  // psi(51.5) + gamma
  const double upper = static_cast<double>(psi_top - psi_mid);  // 2 * (1/2) * (...)
  EXPECT_NEAR(iv.lower, lower, 1e-12);
  EXPECT_NEAR(iv.upper, upper, 1e-12);
}

TEST(EntropyInterval, WidthShrinksWithScaling) {
  double previous = INFINITY;
  for (std::int64_t k : {1, 2, 4, 8, 16}) {
    const double w = entropy_interval_exact(Counts{3 * k, 6 * k}, IdmConfig(1.0)).width();
    EXPECT_LT(w, previous);
    previous = w;
  }
}

// --- properties --------------------------------------------------------------

TEST(ExactProperty, TwoCategoryMatchesFineScan) {
  for (std::int64_t a = 0; a <= 12; ++a)
    for (std::int64_t b = 0; b + a <= 12; ++b)
      for (double s : {1.0, 2.0}) {
        const Counts c{a, b};
        const IdmConfig cfg(s);
        const Interval iv = entropy_interval_exact(c, cfg);
        const auto [lo, hi] = testing::scan_two_category([&](double t1) { return entropy_at_t1(c, cfg, t1); }, 20000);
        EXPECT_NEAR(iv.lower, lo, 1e-9) << a << ',' << b << " s=" << s;
        EXPECT_LE(iv.upper - hi, 1e-4) << a << ',' << b << " s=" << s;
        EXPECT_GE(iv.upper, hi - 1e-12) << a << ',' << b << " s=" << s;
      }
}

TEST(ExactProperty, ThreeCategoryMatchesGrid) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 40; ++rep) {
    const Counts c(testing::random_counts(3, 4, rng));
    const IdmConfig cfg(rep % 2 ? 2.0 : 1.0);
    const Interval iv = entropy_interval_exact(c, cfg);
    const Interval grid = grid_extrema(expected_entropy, c, cfg, GridSpec{0.005});
    EXPECT_NEAR(iv.lower, grid.lower, 0.01);
    EXPECT_NEAR(iv.upper, grid.upper, 0.01);
    EXPECT_LE(iv.lower, grid.lower + 1e-12);
    EXPECT_GE(iv.upper, grid.upper - 1e-12);
  }
}

TEST(ExactProperty, VertexMinimalityAndMaxDominance) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double a = unit(rng), b = unit(rng), c = unit(rng) - 0.5;
    auto fc = SeparableConcave::certified(
        [=](double x) { return a * std::sqrt(x) - b * x * x + c * x; },
        [=](double x) { return 0.5 * a / std::sqrt(x) - 2 * b * x + c; });
    const std::size_t d = 2 + rng() % 4;
    const Counts counts(testing::random_counts(d, 10, rng));
    const IdmConfig cfg(1.0 + unit(rng));
    const auto mv = exact_min_vertex(counts, cfg);
    const double fmin = fc.evaluate(mv.u);
    for (std::size_t v = 0; v < d; ++v) EXPECT_LE(fmin, fc.evaluate(u_at_vertex(counts, cfg, v)) + 1e-12);
    const double fmax = fc.evaluate(exact_max_point(counts, cfg).u_max);
    for (int k = 0; k < 50; ++k) {
      const double value = fc.evaluate(u_from_t(counts, cfg, TVector(testing::random_simplex_point(d, rng))));
      EXPECT_GE(value, fmin - 1e-12);
      EXPECT_LE(value, fmax + 1e-12);
    }
  }
}

TEST(ExactProperty, WaterFillingFeasible) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t d = 1 + rng() % 7;
    const Counts c(testing::random_counts(d, 30, rng));
    const IdmConfig cfg(0.5 + 2.0 * std::uniform_real_distribution<double>(0, 1)(rng));
    const auto w = exact_max_point(c, cfg);
    const UPoint u0 = u_zero(c, cfg);
    EXPECT_NEAR(w.u_max.sum(), 1.0, 1e-12);
    EXPECT_GE(w.m_star, 1u);
    EXPECT_LE(w.m_star, d);
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_GE(w.u_max[i], u0[i]);
      EXPECT_DOUBLE_EQ(w.u_max[i], std::max(u0[i], w.u_tilde));
    }
    const auto t = t_from_u(c, cfg, w.u_max);
    for (double ti : t) EXPECT_GE(ti, -1e-12);
    EXPECT_EQ(std::count(w.t_min.values().begin(), w.t_min.values().end(), 1.0), 1);
  }
}

TEST(ExactProperty, WaterLevelsHaveNoSpuriousLocalMinimum) {
  // all count vectors with d <= 5 and entries <= 5
  for (std::size_t d = 1; d <= 5; ++d) {
    std::vector<std::int64_t> c(d, 0);
    while (true) {
      for (double s : {0.5, 1.0, 2.0}) {
        const auto levels = water_levels(Counts(c), IdmConfig(s));
        std::size_t first_local = 0;
        while (first_local + 1 < levels.size() && levels[first_local + 1] < levels[first_local]) ++first_local;
        const auto global = std::min_element(levels.begin(), levels.end()) - levels.begin();
        EXPECT_EQ(static_cast<std::ptrdiff_t>(first_local), global);
        EXPECT_EQ(exact_max_point(Counts(c), IdmConfig(s)).m_star, static_cast<std::size_t>(global) + 1);
      }
      std::size_t pos = 0;
      while (pos < d && c[pos] == 5) c[pos++] = 0;
      if (pos == d) break;
      ++c[pos];
    }
  }
}

}  // namespace
}  // namespace idm
