#include <gtest/gtest.h>

#include <random>

#include "idm/core.hpp"
#include "test_support.hpp"

namespace idm {
namespace {

TEST(UFromT, WorkedExampleVertices) {
  const Counts c{3, 6};
  const IdmConfig cfg(1.0);
  const UPoint a = u_from_t(c, cfg, TVector({0.0, 1.0}));
  EXPECT_DOUBLE_EQ(a[0], 0.3);
  EXPECT_DOUBLE_EQ(a[1], 0.7);
  const UPoint b = u_from_t(c, cfg, TVector({1.0, 0.0}));
  EXPECT_DOUBLE_EQ(b[0], 0.4);
  EXPECT_DOUBLE_EQ(b[1], 0.6);
  EXPECT_TRUE(b.in_simplex);
}

TEST(UFromT, SingleCategoryIsOne) {
  const UPoint u = u_from_t(Counts{5}, IdmConfig(2.0), TVector({1.0}));
  ASSERT_EQ(u.size(), 1u);
  EXPECT_DOUBLE_EQ(u[0], 1.0);
}

TEST(UFromT, RejectsDimensionMismatch) {
  EXPECT_THROW(u_from_t(Counts{1, 2, 3}, IdmConfig(1.0), TVector({0.5, 0.5})), Error);
}

TEST(IdmConfig, RejectsNonpositiveS) {
  EXPECT_THROW(IdmConfig(0.0), Error);
  EXPECT_THROW(IdmConfig(-1.0), Error);
  EXPECT_FALSE(IdmConfig(5.0).in_recommended_range());
  EXPECT_TRUE(IdmConfig(1.5).in_recommended_range());
}

TEST(Counts, Invariants) {
  EXPECT_THROW(Counts(std::vector<std::int64_t>{}), Error);
  EXPECT_THROW((Counts{1, -1}), Error);
  const Counts c{4, 0, 7};
  EXPECT_EQ(c.total(), 11);
  EXPECT_EQ(c.size(), 3u);
}

TEST(TVector, Validation) {
  EXPECT_THROW(TVector({0.5, 0.6}), Error);
  EXPECT_THROW(TVector({1.5, -0.5}), Error);
  EXPECT_NO_THROW(TVector::center(7));
  EXPECT_NO_THROW(TVector::vertex(3, 2));
  EXPECT_THROW(TVector::vertex(3, 3), Error);
}

TEST(UZero, WorkedExample) {
  const UPoint u0 = u_zero(Counts{3, 6}, IdmConfig(1.0));
  EXPECT_DOUBLE_EQ(u0[0], 0.3);
  EXPECT_DOUBLE_EQ(u0[1], 0.6);
  EXPECT_DOUBLE_EQ(u0.sigma, 0.1);
  EXPECT_FALSE(u0.in_simplex);
}

TEST(UZero, NoDataAndSingleCategory) {
  const UPoint empty = u_zero(Counts{0, 0}, IdmConfig(1.0));
  EXPECT_EQ(empty[0], 0.0);
  EXPECT_EQ(empty[1], 0.0);
  EXPECT_EQ(empty.sigma, 1.0);
  const UPoint one = u_zero(Counts{9}, IdmConfig(1.0));
  EXPECT_DOUBLE_EQ(one[0], 0.9);
  EXPECT_DOUBLE_EQ(one.sigma, 0.1);
}

TEST(Sigma, Examples) {
  EXPECT_DOUBLE_EQ(sigma(Counts{3, 6}, IdmConfig(1.0)), 0.1);
  EXPECT_DOUBLE_EQ(sigma(Counts::zeros(3), IdmConfig(2.0)), 1.0);
  EXPECT_DOUBLE_EQ(sigma(Counts{98}, IdmConfig(2.0)), 0.02);
}

TEST(Interval, OrderAndContainment) {
  EXPECT_THROW(Interval(1.0, 0.0, IntervalKind::exact), Error);
  EXPECT_NO_THROW(Interval(1.0, 1.0 - 1e-13, IntervalKind::exact));
  const Interval outer(0.0, 1.0, IntervalKind::conservative_outer);
  EXPECT_TRUE(outer.contains(Interval(0.2, 0.8, IntervalKind::exact)));
  EXPECT_FALSE(outer.contains(1.1));
  EXPECT_STREQ(to_string(IntervalKind::inner_witness), "inner_witness");
}

// --- properties over random inputs ---------------------------------------------

TEST(UFromTProperty, LandsInShiftedSimplex) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t d = 1 + rng() % 6;
    const Counts c(testing::random_counts(d, 40, rng));
    const IdmConfig cfg(0.5 + 2.0 * std::uniform_real_distribution<double>(0, 1)(rng));
    const TVector t(testing::random_simplex_point(d, rng));
    const UPoint u = u_from_t(c, cfg, t);
    const UPoint u0 = u_zero(c, cfg);
    EXPECT_NEAR(u.sum(), 1.0, 1e-12);
    for (std::size_t i = 0; i < d; ++i) EXPECT_GE(u[i], u0[i] - 1e-15);
    EXPECT_NEAR(u0.sigma, 1.0 - u0.sum(), 1e-12);
  }
}

TEST(UFromTProperty, AffineInT) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t d = 2 + rng() % 5;
    const Counts c(testing::random_counts(d, 25, rng));
    const IdmConfig cfg(1.0 + std::uniform_real_distribution<double>(0, 1)(rng));
    const auto t1 = testing::random_simplex_point(d, rng);
    const auto t2 = testing::random_simplex_point(d, rng);
    const double a = std::uniform_real_distribution<double>(0, 1)(rng);
    std::vector<double> mix(d);
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) head += (mix[i] = a * t1[i] + (1 - a) * t2[i]);
    mix[d - 1] = 1.0 - head;
    const UPoint um = u_from_t(c, cfg, TVector(mix));
    const UPoint u1 = u_from_t(c, cfg, TVector(t1));
    const UPoint u2 = u_from_t(c, cfg, TVector(t2));
    for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(um[i], a * u1[i] + (1 - a) * u2[i], 1e-12);
  }
}

}  // namespace
}  // namespace idm
