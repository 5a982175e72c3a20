#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "profilematch/wasserstein1d.hpp"
#include "random_inputs.hpp"

using namespace profilematch;

namespace {

DistanceProfile U(std::vector<double> v) { return DistanceProfile::uniform(std::move(v)); }

struct Random1d {
  std::vector<double> x, w;
};

Random1d random_measure(std::mt19937_64& rng, std::size_t max_atoms, bool integer_atoms) {
  std::uniform_int_distribution<std::size_t> count(1, max_atoms);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::uniform_int_distribution<int> k(0, 4);
  Random1d m;
  const std::size_t n = count(rng);
  for (std::size_t i = 0; i < n; ++i) m.x.push_back(integer_atoms ? k(rng) : u(rng));
  m.w = testing_support::random_weights(rng, n, true);
  return m;
}

}  // namespace

TEST(Wasserstein, Identity) { EXPECT_EQ(wasserstein_p(U({0, 1, 2}), U({0, 1, 2})), 0.0); }

TEST(Wasserstein, TwoDiracs) {
  EXPECT_EQ(wasserstein_p(U({0}), U({3}), 1.0), 3.0);
  EXPECT_EQ(wasserstein_p_pow(U({0}), U({3}), 2.0), 9.0);
  EXPECT_EQ(wasserstein_p(U({0}), U({3}), 2.0), 3.0);
}

TEST(Wasserstein, UnequalUniformSizes) {
  EXPECT_NEAR(wasserstein_p(U({0, 1}), U({0, 1, 2}), 1.0), 0.5, 1e-15);
  EXPECT_NEAR(wasserstein_p_pow(U({0, 1}), U({0, 1, 2}), 2.0), 0.5, 1e-15);
}

TEST(Wasserstein, WeightedTwoPoint) {
  const auto p = DistanceProfile::weighted({0, 2}, {0.5, 0.5});
  const auto q = DistanceProfile::weighted({0, 2}, {1.0, 0.0});
  EXPECT_NEAR(wasserstein_p(p, q, 1.0), 1.0, 1e-15);
}

TEST(Wasserstein, IdenticalOrder2IsZero) {
  EXPECT_EQ(wasserstein_p_pow(U({0.3, 1.7, 2.2}), U({2.2, 0.3, 1.7}), 2.0), 0.0);
}

TEST(Wasserstein, RejectsBadOrder) {
  EXPECT_THROW(wasserstein_p(U({0}), U({1}), 0.5), InputError);
  EXPECT_THROW(wasserstein_p(U({0}), U({1}), std::nan("")), InputError);
  EXPECT_THROW(wasserstein_p(U({0}), U({1}), INFINITY), InputError);
}

TEST(Wasserstein, MatchesQuantileAndCdfOracles) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 400; ++rep) {
    const bool ints = rep % 2 == 0;  // integer atoms force many ties
    const auto a = random_measure(rng, 12, ints), b = random_measure(rng, 12, ints);
    const auto p = DistanceProfile::weighted(a.x, a.w), q = DistanceProfile::weighted(b.x, b.w);
    EXPECT_NEAR(wasserstein_p(p, q, 1.0), oracle::wasserstein1_cdf(a.x, a.w, b.x, b.w), 1e-9);
    for (double order : {1.0, 1.5, 2.0, 3.0}) {
      EXPECT_NEAR(wasserstein_p_pow(p, q, order),
                  oracle::wasserstein_pow_quantile(a.x, a.w, b.x, b.w, order), 1e-9);
    }
  }
}

TEST(Wasserstein, UniformFastPathsAgreeWithWeightedSweep) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (auto [n, m] : {std::pair{7, 7}, {4, 12}, {12, 4}, {5, 7}, {1, 9}}) {
    std::vector<double> x(n), y(m);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    const auto px = U(x), py = U(y);
    const auto wx = DistanceProfile::weighted(x, std::vector<double>(n, 1.0 / n));
    const auto wy = DistanceProfile::weighted(y, std::vector<double>(m, 1.0 / m));
    for (double order : {1.0, 2.0, 2.5}) {
      EXPECT_NEAR(wasserstein_p_pow(px, py, order), wasserstein_p_pow(wx, wy, order), 1e-12);
    }
  }
}

TEST(Wasserstein, BoundedVariantIsExactBelowCutoff) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(500), y(500);
  for (auto& v : x) v = u(rng);
  for (auto& v : y) v = u(rng) + 0.3;
  const auto p = U(x), q = U(y);
  const double full = wasserstein_p_pow(p, q, 1.0);
  EXPECT_EQ(wasserstein_p_pow_bounded(p, q, 1.0, full), full);
  EXPECT_GT(wasserstein_p_pow_bounded(p, q, 1.0, 0.01), 0.01);
}

TEST(WassersteinProperties, Symmetry) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = random_measure(rng, 10, false), b = random_measure(rng, 10, false);
    const auto p = DistanceProfile::weighted(a.x, a.w), q = DistanceProfile::weighted(b.x, b.w);
    EXPECT_EQ(wasserstein_p(p, q, 1.0), wasserstein_p(q, p, 1.0));
  }
}

TEST(WassersteinProperties, ZeroIffEqualAfterMergingDuplicates) {
  const auto p = DistanceProfile::weighted({1, 1, 2}, {0.25, 0.25, 0.5});
  const auto q = DistanceProfile::weighted({1, 2}, {0.5, 0.5});
  EXPECT_EQ(wasserstein_p(p, q), 0.0);
  const auto r = DistanceProfile::weighted({1, 2}, {0.5 + 1e-6, 0.5 - 1e-6});
  EXPECT_GT(wasserstein_p(p, r), 0.0);
}

TEST(WassersteinProperties, TriangleInequality) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 200; ++rep) {
    const auto a = random_measure(rng, 8, false), b = random_measure(rng, 8, false),
               c = random_measure(rng, 8, false);
    const auto p = DistanceProfile::weighted(a.x, a.w), q = DistanceProfile::weighted(b.x, b.w),
               r = DistanceProfile::weighted(c.x, c.w);
    for (double order : {1.0, 2.0}) {
      EXPECT_LE(wasserstein_p(p, r, order), wasserstein_p(p, q, order) + wasserstein_p(q, r, order) + 1e-9);
    }
  }
}

TEST(WassersteinProperties, TranslationInvariance) {
  std::mt19937_64 rng(10);
  for (int rep = 0; rep < 100; ++rep) {
    auto a = random_measure(rng, 8, false), b = random_measure(rng, 8, false);
    const double base = wasserstein_p(DistanceProfile::weighted(a.x, a.w), DistanceProfile::weighted(b.x, b.w));
    for (auto& v : a.x) v += 0.75;
    for (auto& v : b.x) v += 0.75;
    EXPECT_NEAR(wasserstein_p(DistanceProfile::weighted(a.x, a.w), DistanceProfile::weighted(b.x, b.w)), base, 1e-12);
  }
}
