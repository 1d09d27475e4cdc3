#include "rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

namespace {

using drim::rng::Stream;

TEST(Rng, MixIsDeterministicAndSpreads) {
  EXPECT_EQ(drim::rng::mix(0), drim::rng::mix(0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(drim::rng::mix(i));
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(Rng, StreamsAreReproducible) {
  Stream a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, SeedsGiveDifferentStreams) {
  Stream a(1), b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
  EXPECT_EQ(same, 0);
}

TEST(Rng, DeriveIsIndependentOfCounterPosition) {
  Stream a(7);
  Stream before = a.derive(3, 4);
  a.next_u64();
  a.next_u64();
  Stream after = a.derive(3, 4);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(before.next_u64(), after.next_u64());
}

TEST(Rng, DeriveTagsSeparateStreams) {
  Stream a(7);
  EXPECT_NE(a.derive(1, 0).next_u64(), a.derive(0, 1).next_u64());
  EXPECT_NE(a.derive(1).next_u64(), a.derive(2).next_u64());
}

TEST(Rng, UniformInUnitInterval) {
  Stream s(123);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = s.next_double();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 20000.0, 0.5, 0.01);
}

TEST(Rng, NextBelowStaysInRangeAndCoversIt) {
  Stream s(9);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const std::uint64_t v = s.next_below(7);
    ASSERT_LT(v, 7u);
    ++hits[static_cast<std::size_t>(v)];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, NormalMomentsMatchStandardGaussian) {
  Stream s(2024);
  const int n = 100000;
  double mean = 0.0, var = 0.0;
  std::vector<double> draws(n);
  for (int i = 0; i < n; ++i) {
    draws[static_cast<std::size_t>(i)] = s.next_normal();
    ASSERT_TRUE(std::isfinite(draws[static_cast<std::size_t>(i)]));
    mean += draws[static_cast<std::size_t>(i)];
  }
  mean /= n;
  for (double d : draws) var += (d - mean) * (d - mean);
  var /= n - 1;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.03);
}

}  // namespace
