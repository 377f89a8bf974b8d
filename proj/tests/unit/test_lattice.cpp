#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <map>
#include <set>

#include "arwlab/errors.hpp"
#include "arwlab/lattice.hpp"

using namespace arw;

namespace {

// Independent enumeration: scan the full square.
std::set<Frequency> brute_points(long n) {
  std::set<Frequency> out;
  int r = static_cast<int>(std::sqrt(static_cast<double>(n))) + 1;
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b)
      if (static_cast<long>(a) * a + static_cast<long>(b) * b == n) out.insert({a, b});
  return out;
}

std::set<Frequency> as_set(const EnergyLevel& level) {
  return {level.points().begin(), level.points().end()};
}

}  // namespace

TEST(Lattice, FiveHasEightPoints) {
  auto level = enumerate_level(5);
  ASSERT_TRUE(level);
  EXPECT_EQ(level->multiplicity(), 8);
  std::set<Frequency> want{{1, 2}, {1, -2}, {-1, 2}, {-1, -2}, {2, 1}, {2, -1}, {-2, 1}, {-2, -1}};
  EXPECT_EQ(as_set(*level), want);
}

TEST(Lattice, ThreeIsNotRepresentable) {
  EXPECT_FALSE(enumerate_level(3));
  EXPECT_THROW(make_level(3), std::invalid_argument);
  EXPECT_THROW(enumerate_level(0), std::invalid_argument);
}

TEST(Lattice, TwentyFiveMatchesBruteForce) {
  auto level = enumerate_level(25);
  ASSERT_TRUE(level);
  EXPECT_EQ(level->multiplicity(), 12);
  EXPECT_EQ(as_set(*level), brute_points(25));
}

TEST(Lattice, EnumerationAgreesWithScanAndIsSorted) {
  for (long n = 1; n <= 2000; ++n) {
    auto brute = brute_points(n);
    auto level = enumerate_level(n);
    ASSERT_EQ(level.has_value(), !brute.empty()) << n;
    if (!level) continue;
    EXPECT_EQ(as_set(*level), brute) << n;
    auto pts = level->points();
    EXPECT_TRUE(std::is_sorted(pts.begin(), pts.end())) << n;
    EXPECT_EQ(level->multiplicity() % 4, 0) << n;
  }
}

TEST(Lattice, RepresentableRange) {
  std::vector<long> want{1, 2, 4, 5, 8, 9, 10, 13, 16, 17, 18, 20, 25};
  EXPECT_EQ(representable_in(1, 25), want);
}

TEST(Lattice, ClosureUnderNegationAndRotation) {
  for (long n : representable_in(1, 3000)) {
    auto level = make_level(n);
    auto pts = level->points();
    for (int i = 0; i < level->multiplicity(); ++i) {
      Frequency f = pts[static_cast<std::size_t>(i)];
      int j = level->index_of(-f);
      ASSERT_GE(j, 0) << n;
      EXPECT_EQ(level->antipode(i), j);
      EXPECT_GE(level->index_of({-f.l2, f.l1}), 0) << n;
      EXPECT_NE(level->is_representative(i), level->is_representative(j));
    }
  }
}

TEST(Lattice, SecondMomentSums) {
  for (long n : representable_in(1, 3000)) {
    auto level = make_level(n);
    long s12 = 0, s11 = 0, s22 = 0;
    for (const auto& f : level->points()) {
      s12 += static_cast<long>(f.l1) * f.l2;
      s11 += static_cast<long>(f.l1) * f.l1;
      s22 += static_cast<long>(f.l2) * f.l2;
    }
    EXPECT_EQ(s12, 0);
    EXPECT_EQ(2 * s11, n * level->multiplicity());
    EXPECT_EQ(2 * s22, n * level->multiplicity());
  }
}

TEST(Lattice, EigenvalueAndPsi) {
  auto one = make_level(1);
  EXPECT_DOUBLE_EQ(one->eigenvalue(), 4 * M_PI * M_PI);
  EXPECT_DOUBLE_EQ(one->psi(), 0.5);
}

TEST(MuHat, SmallLevels) {
  EXPECT_DOUBLE_EQ(mu_hat(*make_level(1), 4), 1.0);
  EXPECT_DOUBLE_EQ(mu_hat(*make_level(2), 4), -1.0);
  EXPECT_NEAR(mu_hat(*make_level(25), 4), -1716.0 / 7500.0, 1e-15);
}

TEST(MuHat, DirectComplexSum) {
  for (long n : representable_in(1, 500)) {
    auto level = make_level(n);
    for (int k = 0; k <= 12; ++k) {
      std::complex<double> s = 0;
      for (const auto& f : level->points())
        s += std::pow(std::complex<double>(f.l1, f.l2) / std::sqrt(static_cast<double>(n)), k);
      s /= level->multiplicity();
      EXPECT_NEAR(mu_hat(*level, k), s.real(), 1e-12) << n << " " << k;
    }
  }
}

TEST(MuHat, RangeAndVanishing) {
  for (long n : representable_in(1, 5000)) {
    auto level = make_level(n);
    double m4 = mu_hat(*level, 4);
    EXPECT_GE(m4, -1.0 - 1e-12);
    EXPECT_LE(m4, 1.0 + 1e-12);
    for (int k : {1, 2, 3, 5, 6, 7, 9, 10, 11}) EXPECT_NEAR(mu_hat(*level, k), 0.0, 1e-12) << n << " " << k;
  }
}

TEST(CorrelationCount, OrderFourExamples) {
  auto c = correlation_count(*make_level(25), 4);
  EXPECT_EQ(c.count, 396);
  EXPECT_EQ(correlation_count(*make_level(1), 4).count, 36);
}

TEST(CorrelationCount, OrderFourClosedFormUpToForty) {
  int checked = 0;
  for (long n : representable_in(1, 20000)) {
    auto level = make_level(n);
    const std::int64_t N = level->multiplicity();
    if (N > 40) continue;
    auto c = correlation_count(*level, 4);
    EXPECT_EQ(c.count, 3 * N * (N - 1)) << n;
    // R(4) = 3 (N - 1) / N^3
    EXPECT_NEAR(c.normalized_moment, 3.0 * (N - 1) / (double(N) * N * N), 1e-15) << n;
    ++checked;
  }
  EXPECT_GT(checked, 1000);
}

TEST(CorrelationCount, OrderSixBruteForceAtFive) {
  auto level = make_level(5);
  auto pts = level->points();
  const int N = level->multiplicity();
  std::int64_t brute = 0;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d)
          for (int e = 0; e < N; ++e)
            for (int f = 0; f < N; ++f) {
              int x = pts[a].l1 - pts[b].l1 + pts[c].l1 - pts[d].l1 + pts[e].l1 - pts[f].l1;
              int y = pts[a].l2 - pts[b].l2 + pts[c].l2 - pts[d].l2 + pts[e].l2 - pts[f].l2;
              if (x == 0 && y == 0) ++brute;
            }
  auto c = correlation_count(*level, 6);
  EXPECT_EQ(c.count, brute);
  EXPECT_GE(c.count, std::int64_t(N) * N * N);
}

TEST(CorrelationCount, OrderSixScaledCountStaysBounded) {
  double worst = 0.0;
  for (long n : representable_in(1, 5000)) {
    auto level = make_level(n);
    const double N = level->multiplicity();
    if (N > 48) continue;
    auto c = correlation_count(*level, 6);
    EXPECT_GE(c.count, static_cast<std::int64_t>(N * N * N));
    worst = std::max(worst, static_cast<double>(c.count) / std::pow(N, 3.5));
  }
  EXPECT_LT(worst, 20.0);
}

TEST(CorrelationCount, CapAndBadOrder) {
  auto level = make_level(25);
  EXPECT_THROW(correlation_count(*level, 6, 8), CapExceededError);
  EXPECT_THROW(correlation_count(*level, 5), std::invalid_argument);
}
