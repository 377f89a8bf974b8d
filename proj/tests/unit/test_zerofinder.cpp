#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "arwlab/errors.hpp"
#include "arwlab/harness.hpp"
#include "arwlab/stats.hpp"
#include "arwlab/zerofinder.hpp"

using namespace arw;

namespace {

WaveSample cosine_fixture() {
  return deterministic_wave(make_level(1), {{{1, 0}, 1.0}}, {{{0, 1}, 1.0}});
}

double torus_distance(TorusPoint a, TorusPoint b) {
  double s = 0;
  for (int i = 0; i < 2; ++i) {
    double d = std::abs(a[i] - b[i]);
    d = std::min(d, 1.0 - d);
    s += d * d;
  }
  return std::sqrt(s);
}

WaveSample random_sample(long n, std::uint64_t rep) {
  RngStream rng(derive_seed(2024, static_cast<std::uint64_t>(n), rep, kTagWave));
  return sample_wave(make_level(n), rng);
}

}  // namespace

TEST(LocateZeros, CosineFixture) {
  auto zs = locate_zeros(cosine_fixture());
  ASSERT_EQ(zs.count(), 4u);
  const TorusPoint want[4] = {{0.25, 0.25}, {0.25, 0.75}, {0.75, 0.25}, {0.75, 0.75}};
  const int charge[4] = {+1, -1, -1, +1};
  for (int k = 0; k < 4; ++k) {
    auto it = std::find_if(zs.zeros.begin(), zs.zeros.end(),
                           [&](const Zero& z) { return torus_distance(z.position, want[k]) < 1e-10; });
    ASSERT_NE(it, zs.zeros.end()) << k;
    EXPECT_EQ(it->charge, charge[k]);
    EXPECT_NEAR(std::abs(it->jacobian_det), 4 * M_PI * M_PI, 1e-8);
  }
  EXPECT_EQ(zs.total_charge(), 0);
}

TEST(LocateZeros, DegenerateFieldIsRejected) {
  auto level = make_level(25);
  auto s = deterministic_wave(level, {{{3, 4}, 1.0}, {{5, 0}, {0.3, 0.2}}});
  EXPECT_THROW(locate_zeros(s), UnresolvedCellError);
  EXPECT_FALSE(locate_zeros_with_retry(s, std::nullopt).has_value());
}

TEST(LocateZeros, DefaultResolution) {
  EXPECT_EQ(default_cells_per_axis(1), 10);
  EXPECT_EQ(default_cells_per_axis(25), 50);
  EXPECT_EQ(default_cells_per_axis(2), 15);
}

TEST(LocateZeros, SetInvariantsOnRandomSamples) {
  for (long n : {5L, 25L, 65L}) {
    for (std::uint64_t r = 0; r < 15; ++r) {
      auto s = random_sample(n, r);
      auto zs = locate_zeros(s);
      EXPECT_EQ(zs.total_charge(), 0) << n << " " << r;
      EXPECT_GT(zs.count(), 0u);
      for (std::size_t i = 0; i < zs.count(); ++i) {
        const auto& z = zs.zeros[i];
        auto j = evaluate(s, z.position);
        EXPECT_LE(std::max(std::abs(j.t), std::abs(j.that)), 1e-10);
        EXPECT_NE(z.jacobian_det, 0.0);
        EXPECT_EQ(z.charge, z.jacobian_det > 0 ? 1 : -1);
        for (std::size_t k = i + 1; k < zs.count(); ++k)
          EXPECT_GT(torus_distance(z.position, zs.zeros[k].position), 1e-8);
      }
    }
  }
}

TEST(LocateZeros, ResolutionStability) {
  for (std::uint64_t r = 0; r < 10; ++r) {
    auto s = random_sample(25, r);
    ZeroFinderOptions coarse, fine;
    coarse.cells_per_axis = default_cells_per_axis(25);
    fine.cells_per_axis = 2 * coarse.cells_per_axis;
    auto a = locate_zeros(s, coarse), b = locate_zeros(s, fine);
    ASSERT_EQ(a.count(), b.count()) << r;
    for (const auto& z : a.zeros) {
      double best = 1.0;
      for (const auto& w : b.zeros) best = std::min(best, torus_distance(z.position, w.position));
      EXPECT_LE(best, 1e-7);
    }
  }
}

TEST(LocateZeros, ShiftedFieldHasShiftedZeros) {
  // Multiplying a_l by exp(2 pi i <l, y>) translates the field by -y.
  auto s = random_sample(13, 3);
  const TorusPoint y{0.137, 0.402};
  auto level = s.level_ptr();
  std::vector<cplx> a(s.a().begin(), s.a().end()), ah(s.ahat().begin(), s.ahat().end());
  for (int i = 0; i < level->multiplicity(); ++i) {
    auto f = level->points()[static_cast<std::size_t>(i)];
    cplx ph = axis_phase(f.l1, y[0]) * axis_phase(f.l2, y[1]);
    a[static_cast<std::size_t>(i)] *= ph;
    ah[static_cast<std::size_t>(i)] *= ph;
  }
  // restore exact conjugate symmetry after rounding
  for (int i = 0; i < level->multiplicity(); ++i)
    if (!level->is_representative(i)) {
      auto k = static_cast<std::size_t>(level->antipode(i));
      a[static_cast<std::size_t>(i)] = std::conj(a[k]);
      ah[static_cast<std::size_t>(i)] = std::conj(ah[k]);
    }
  WaveSample shifted(level, a, ah);
  auto z0 = locate_zeros(s), z1 = locate_zeros(shifted);
  ASSERT_EQ(z0.count(), z1.count());
  for (const auto& z : z0.zeros) {
    TorusPoint moved{z.position[0] - y[0], z.position[1] - y[1]};
    for (double& c : moved) c -= std::floor(c);
    double best = 1.0;
    int charge = 0;
    for (const auto& w : z1.zeros)
      if (double d = torus_distance(moved, w.position); d < best) {
        best = d;
        charge = w.charge;
      }
    EXPECT_LE(best, 1e-9);
    EXPECT_EQ(charge, z.charge);
  }
}

TEST(EpsilonCount, CosineFixture) {
  auto s = cosine_fixture();
  EXPECT_NEAR(epsilon_count(s, 0.2, 2000), 4.0, 0.05);
  EXPECT_NEAR(epsilon_count(s, 0.5, 2000), 4.0, 0.05);
}

TEST(EpsilonCount, ZeroField) {
  auto s = deterministic_wave(make_level(5), {});
  EXPECT_EQ(epsilon_count(s, 0.1, 100), 0.0);
}

TEST(EpsilonCount, GridPreconditions) {
  auto s = random_sample(25, 0);
  EXPECT_THROW(epsilon_count(s, 0.1, 50), std::invalid_argument);
  EXPECT_THROW(epsilon_count(s, 0.01, 200), std::invalid_argument);
  EXPECT_THROW(epsilon_count(s, 1.5, 200), std::invalid_argument);
}

TEST(EpsilonCount, ApproachesCountAsEpsilonShrinks) {
  RngStream rng(7);
  auto s = sample_wave(make_level(25), rng);
  const double count = static_cast<double>(locate_zeros(s).count());
  EXPECT_NEAR(epsilon_count(s, 0.05, 2000), count, 1.0);

  double err[3] = {0, 0, 0};
  const double eps[3] = {0.2, 0.1, 0.05};
  for (std::uint64_t r = 0; r < 8; ++r) {
    auto t = random_sample(25, 100 + r);
    double c = static_cast<double>(locate_zeros(t).count());
    for (int k = 0; k < 3; ++k) err[k] += std::abs(epsilon_count(t, eps[k], 2000) - c);
  }
  EXPECT_GT(err[0], err[1]);
  EXPECT_GT(err[1], err[2]);
}

// Known to fall short at eps = 0.02: near-miss pairs with min |Theta| < eps and the
// curvature of Theta over an eps-box both bias the count, independently of the grid.
TEST(EpsilonCount, RoundsToCountOnMostSamples) {
  const int R = 40;
  int agree = 0;
  for (std::uint64_t r = 0; r < R; ++r) {
    auto s = random_sample(13, r);
    long c = static_cast<long>(locate_zeros(s).count());
    if (std::lround(epsilon_count(s, 0.02, 5000)) == c) ++agree;
  }
  EXPECT_GE(agree, static_cast<int>(std::ceil(0.95 * R))) << agree << " of " << R;
}

TEST(NodalLength, CosineFixture) {
  auto s = cosine_fixture();
  EXPECT_NEAR(nodal_length(s, Component::T, 100).length, 2.0, 1e-3);
  EXPECT_NEAR(nodal_length(s, Component::That, 100).length, 2.0, 1e-3);
}

TEST(NodalLength, GridPrecondition) {
  EXPECT_THROW(nodal_length(random_sample(25, 0), Component::T, 50), std::invalid_argument);
}

TEST(NodalLength, ConvergesUnderRefinement) {
  auto s = random_sample(25, 4);
  double a = nodal_length(s, Component::T, 200).length;
  double b = nodal_length(s, Component::T, 400).length;
  double c = nodal_length(s, Component::T, 800).length;
  EXPECT_LT(std::abs(c - b), std::abs(b - a));
  EXPECT_LT(std::abs(c - b) / c, 1e-3);
}

TEST(NodalLength, ComponentsShareDistribution) {
  const int R = 150;
  std::vector<double> lt, lh;
  for (std::uint64_t r = 0; r < R; ++r) {
    auto s = random_sample(25, 1000 + r);
    lt.push_back(nodal_length(s, Component::T, 200).length);
    lh.push_back(nodal_length(s, Component::That, 200).length);
  }
  const double se = std::sqrt((sample_variance(lt) + sample_variance(lh)) / R);
  EXPECT_NEAR(sample_mean(lt), sample_mean(lh), 4 * se);
}
