// Acceptance suite: one PASS/FAIL line per criterion.
//   arwlab_acceptance            run all twelve
//   arwlab_acceptance --only k   run criterion k
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "arwlab/chaos.hpp"
#include "arwlab/harness.hpp"
#include "arwlab/kacrice.hpp"
#include "arwlab/lattice.hpp"
#include "arwlab/stats.hpp"

using namespace arw;

namespace {

constexpr std::uint64_t kSeed = 20240601;
constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kMeanZ = 4.0;
constexpr double kProjection2Tol = 1e-8;
constexpr double kAlphaSigmas = 3.0;
constexpr long kAlphaDraws = 10'000'000;
constexpr double kQuarticTol = 1e-9;
constexpr double kCovSigmas = 3.0;
constexpr double kCovFloor = 1e-12;
constexpr double kVarLow = 0.7, kVarHigh = 1.4;
constexpr double kRatioLow = 0.8, kRatioHigh = 1.5;
constexpr double kLawVarRel = 0.02;
constexpr double kKsMax = 0.15;
constexpr double kKacRiceRel = 0.15;
constexpr double kNodalRel = 0.01;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

WaveSample sample_at(long n, std::uint64_t rep) {
  RngStream rng(kSeed, static_cast<std::uint64_t>(n), rep, kTagWave);
  return sample_wave(make_level(n), rng);
}

Outcome fourth_order_count() {
  long levels = 0, bad = 0;
  for (long n : representable_in(1, 200)) {
    auto level = make_level(n);
    auto pts = level->points();
    const std::int64_t N = level->multiplicity();
    std::int64_t brute = 0;
    for (const auto& a : pts)
      for (const auto& b : pts)
        for (const auto& c : pts)
          for (const auto& d : pts)
            if (a.l1 - b.l1 + c.l1 - d.l1 == 0 && a.l2 - b.l2 + c.l2 - d.l2 == 0) ++brute;
    if (brute != 3 * N * (N - 1) || correlation_count(*level, 4).count != brute) ++bad;
    ++levels;
  }
  return {bad == 0, fmt("|S4| = 3N(N-1) on %ld/%ld representable n <= 200", levels - bad, levels)};
}

Outcome mean_count() {
  ExperimentConfig c;
  c.n = {25};
  c.replications = 500;
  c.master_seed = kSeed;
  c.checks = {Check::Mean};
  auto rec = run_experiment(c).levels.at(0);
  const double want = 25 * kPi;
  const double z = (*rec.mean_I - want) / *rec.stderr_mean;
  return {std::abs(z) <= kMeanZ && rec.invalid_count == 0,
          fmt("n=25 R=500 mean %.3f +- %.3f vs 25pi = %.4f, z = %.2f (|z| <= %.0f), invalid %ld", *rec.mean_I,
              *rec.stderr_mean, want, z, kMeanZ, rec.invalid_count)};
}

Outcome second_order_vanishes() {
  double worst = 0;
  for (long n : {1L, 25L, 65L})
    for (std::uint64_t r = 0; r < 100; ++r) worst = std::max(worst, std::abs(projection2(sample_at(n, r))));
  return {worst <= kProjection2Tol, fmt("max |I[2]| over 300 samples (n = 1, 25, 65): %.2e (<= %.0e)", worst,
                                        kProjection2Tol)};
}

Outcome alpha_table_by_monte_carlo() {
  std::vector<AlphaIndex> idx;
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b)
      for (int c = 0; a + b + c <= 4; ++c)
        for (int d = 0; a + b + c + d <= 4; ++d) {
          int odd = a % 2 + b % 2 + c % 2 + d % 2;
          if ((odd == 0 || odd == 4) && *alpha_table({a, b, c, d}) != 0.0) idx.push_back({a, b, c, d});
        }
  RngStream rng(kSeed, 0, 0, kTagAlpha);
  auto mc = alpha_monte_carlo(idx, kAlphaDraws, rng);
  double worst = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    worst = std::max(worst, std::abs(mc[i].value - *alpha_table(idx[i])) / mc[i].std_error);
  return {worst <= kAlphaSigmas,
          fmt("%zu table entries, 1e7 draws, worst deviation %.2f se (<= %.0f)", idx.size(), worst, kAlphaSigmas)};
}

Outcome quartic_identities_hold() {
  double worst = 0;
  for (std::uint64_t r = 0; r < 50; ++r)
    for (const auto& id : quartic_identities(sample_at(25, r)))
      worst = std::max(worst, std::abs(id.quadrature - id.coefficients));
  return {worst <= kQuarticTol, fmt("cases i, iv, v, viii on 50 samples at n=25: max error %.2e (<= %.0e)", worst,
                                    kQuarticTol)};
}

Outcome statistics_covariance() {
  const int R = 2000;
  auto level = make_level(25);
  std::vector<std::array<double, 14>> v(R);
  for (int r = 0; r < R; ++r) v[r] = quadratic_statistics(sample_at(25, static_cast<std::uint64_t>(r))).as_vector();
  auto sigma = covariance_matrix(mu_hat(*level, 4));
  std::array<double, 14> mean{};
  for (const auto& x : v)
    for (int i = 0; i < 14; ++i) mean[i] += x[i] / R;
  int bad = 0;
  double worst = 0;
  for (int i = 0; i < 14; ++i)
    for (int j = i; j < 14; ++j) {
      std::vector<double> prod(R);
      for (int r = 0; r < R; ++r) prod[r] = (v[r][i] - mean[i]) * (v[r][j] - mean[j]);
      const double est = sample_mean(prod) * R / (R - 1);
      const double se = std::sqrt(sample_variance(prod) / R);
      const double tol = std::max(kCovSigmas * se, kCovFloor);
      const double dev = std::abs(est - sigma[i][j]);
      if (dev > tol) ++bad;
      if (se > 0) worst = std::max(worst, dev / se);
    }
  return {bad == 0, fmt("n=25 R=2000, mu4 = %.4f: %d of 105 entries outside 3 se, worst %.2f se", mu_hat(*level, 4),
                        bad, worst)};
}

Outcome variance_asymptotics() {
  ExperimentConfig c;
  c.n = {325};
  c.replications = 500;
  c.master_seed = kSeed;
  c.checks = {Check::Variance};
  auto rec = run_experiment(c).levels.at(0);
  const double ratio4 = *rec.var_I4_exact / rec.predicted_var;
  const double ratio = *rec.var_I / *rec.var_I4_exact;
  bool ok = ratio4 >= kVarLow && ratio4 <= kVarHigh && ratio >= kRatioLow && ratio <= kRatioHigh &&
            static_cast<double>(rec.invalid_count) <= 0.01 * 500;
  // Reference only: the exact fourth projection tends to (3 eta^2 + 11) in place of (3 eta^2 + 5).
  const double eta2 = rec.mu4 * rec.mu4;
  const double ratio4_ref = ratio4 * (3 * eta2 + 5) / (3 * eta2 + 11);
  return {ok, fmt("n=325 R=500: Var(I[4]) / (d E^2/N^2) = %.3f in [%.1f, %.1f], Var(I) / Var(I[4]) = %.3f in "
                  "[%.1f, %.1f], invalid %ld; for reference Var(I[4]) / ((3 eta^2 + 11) E^2 / (128 pi^2 N^2)) = %.3f",
                  ratio4, kVarLow, kVarHigh, ratio, kRatioLow, kRatioHigh, rec.invalid_count, ratio4_ref)};
}

Outcome limit_law_variance() {
  double worst = 0;
  std::string parts;
  for (double eta : {0.0, 0.5, 1.0}) {
    RngStream rng(kSeed, 0, static_cast<std::uint64_t>(eta * 10), kTagLimitLaw);
    RunningStats s;
    for (int i = 0; i < 1'000'000; ++i) s.add(sample_j_unnormalized(eta, rng));
    const double want = 8 * (3 * eta * eta + 5);
    worst = std::max(worst, std::abs(s.variance() / want - 1));
    parts += fmt(" eta=%.1f: %.2f vs %.0f;", eta, s.variance(), want);
  }
  return {worst <= kLawVarRel, fmt("1e6 draws,%s max rel err %.4f (<= %.2f)", parts.c_str(), worst, kLawVarRel)};
}

Outcome distributional_convergence() {
  ExperimentConfig c;
  c.n = {325};
  c.replications = 500;
  c.master_seed = kSeed;
  c.checks = {Check::Distribution};
  c.limit_draws = 100'000;
  auto rec = run_experiment(c).levels.at(0);
  return {*rec.ks_distance_J <= kKsMax,
          fmt("n=325 R=500 vs 1e5 draws of J_eta (eta = |mu4| = %.4f): KS %.4f (<= %.2f, asymptotic band)",
              std::abs(rec.mu4), *rec.ks_distance_J, kKsMax)};
}

Outcome charge_and_determinism() {
  ExperimentConfig c;
  c.n = {25, 65};
  c.replications = 100;
  c.master_seed = kSeed;
  c.checks = {Check::Mean};
  c.threads = 1;
  auto a = run_experiment(c);
  c.threads = 4;
  auto b = run_experiment(c);
  a.metadata.wall_seconds = b.metadata.wall_seconds = 0;
  const bool same = report_to_json(a).dump() == report_to_json(b).dump();
  long violations = 0, invalid = 0;
  for (const auto& l : a.levels) {
    violations += l.charge_violations.value_or(-1);
    invalid += l.invalid_count;
  }
  return {same && violations == 0,
          fmt("n = 25, 65, R=100 each: charge violations %ld (invalid %ld), reports identical for 1 and 4 threads: %s",
              violations, invalid, same ? "yes" : "no")};
}

Outcome kac_rice_moment() {
  ExperimentConfig c;
  c.n = {25};
  c.replications = 2000;
  c.master_seed = kSeed;
  c.checks = {Check::KacRice};
  c.kacrice_draws = 100'000;
  auto rec = run_experiment(c).levels.at(0);
  const double mc = *rec.factorial_moment_mc, kr = *rec.factorial_moment_kac_rice;
  const double rel = std::abs(mc - kr) / kr;
  return {rel <= kKacRiceRel,
          fmt("n=25, square side 1/50: count MC %.4e +- %.1e vs Kac-Rice %.4e +- %.1e, rel diff %.3f (<= %.2f)", mc,
              *rec.factorial_moment_mc_stderr, kr, *rec.factorial_moment_kac_rice_stderr, rel, kKacRiceRel)};
}

Outcome nodal_length_mean() {
  ExperimentConfig c;
  c.n = {25};
  c.replications = 500;
  c.master_seed = kSeed;
  c.checks = {Check::NodalLength};
  auto rec = run_experiment(c).levels.at(0);
  const double E = make_level(25)->eigenvalue();
  const double target = E / (2 * std::numbers::sqrt2);
  const double mean = *rec.mean_nodal_length;
  const double rel = std::abs(mean - target) / target;
  const double alt = std::sqrt(E) / (2 * std::numbers::sqrt2);
  return {rel <= kNodalRel,
          fmt("n=25 R=500 mean %.4f +- %.4f vs E/(2 sqrt 2) = %.2f, rel diff %.4f (<= %.2f); "
              "for reference sqrt(E)/(2 sqrt 2) = %.4f, rel diff %.5f",
              mean, *rec.stderr_nodal_length, target, rel, kNodalRel, alt, std::abs(mean - alt) / alt)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "fourth-order correlation count", fourth_order_count},
      {2, "mean singularity count", mean_count},
      {3, "second chaos vanishes", second_order_vanishes},
      {4, "alpha table by Monte Carlo", alpha_table_by_monte_carlo},
      {5, "exact quartic identities", quartic_identities_hold},
      {6, "14-vector covariance", statistics_covariance},
      {7, "variance asymptotics", variance_asymptotics},
      {8, "limit-law variance", limit_law_variance},
      {9, "distributional convergence", distributional_convergence},
      {10, "charge neutrality and determinism", charge_and_determinism},
      {11, "Kac-Rice factorial moment", kac_rice_moment},
      {12, "nodal length mean", nodal_length_mean},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only k]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria().size())) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  int failed = 0;
  for (const auto& c : criteria()) {
    if (only != 0 && c.id != only) continue;
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s  %s: %s [%.1fs]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
