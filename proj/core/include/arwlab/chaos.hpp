#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "arwlab/wavefield.hpp"

namespace arw {

// Probabilists' Hermite polynomial, 0 <= k <= 16.
double hermite(int k, double t);

// H_l(0) / sqrt(2 pi)
double beta(int l);
// Coefficients of (1/(2 eps)) 1_[-eps, eps] in the Hermite basis.
double beta_eps(int l, double eps);

struct AlphaIndex {
  int a = 0, b = 0, c = 0, d = 0;
  int total() const { return a + b + c + d; }
};

struct AlphaValue {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = false;
};

// Closed-form value for total degree <= 4 (zero for mixed parity), nullopt otherwise.
std::optional<double> alpha_table(AlphaIndex idx);

// E[|XW - YV| H_a(X) H_b(Y) H_c(V) H_d(W)] for independent standard X, Y, V, W,
// estimated jointly for all indices from one set of draws.
std::vector<AlphaValue> alpha_monte_carlo(std::span<const AlphaIndex> indices, long draws, RngStream& rng);

// Table value when available, Monte Carlo (>= 1e7 draws) otherwise.
AlphaValue alpha_coefficient(AlphaIndex idx, RngStream& rng, long draws = 10'000'000);

// Quadratic coefficient statistics of one sample.
struct ChaosStatistics {
  double W = 0, W1 = 0, W2 = 0, W12 = 0;
  double What = 0, What1 = 0, What2 = 0, What12 = 0;
  double M = 0, M1 = 0, M2 = 0, M11 = 0, M22 = 0, M12 = 0;

  // (W, W1, W2, W12, What, What1, What2, What12, M, M1, M2, M11, M22, M12)
  std::array<double, 14> as_vector() const;
};

ChaosStatistics quadratic_statistics(const WaveSample& sample);

using Matrix14 = std::array<std::array<double, 14>, 14>;

// Block diagonal (A, A, B) limit covariance of the statistics vector.
Matrix14 covariance_matrix(double eta);
double min_eigenvalue(const Matrix14& m);

// Degrees of (T, d1 T, d2 T, That, d1 That, d2 That), derivatives normalized.
using ChaosDegrees = std::array<int, 6>;

struct ChaosTerm {
  ChaosDegrees degrees{};
  double weight = 0.0;  // coefficient divided by pi n
};

// Integral over the torus of the Hermite product, exact for total degree q when m >= 2 q ceil(sqrt n) + 1.
double chaos_integral(const FieldGrid& grid, const ChaosDegrees& degrees);

// Smallest grid exact for products of `degree` field factors.
int exact_grid_size(long n, int degree);

// Terms of the order-q projection built from the beta and alpha tables (q = 2 or 4).
std::vector<ChaosTerm> chaos_terms(int order);
// The fixed 22-term order-4 expansion (integer weights over 64).
const std::vector<ChaosTerm>& projection4_terms();

double projection0(const EnergyLevel& level);
// m = 0 selects the exact grid.
double projection2(const WaveSample& sample, int m = 0);
double projection4_exact(const WaveSample& sample);
double projection4_approx(const ChaosStatistics& stats, const EnergyLevel& level);
// Sum over chaos_terms(order) on the exact grid.
double projection_from_terms(const WaveSample& sample, int order);

// Both sides of the exact quartic identities for one sample.
struct QuarticIdentity {
  const char* name = "";
  double quadrature = 0.0;
  double coefficients = 0.0;
};
std::array<QuarticIdentity, 4> quartic_identities(const WaveSample& sample);

enum class LawKind { J, M };

struct LimitLaw {
  double eta = 0.0;
  LawKind kind = LawKind::J;
};

double sample_limit(const LimitLaw& law, RngStream& rng);
// (1+eta)/2 A + (1-eta)/2 B - 2 (C - 2) before normalization.
double sample_j_unnormalized(double eta, RngStream& rng);

using Cov3 = std::array<std::array<double, 3>, 3>;

// E[prod_j H_{p_j}(X_j(x)) H_{a_j}(X_j(y)) prod_k H_{q_k}(Y_k(x)) H_{b_k}(Y_k(y))] for two independent
// triples; cx[j][k] = E[X_j(x) X_k(y)], likewise cy. Block degrees are capped at 6.
double leonov_shiryaev_moment(const std::array<int, 3>& p, const std::array<int, 3>& a,
                              const std::array<int, 3>& q, const std::array<int, 3>& b,
                              const Cov3& cx, const Cov3& cy);

}  // namespace arw
