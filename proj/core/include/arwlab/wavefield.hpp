#pragma once

#include <array>
#include <complex>
#include <map>
#include <span>
#include <vector>

#include "arwlab/lattice.hpp"
#include "arwlab/rng.hpp"

namespace arw {

using TorusPoint = std::array<double, 2>;
using cplx = std::complex<double>;

struct FieldJet {
  double t = 0.0;
  double that = 0.0;
  std::array<double, 2> grad_t{};
  std::array<double, 2> grad_that{};
  // gradients times sqrt(2/E), unit variance per component
  std::array<double, 2> norm_grad_t{};
  std::array<double, 2> norm_grad_that{};
};

struct CovarianceJet {
  double r = 0.0;
  std::array<double, 2> grad{};
  double h11 = 0.0;
  double h12 = 0.0;
  double h22 = 0.0;
};

// One realization: coefficient families a and ahat aligned with level().points(),
// conjugate symmetric under lambda -> -lambda.
class WaveSample {
 public:
  WaveSample(LevelPtr level, std::vector<cplx> a, std::vector<cplx> ahat);

  const EnergyLevel& level() const { return *level_; }
  const LevelPtr& level_ptr() const { return level_; }
  std::span<const cplx> a() const { return a_; }
  std::span<const cplx> ahat() const { return ahat_; }
  // (a + i ahat) / sqrt(N): coefficients of Theta = T + i That.
  std::span<const cplx> theta_coefficients() const { return theta_; }

 private:
  LevelPtr level_;
  std::vector<cplx> a_;
  std::vector<cplx> ahat_;
  std::vector<cplx> theta_;
};

// One complex Gaussian (component variance 1/2) per antipodal pair,
// all of a first and then all of ahat, representatives in lattice order.
WaveSample sample_wave(LevelPtr level, RngStream& rng);

using Assignment = std::map<Frequency, cplx>;

// Fixture construction. Missing pairs are zero; a pair given on both sides
// must be conjugate-consistent.
WaveSample deterministic_wave(LevelPtr level, const Assignment& a, const Assignment& ahat = {});

FieldJet evaluate(const WaveSample& sample, TorusPoint x);

struct FieldGrid {
  int m = 0;
  std::vector<FieldJet> jets;  // jets[i * m + j] at (i/m, j/m)

  const FieldJet& at(int i, int j) const { return jets[static_cast<std::size_t>(i) * m + j]; }
};

// Bitwise equal to evaluate() at the same points.
FieldGrid evaluate_grid(const WaveSample& sample, int m);

// exp(2 pi i k x) with the argument reduced mod 1 first.
cplx axis_phase(int k, double x);

CovarianceJet covariance(const EnergyLevel& level, TorusPoint x);
// 1 - r and 1 + r without cancellation near the diagonal.
double one_minus_r(const EnergyLevel& level, TorusPoint x);
double one_plus_r(const EnergyLevel& level, TorusPoint x);

// Smallest 1 - |r| over a grid in the square |x1|,|x2| <= 1/(1000 sqrt n), origin excluded.
// Throws std::logic_error if that margin is not positive.
double origin_exclusion_check(const EnergyLevel& level, int half_points = 50);

}  // namespace arw
