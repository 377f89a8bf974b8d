#pragma once

#include <array>
#include <string>
#include <vector>

#include "arwlab/wavefield.hpp"

namespace arw {

struct ConditionalCovariance {
  std::array<double, 3> omega{};  // (o11, o12, o22)
  double det = 0.0;
  double psi = 0.0;     // det / (1 - r^2)
  double psi_n = 0.0;   // (1/(n^2 N)) sum l1^4
  double one_minus_r2 = 0.0;
};

// Covariance of grad T(0) given T(x) = T(0) = 0. The determinant comes from the Gram
// matrix of (T(x) - T(0) - x.grad T(0), T(0), grad T(0)), which stays accurate as x -> 0.
// Throws ConditioningError when 1 - r^2 < 1e-12.
ConditionalCovariance conditional_covariance(const EnergyLevel& level, TorusPoint x);

struct K2Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Two-point correlation of the zero set at separation x by Monte Carlo over the
// conditional Gaussian law of both Jacobians.
K2Estimate two_point_k2(const EnergyLevel& level, TorusPoint x, long draws, RngStream& rng);

// Integral of K2 over Q x Q for a square Q of the given side, i.e. E[I_Q (I_Q - 1)].
// Tensor Gauss-Legendre on one quadrant, common random numbers across nodes.
K2Estimate factorial_moment_kac_rice(const EnergyLevel& level, double side, long draws, RngStream& rng,
                                     int nodes_per_axis = 16);

// Mean of I_Q (I_Q - 1) over an aligned tiling of the torus by squares of side 1/tiles.
double factorial_moment_count(const std::vector<TorusPoint>& zeros, int tiles);

struct RadialRow {
  double x_norm = 0.0;
  std::string direction;
  double det_omega = 0.0;
  double psi = 0.0;
  double k2 = 0.0;
  double k2_std_error = 0.0;
};

// Log-spaced radii from 10^-first/sqrt(n) to 10^-last/sqrt(n) along (1,0), (0,1), (1,1)/sqrt 2.
std::vector<RadialRow> radial_scan(const EnergyLevel& level, double first, double last, int per_decade,
                                   long draws, RngStream& rng);

// det Omega(x) / (E^3 |x|^2) at |x| = radius along the unit direction u.
double taylor_ratio(const EnergyLevel& level, std::array<double, 2> u, double radius);

}  // namespace arw
