#include "arwlab/kacrice.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "arwlab/errors.hpp"

namespace arw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e^{i t} - 1 - i t without cancellation
cplx expm1_minus_linear(double t) {
  double s = std::sin(0.5 * t);
  double re = -2.0 * s * s;
  double im;
  if (std::abs(t) < 0.5) {
    // sin t - t = -t^3/3! + t^5/5! - ...
    double t2 = t * t;
    double term = -t * t2 / 6.0;
    im = term;
    for (int k = 5; k < 40; k += 2) {
      term *= -t2 / ((k - 1.0) * k);
      im += term;
      if (std::abs(term) < 1e-18 * std::abs(im)) break;
    }
  } else {
    im = std::sin(t) - t;
  }
  return {re, im};
}

double one_minus_r2(const EnergyLevel& level, TorusPoint x) {
  return one_minus_r(level, x) * one_plus_r(level, x);
}

struct Conditional {
  Eigen::Matrix4d factor;  // C = F F^T for (grad T(x), grad T(0)) given T(x) = T(0) = 0
  double density = 0.0;    // density of the four field values at 0
};

Conditional conditional_law(const EnergyLevel& level, TorusPoint x) {
  const double q = one_minus_r2(level, x);
  if (q < 1e-9) throw ConditioningError("two_point_k2: 1 - r^2 below 1e-9");
  CovarianceJet cj = covariance(level, x);
  const double E = level.eigenvalue();
  const double r = cj.r;
  Eigen::Matrix4d S = Eigen::Matrix4d::Zero();
  S(0, 0) = S(1, 1) = S(2, 2) = S(3, 3) = 0.5 * E;
  const double hx[2][2] = {{cj.h11, cj.h12}, {cj.h12, cj.h22}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) S(i, 2 + j) = S(2 + j, i) = -hx[i][j];
  // cross covariance with (T(x), T(0))
  Eigen::Matrix<double, 4, 2> B;
  B << 0.0, cj.grad[0], 0.0, cj.grad[1], -cj.grad[0], 0.0, -cj.grad[1], 0.0;
  Eigen::Matrix2d inv;
  inv << 1.0, -r, -r, 1.0;
  inv /= q;
  Eigen::Matrix4d C = S - B * inv * B.transpose();
  C = 0.5 * (C + C.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(C);
  Eigen::Vector4d ev = es.eigenvalues();
  const double floor = -1e-10 * std::max(1.0, C.trace());
  for (int i = 0; i < 4; ++i) {
    if (ev(i) < floor) throw ConditioningError("conditional gradient covariance is not positive semidefinite");
    ev(i) = std::max(ev(i), 0.0);
  }
  Conditional out;
  out.factor = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
  out.density = 1.0 / (kTwoPi * kTwoPi * q);
  return out;
}

double jacobian_product(const Eigen::Matrix4d& F, const double* z1, const double* z2) {
  Eigen::Vector4d g = F * Eigen::Map<const Eigen::Vector4d>(z1);
  Eigen::Vector4d h = F * Eigen::Map<const Eigen::Vector4d>(z2);
  double jx = g(0) * h(1) - g(1) * h(0);
  double j0 = g(2) * h(3) - g(3) * h(2);
  return std::abs(jx) * std::abs(j0);
}

}  // namespace

ConditionalCovariance conditional_covariance(const EnergyLevel& level, TorusPoint x) {
  const double q = one_minus_r2(level, x);
  if (q < 1e-12) throw ConditioningError("conditional_covariance: 1 - r^2 below 1e-12");
  const double E = level.eigenvalue();
  CovarianceJet cj = covariance(level, x);
  ConditionalCovariance out;
  out.one_minus_r2 = q;
  out.psi_n = level.psi();
  out.omega = {0.5 * E - cj.grad[0] * cj.grad[0] / q, -cj.grad[0] * cj.grad[1] / q,
               0.5 * E - cj.grad[1] * cj.grad[1] / q};

  // Gram matrix of the column-reduced functionals, in long double
  const auto pts = level.points();
  std::vector<std::array<cplx, 4>> cols(pts.size());
  std::array<double, 4> scale{};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double t = kTwoPi * (pts[i].l1 * x[0] + pts[i].l2 * x[1]);
    cols[i] = {expm1_minus_linear(t), cplx(1.0, 0.0), cplx(0.0, kTwoPi * pts[i].l1),
               cplx(0.0, kTwoPi * pts[i].l2)};
    for (std::size_t a = 0; a < 4; ++a) scale[a] = std::max(scale[a], std::abs(cols[i][a]));
  }
  for (double& s : scale) s = s > 0 ? 1.0 / s : 1.0;
  Eigen::Matrix<long double, 4, 4> G = Eigen::Matrix<long double, 4, 4>::Zero();
  for (const auto& c : cols)
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) {
        cplx u = c[a] * scale[a];
        cplx v = c[b] * scale[b];
        G(static_cast<int>(a), static_cast<int>(b)) +=
            static_cast<long double>(u.real()) * v.real() + static_cast<long double>(u.imag()) * v.imag();
      }
  G /= static_cast<long double>(pts.size());
  long double det = G.fullPivLu().determinant();
  for (double s : scale) det /= static_cast<long double>(s) * s;
  out.det = static_cast<double>(det) / q;
  out.psi = out.det / q;
  return out;
}

K2Estimate two_point_k2(const EnergyLevel& level, TorusPoint x, long draws, RngStream& rng) {
  if (draws < 10'000) throw std::invalid_argument("two_point_k2: at least 1e4 draws required");
  Conditional law = conditional_law(level, x);
  double sum = 0.0, sum2 = 0.0;
  std::array<double, 8> z{};
  for (long d = 0; d < draws; ++d) {
    for (double& v : z) v = rng.normal();
    double f = jacobian_product(law.factor, z.data(), z.data() + 4);
    sum += f;
    sum2 += f * f;
  }
  const double n = static_cast<double>(draws);
  double mean = sum / n;
  double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1));
  return {law.density * mean, law.density * std::sqrt(var / n)};
}

K2Estimate factorial_moment_kac_rice(const EnergyLevel& level, double side, long draws, RngStream& rng,
                                     int nodes_per_axis) {
  if (draws < 10'000) throw std::invalid_argument("factorial_moment_kac_rice: at least 1e4 draws required");
  if (nodes_per_axis != 16) throw std::invalid_argument("factorial_moment_kac_rice: 16 nodes per axis supported");
  using Rule = boost::math::quadrature::gauss<double, 16>;
  // full rule on [0, side] from the symmetric abscissae on [-1, 1]
  std::vector<double> t, w;
  const auto& abs = Rule::abscissa();
  const auto& wts = Rule::weights();
  for (std::size_t k = 0; k < abs.size(); ++k)
    for (int sgn : {-1, 1}) {
      if (abs[k] == 0.0 && sgn < 0) continue;
      t.push_back(0.5 * side * (1.0 + sgn * abs[k]));
      w.push_back(0.5 * side * wts[k]);
    }
  struct Node {
    Conditional law;
    double weight;
  };
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) {
      double wt = 4.0 * w[i] * w[j] * (side - t[i]) * (side - t[j]);
      Conditional law = conditional_law(level, {t[i], t[j]});
      nodes.push_back({law, wt * law.density});
    }
  double sum = 0.0, sum2 = 0.0;
  std::array<double, 8> z{};
  for (long d = 0; d < draws; ++d) {
    for (double& v : z) v = rng.normal();
    double acc = 0.0;
    for (const auto& nd : nodes) acc += nd.weight * jacobian_product(nd.law.factor, z.data(), z.data() + 4);
    sum += acc;
    sum2 += acc * acc;
  }
  const double n = static_cast<double>(draws);
  double mean = sum / n;
  double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1));
  return {mean, std::sqrt(var / n)};
}

double factorial_moment_count(const std::vector<TorusPoint>& zeros, int tiles) {
  if (tiles < 1) throw std::invalid_argument("factorial_moment_count: tiles < 1");
  std::vector<long> counts(static_cast<std::size_t>(tiles) * tiles, 0);
  for (const auto& z : zeros) {
    auto i = std::min(tiles - 1, static_cast<int>(z[0] * tiles));
    auto j = std::min(tiles - 1, static_cast<int>(z[1] * tiles));
    ++counts[static_cast<std::size_t>(i) * tiles + static_cast<std::size_t>(j)];
  }
  double s = 0.0;
  for (long c : counts) s += static_cast<double>(c) * (c - 1);
  return s / static_cast<double>(counts.size());
}

std::vector<RadialRow> radial_scan(const EnergyLevel& level, double first, double last, int per_decade,
                                   long draws, RngStream& rng) {
  if (per_decade < 1 || last < first) throw std::invalid_argument("radial_scan: bad range");
  const double root = std::sqrt(static_cast<double>(level.n()));
  const double d = 1.0 / std::sqrt(2.0);
  const std::array<std::pair<const char*, std::array<double, 2>>, 3> dirs{
      {{"e1", {1.0, 0.0}}, {"e2", {0.0, 1.0}}, {"diag", {d, d}}}};
  std::vector<RadialRow> rows;
  const int steps = static_cast<int>(std::lround((last - first) * per_decade));
  for (const auto& [name, u] : dirs)
    for (int k = 0; k <= steps; ++k) {
      double radius = std::pow(10.0, -(first + static_cast<double>(k) / per_decade)) / root;
      TorusPoint x{radius * u[0], radius * u[1]};
      RadialRow row;
      row.x_norm = radius;
      row.direction = name;
      ConditionalCovariance cc = conditional_covariance(level, x);
      row.det_omega = cc.det;
      row.psi = cc.psi;
      K2Estimate k2 = two_point_k2(level, x, draws, rng);
      row.k2 = k2.value;
      row.k2_std_error = k2.std_error;
      rows.push_back(row);
    }
  return rows;
}

double taylor_ratio(const EnergyLevel& level, std::array<double, 2> u, double radius) {
  const double E = level.eigenvalue();
  ConditionalCovariance cc = conditional_covariance(level, {radius * u[0], radius * u[1]});
  return cc.det / (E * E * E * radius * radius);
}

}  // namespace arw
