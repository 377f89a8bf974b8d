#include "arwlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "arwlab/errors.hpp"

namespace arw {

namespace {

long isqrt(long n) {
  auto r = static_cast<long>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint64_t pack(long a, long b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

double EnergyLevel::eigenvalue() const {
  return 4.0 * std::numbers::pi * std::numbers::pi * static_cast<double>(n_);
}

int EnergyLevel::index_of(Frequency f) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), f);
  if (it == points_.end() || *it != f) return -1;
  return static_cast<int>(it - points_.begin());
}

bool EnergyLevel::is_representative(int i) const {
  const auto& p = points_[static_cast<std::size_t>(i)];
  return p.l2 > 0 || (p.l2 == 0 && p.l1 > 0);
}

double EnergyLevel::psi() const {
  double s = 0.0;
  for (const auto& p : points_) {
    double x = p.l1;
    s += x * x * x * x;
  }
  double nn = static_cast<double>(n_);
  return s / (nn * nn * multiplicity());
}

std::optional<EnergyLevel> enumerate_level(long n) {
  if (n < 1) throw std::invalid_argument("enumerate_level: n must be >= 1");
  EnergyLevel level;
  level.n_ = n;
  long root = isqrt(n);
  for (long a = -root; a <= root; ++a) {
    long rest = n - a * a;
    long b = isqrt(rest);
    if (b * b != rest) continue;
    level.points_.push_back({static_cast<int>(a), static_cast<int>(-b)});
    if (b != 0) level.points_.push_back({static_cast<int>(a), static_cast<int>(b)});
  }
  if (level.points_.empty()) return std::nullopt;
  std::sort(level.points_.begin(), level.points_.end());
  level.antipode_.resize(level.points_.size());
  for (std::size_t i = 0; i < level.points_.size(); ++i)
    level.antipode_[i] = level.index_of(-level.points_[i]);
  return level;
}

LevelPtr make_level(long n) {
  auto level = enumerate_level(n);
  if (!level) throw std::invalid_argument(std::to_string(n) + " is not a sum of two squares");
  return std::make_shared<const EnergyLevel>(std::move(*level));
}

double mu_hat(const EnergyLevel& level, int k) {
  if (k < 0) k = -k;  // the measure is symmetric under conjugation
  double scale = std::sqrt(static_cast<double>(level.n()));
  std::complex<double> sum = 0.0;
  for (const auto& p : level.points()) {
    std::complex<double> z(p.l1 / scale, p.l2 / scale);
    std::complex<double> w = 1.0;
    for (int j = 0; j < k; ++j) w *= z;
    sum += w;
  }
  sum /= static_cast<double>(level.multiplicity());
  if (std::abs(sum.imag()) > 1e-12)
    throw std::logic_error("mu_hat: imaginary residue " + std::to_string(sum.imag()));
  return sum.real();
}

CorrelationCount correlation_count(const EnergyLevel& level, int order, int six_cap) {
  const auto pts = level.points();
  const long n = level.n();
  const std::int64_t N = level.multiplicity();
  CorrelationCount out;
  out.order = order;
  if (order == 4) {
    // l1 - l2 + l3 - l4 = 0: the fourth point is determined and must lie on the circle
    std::int64_t count = 0;
    for (const auto& a : pts)
      for (const auto& b : pts)
        for (const auto& c : pts) {
          long x = static_cast<long>(a.l1) - b.l1 + c.l1;
          long y = static_cast<long>(a.l2) - b.l2 + c.l2;
          if (x * x + y * y == n) ++count;
        }
    if (count != 3 * N * (N - 1))
      throw std::logic_error("correlation_count: order-4 count differs from 3N(N-1)");
    out.count = count;
  } else if (order == 6) {
    if (N > six_cap)
      throw CapExceededError("order-6 count needs N <= " + std::to_string(six_cap) + ", got " +
                             std::to_string(N));
    std::unordered_map<std::uint64_t, std::int64_t> sums;
    sums.reserve(static_cast<std::size_t>(N * N * N));
    for (const auto& a : pts)
      for (const auto& b : pts)
        for (const auto& c : pts)
          ++sums[pack(static_cast<long>(a.l1) - b.l1 + c.l1, static_cast<long>(a.l2) - b.l2 + c.l2)];
    std::int64_t count = 0;
    for (const auto& [key, k] : sums) count += k * k;
    out.count = count;
  } else {
    throw std::invalid_argument("correlation_count: order must be 4 or 6");
  }
  out.normalized_moment = static_cast<double>(out.count) / std::pow(static_cast<double>(N), order);
  return out;
}

std::vector<long> representable_in(long lo, long hi) {
  std::vector<long> out;
  for (long n = std::max(lo, 1L); n <= hi; ++n)
    if (enumerate_level(n)) out.push_back(n);
  return out;
}

}  // namespace arw
