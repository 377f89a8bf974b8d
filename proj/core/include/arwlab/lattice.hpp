#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace arw {

struct Frequency {
  int l1 = 0;
  int l2 = 0;

  auto operator<=>(const Frequency&) const = default;
  Frequency operator-() const { return {-l1, -l2}; }
  long norm2() const { return static_cast<long>(l1) * l1 + static_cast<long>(l2) * l2; }
};

// Lattice points on the circle of radius sqrt(n), sorted lexicographically.
class EnergyLevel {
 public:
  long n() const { return n_; }
  std::span<const Frequency> points() const { return points_; }
  int multiplicity() const { return static_cast<int>(points_.size()); }
  // 4 pi^2 n
  double eigenvalue() const;

  // Position of f in points(), or -1.
  int index_of(Frequency f) const;
  // Index of the antipodal point -points()[i].
  int antipode(int i) const { return antipode_[static_cast<std::size_t>(i)]; }
  // One representative per antipodal pair: l2 > 0, or l2 == 0 and l1 > 0.
  bool is_representative(int i) const;
  // (1/(n^2 N)) sum l1^4
  double psi() const;

 private:
  friend std::optional<EnergyLevel> enumerate_level(long n);
  long n_ = 0;
  std::vector<Frequency> points_;
  std::vector<int> antipode_;
};

using LevelPtr = std::shared_ptr<const EnergyLevel>;

// All (l1, l2) with l1^2 + l2^2 = n, or nullopt when n is not a sum of two squares.
std::optional<EnergyLevel> enumerate_level(long n);
// Same, wrapped for sharing; throws std::invalid_argument when not representable.
LevelPtr make_level(long n);

// Fourier coefficient of the normalized point measure on the unit circle.
double mu_hat(const EnergyLevel& level, int k);

struct CorrelationCount {
  int order = 0;
  std::int64_t count = 0;
  double normalized_moment = 0.0;  // count / N^order
};

// Number of tuples in Lambda^order whose alternating-sign sum vanishes.
// Order 6 throws CapExceededError when N exceeds six_cap.
CorrelationCount correlation_count(const EnergyLevel& level, int order, int six_cap = 64);

// Representable integers in [lo, hi].
std::vector<long> representable_in(long lo, long hi);

}  // namespace arw
