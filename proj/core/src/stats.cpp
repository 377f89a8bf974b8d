#include "arwlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arw {

void RunningStats::add(double x) {
  ++n_;
  double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

double RunningStats::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::stderr_mean() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double sample_mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

double sample_covariance(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("sample_covariance: size mismatch");
  if (xs.size() < 2) return 0.0;
  double mx = sample_mean(xs);
  double my = sample_mean(ys);
  CompensatedSum s;
  for (std::size_t i = 0; i < xs.size(); ++i) s.add((xs[i] - mx) * (ys[i] - my));
  return s.value() / static_cast<double>(xs.size() - 1);
}

double sample_variance(std::span<const double> xs) { return sample_covariance(xs, xs); }

double sample_correlation(std::span<const double> xs, std::span<const double> ys) {
  return sample_covariance(xs, ys) / std::sqrt(sample_variance(xs) * sample_variance(ys));
}

double variance_stderr(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  if (n < 4) return 0.0;
  double m = sample_mean(xs);
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    double d = (x - m) * (x - m);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  return std::sqrt(std::max(0.0, (m4 - m2 * m2 * (n - 3.0) / (n - 1.0)) / n));
}

std::vector<double> standardize(std::span<const double> xs) {
  double m = sample_mean(xs);
  double sd = std::sqrt(sample_variance(xs));
  std::vector<double> out(xs.begin(), xs.end());
  for (double& x : out) x = sd > 0 ? (x - m) / sd : 0.0;
  return out;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

void CompensatedSum::add(double x) {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    carry_ += (sum_ - t) + x;
  else
    carry_ += (x - t) + sum_;
  sum_ = t;
}

}  // namespace arw
