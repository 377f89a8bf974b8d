#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace arw {

// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  // Unbiased sample variance.
  double variance() const;
  double stderr_mean() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double sample_mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);
double sample_covariance(std::span<const double> xs, std::span<const double> ys);
double sample_correlation(std::span<const double> xs, std::span<const double> ys);

// Standard error of the unbiased variance estimate, from the fourth central moment.
double variance_stderr(std::span<const double> xs);

// (x - mean) / sd with sample moments.
std::vector<double> standardize(std::span<const double> xs);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace arw
