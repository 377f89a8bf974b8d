#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "arwlab/chaos.hpp"
#include "arwlab/zerofinder.hpp"

namespace arw {

inline constexpr int kReportSchemaVersion = 1;

enum class Check { Mean, Variance, Distribution, ChaosIdentities, KacRice, NodalLength };

std::string check_name(Check c);
Check parse_check(const std::string& name);
// Comma separated list of check names.
std::set<Check> parse_checks(const std::string& list);

// Tolerances for the asymptotic and Monte Carlo checks.
struct AcceptanceBands {
  double mean_z = 4.0;
  double variance_low = 0.5;
  double variance_high = 2.0;
  double ks_max = 0.15;
  double nodal_relative = 0.01;
  double kacrice_relative = 0.15;
  double identity_tolerance = 1e-9;
  double projection2_tolerance = 1e-8;
  double max_invalid_fraction = 0.01;
};

struct ExperimentConfig {
  std::vector<long> n{25};
  long replications = 100;
  std::uint64_t master_seed = 42;
  std::optional<int> cells_per_axis;
  std::set<Check> checks{Check::Mean};
  std::string output_path;
  int threads = 1;
  AcceptanceBands bands;
  long limit_draws = 100'000;
  long kacrice_draws = 100'000;
  int nodal_grid_factor = 40;  // grid m = factor * ceil(sqrt n)

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

struct LevelRecord {
  long n = 0;
  int multiplicity = 0;
  double mu4 = 0.0;
  long replications = 0;
  long invalid_count = 0;
  double predicted_mean = 0.0;
  double predicted_var = 0.0;
  std::optional<double> mean_I;
  std::optional<double> stderr_mean;
  std::optional<double> var_I;
  std::optional<double> mean_I4_exact;
  std::optional<double> var_I4_exact;
  std::optional<double> var_residual;
  std::optional<double> ks_distance_J;
  std::optional<double> identity_max_abs_err;
  std::optional<double> projection2_max_abs;
  std::optional<double> mean_nodal_length;
  std::optional<double> stderr_nodal_length;
  std::optional<double> mean_nodal_length_hat;
  std::optional<double> predicted_nodal_length;
  std::optional<double> factorial_moment_mc;
  std::optional<double> factorial_moment_mc_stderr;
  std::optional<double> factorial_moment_kac_rice;
  std::optional<double> factorial_moment_kac_rice_stderr;
  std::optional<long> charge_violations;
  std::map<std::string, bool> checks;

  bool operator==(const LevelRecord&) const = default;
};

struct ReportMetadata {
  std::uint64_t seed = 0;
  std::string tool_version;
  double wall_seconds = 0.0;

  bool operator==(const ReportMetadata&) const = default;
};

struct ExperimentReport {
  std::vector<LevelRecord> levels;
  ReportMetadata metadata;

  bool all_passed() const;
  bool operator==(const ExperimentReport&) const = default;
};

// Per-replication outputs, exposed for tests and tools.
struct ReplicationResult {
  bool valid = true;
  long count = 0;
  int total_charge = 0;
  double projection4 = 0.0;
  double projection2 = 0.0;
  double identity_err = 0.0;
  double nodal_t = 0.0;
  double nodal_that = 0.0;
  double factorial_moment = 0.0;
};

// Zero set with one retry at doubled resolution; nullopt marks the replication invalid.
std::optional<ZeroSet> locate_zeros_with_retry(const WaveSample& sample, std::optional<int> cells_per_axis);

// Calls fn(i) for i in [0, count) on up to `threads` workers; rethrows the first failure.
void parallel_for(long count, int threads, const std::function<void(long)>& fn);

ExperimentReport run_experiment(const ExperimentConfig& config);

// d(mu) E^2 / N^2 with d(mu) = (3 mu^2 + 5) / (128 pi^2)
double predicted_variance(const EnergyLevel& level);

// Two-sample KS between standardized samples and draws from the law.
double distribution_distance(const std::vector<double>& samples, const LimitLaw& law, long draws, RngStream& rng);

nlohmann::json report_to_json(const ExperimentReport& r);
ExperimentReport report_from_json(const nlohmann::json& j);
std::string report_to_csv(const ExperimentReport& r);

// Writes path (JSON) and the CSV summary next to it.
void persist(const ExperimentReport& report, const std::string& path);
ExperimentReport load(const std::string& path);
std::string csv_path_for(const std::string& json_path);

const char* tool_version();

}  // namespace arw
