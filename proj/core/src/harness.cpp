#include "arwlab/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "arwlab/errors.hpp"
#include "arwlab/kacrice.hpp"
#include "arwlab/stats.hpp"

namespace arw {

namespace {

const std::map<Check, std::string>& check_names() {
  static const std::map<Check, std::string> names{
      {Check::Mean, "mean"},
      {Check::Variance, "variance"},
      {Check::Distribution, "distribution"},
      {Check::ChaosIdentities, "chaos-identities"},
      {Check::KacRice, "kacrice"},
      {Check::NodalLength, "nodal-length"},
  };
  return names;
}

int ceil_sqrt(long n) { return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-9)); }

}  // namespace

const char* tool_version() {
#ifdef ARWLAB_VERSION
  return ARWLAB_VERSION;
#else
  return "dev";
#endif
}

std::string check_name(Check c) { return check_names().at(c); }

Check parse_check(const std::string& name) {
  for (const auto& [c, s] : check_names())
    if (s == name) return c;
  throw std::invalid_argument("unknown check '" + name + "'");
}

std::set<Check> parse_checks(const std::string& list) {
  std::set<Check> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(parse_check(item));
  return out;
}

void ExperimentConfig::validate() const {
  if (n.empty()) throw std::invalid_argument("config: no level given");
  for (long v : n) {
    if (v < 1 || !enumerate_level(v)) throw std::invalid_argument("config: n=" + std::to_string(v) + " is not a sum of two squares");
  }
  if (replications < 1) throw std::invalid_argument("config: replications must be >= 1");
  if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  if (checks.count(Check::Distribution) && replications < 100)
    throw std::invalid_argument("config: the distribution check needs at least 100 replications");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (j.contains("n")) {
    c.n.clear();
    if (j["n"].is_array())
      for (const auto& v : j["n"]) c.n.push_back(v.get<long>());
    else
      c.n.push_back(j["n"].get<long>());
  }
  if (j.contains("reps")) c.replications = j["reps"].get<long>();
  if (j.contains("seed")) c.master_seed = j["seed"].get<std::uint64_t>();
  if (j.contains("cells") && !j["cells"].is_null()) c.cells_per_axis = j["cells"].get<int>();
  if (j.contains("checks")) {
    c.checks.clear();
    if (j["checks"].is_string())
      c.checks = parse_checks(j["checks"].get<std::string>());
    else
      for (const auto& v : j["checks"]) c.checks.insert(parse_check(v.get<std::string>()));
  }
  if (j.contains("out")) c.output_path = j["out"].get<std::string>();
  if (j.contains("threads")) c.threads = j["threads"].get<int>();
  if (j.contains("limit_draws")) c.limit_draws = j["limit_draws"].get<long>();
  if (j.contains("kacrice_draws")) c.kacrice_draws = j["kacrice_draws"].get<long>();
  if (j.contains("nodal_grid_factor")) c.nodal_grid_factor = j["nodal_grid_factor"].get<int>();
  if (j.contains("bands")) {
    const auto& b = j["bands"];
    auto& d = c.bands;
    d.mean_z = b.value("mean_z", d.mean_z);
    d.variance_low = b.value("variance_low", d.variance_low);
    d.variance_high = b.value("variance_high", d.variance_high);
    d.ks_max = b.value("ks_max", d.ks_max);
    d.nodal_relative = b.value("nodal_relative", d.nodal_relative);
    d.kacrice_relative = b.value("kacrice_relative", d.kacrice_relative);
    d.identity_tolerance = b.value("identity_tolerance", d.identity_tolerance);
    d.projection2_tolerance = b.value("projection2_tolerance", d.projection2_tolerance);
    d.max_invalid_fraction = b.value("max_invalid_fraction", d.max_invalid_fraction);
  }
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["n"] = c.n;
  j["reps"] = c.replications;
  j["seed"] = c.master_seed;
  j["cells"] = c.cells_per_axis ? nlohmann::json(*c.cells_per_axis) : nlohmann::json(nullptr);
  std::vector<std::string> names;
  for (Check k : c.checks) names.push_back(check_name(k));
  j["checks"] = names;
  j["out"] = c.output_path;
  j["threads"] = c.threads;
  j["limit_draws"] = c.limit_draws;
  j["kacrice_draws"] = c.kacrice_draws;
  j["nodal_grid_factor"] = c.nodal_grid_factor;
  const auto& b = c.bands;
  j["bands"] = {{"mean_z", b.mean_z},
                {"variance_low", b.variance_low},
                {"variance_high", b.variance_high},
                {"ks_max", b.ks_max},
                {"nodal_relative", b.nodal_relative},
                {"kacrice_relative", b.kacrice_relative},
                {"identity_tolerance", b.identity_tolerance},
                {"projection2_tolerance", b.projection2_tolerance},
                {"max_invalid_fraction", b.max_invalid_fraction}};
  return j;
}

bool ExperimentReport::all_passed() const {
  for (const auto& l : levels)
    for (const auto& [name, ok] : l.checks)
      if (!ok) return false;
  return true;
}

std::optional<ZeroSet> locate_zeros_with_retry(const WaveSample& sample, std::optional<int> cells_per_axis) {
  ZeroFinderOptions opt;
  opt.cells_per_axis = cells_per_axis.value_or(default_cells_per_axis(sample.level().n()));
  try {
    return locate_zeros(sample, opt);
  } catch (const UnresolvedCellError&) {
  }
  opt.cells_per_axis *= 2;
  try {
    return locate_zeros(sample, opt);
  } catch (const UnresolvedCellError&) {
    return std::nullopt;
  }
}

void parallel_for(long count, int threads, const std::function<void(long)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex guard;
  auto worker = [&] {
    for (;;) {
      long i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int workers = static_cast<int>(std::min<long>(threads, count));
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double predicted_variance(const EnergyLevel& level) {
  const double mu = mu_hat(level, 4);
  const double d = (3.0 * mu * mu + 5.0) / (128.0 * std::numbers::pi * std::numbers::pi);
  const double ratio = level.eigenvalue() / level.multiplicity();
  return d * ratio * ratio;
}

double distribution_distance(const std::vector<double>& samples, const LimitLaw& law, long draws, RngStream& rng) {
  if (samples.size() < 100) throw std::invalid_argument("distribution_distance: need at least 100 samples");
  if (draws < 1) throw std::invalid_argument("distribution_distance: draws must be positive");
  std::vector<double> ref(static_cast<std::size_t>(draws));
  for (double& v : ref) v = sample_limit(law, rng);
  return ks_two_sample(standardize(samples), std::move(ref));
}

namespace {

ReplicationResult run_replication(const ExperimentConfig& cfg, const LevelPtr& level, long rep) {
  const auto& checks = cfg.checks;
  const long n = level->n();
  RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep), kTagWave);
  WaveSample sample = sample_wave(level, rng);
  ReplicationResult out;
  const bool need_zeros = checks.count(Check::Mean) || checks.count(Check::Variance) || checks.count(Check::KacRice);
  if (need_zeros) {
    auto zs = locate_zeros_with_retry(sample, cfg.cells_per_axis);
    if (!zs) {
      out.valid = false;
      return out;
    }
    out.count = static_cast<long>(zs->count());
    out.total_charge = zs->total_charge();
    if (checks.count(Check::KacRice)) {
      std::vector<TorusPoint> pos;
      for (const auto& z : zs->zeros) pos.push_back(z.position);
      out.factorial_moment = factorial_moment_count(pos, default_cells_per_axis(n));
    }
  }
  if (checks.count(Check::Variance) || checks.count(Check::Distribution)) out.projection4 = projection4_exact(sample);
  if (checks.count(Check::ChaosIdentities)) {
    for (const auto& id : quartic_identities(sample))
      out.identity_err = std::max(out.identity_err, std::abs(id.quadrature - id.coefficients));
    out.projection2 = projection2(sample);
  }
  if (checks.count(Check::NodalLength)) {
    const int m = cfg.nodal_grid_factor * ceil_sqrt(n);
    out.nodal_t = nodal_length(sample, Component::T, m).length;
    out.nodal_that = nodal_length(sample, Component::That, m).length;
  }
  return out;
}

LevelRecord aggregate(const ExperimentConfig& cfg, const LevelPtr& level, const std::vector<ReplicationResult>& reps) {
  const auto& checks = cfg.checks;
  const auto& bands = cfg.bands;
  LevelRecord rec;
  rec.n = level->n();
  rec.multiplicity = level->multiplicity();
  rec.mu4 = mu_hat(*level, 4);
  rec.replications = static_cast<long>(reps.size());
  rec.predicted_mean = projection0(*level);
  rec.predicted_var = predicted_variance(*level);

  std::vector<double> counts, p4, resid, nodal, nodal_hat, fm;
  long charge_bad = 0;
  double id_err = 0.0, p2 = 0.0;
  for (const auto& r : reps) {
    if (!r.valid) {
      ++rec.invalid_count;
      continue;
    }
    counts.push_back(static_cast<double>(r.count));
    p4.push_back(r.projection4);
    resid.push_back(static_cast<double>(r.count) - rec.predicted_mean - r.projection4);
    nodal.push_back(r.nodal_t);
    nodal_hat.push_back(r.nodal_that);
    fm.push_back(r.factorial_moment);
    if (r.total_charge != 0) ++charge_bad;
    id_err = std::max(id_err, r.identity_err);
    p2 = std::max(p2, std::abs(r.projection2));
  }
  const double valid = static_cast<double>(counts.size());
  const bool zeros = checks.count(Check::Mean) || checks.count(Check::Variance) || checks.count(Check::KacRice);
  if (zeros) {
    rec.checks["valid-fraction"] =
        static_cast<double>(rec.invalid_count) <= bands.max_invalid_fraction * static_cast<double>(rec.replications);
    rec.charge_violations = charge_bad;
    rec.checks["charge-neutrality"] = charge_bad == 0;
    rec.mean_I = sample_mean(counts);
    rec.stderr_mean = valid > 1 ? std::sqrt(sample_variance(counts) / valid) : 0.0;
    rec.var_I = sample_variance(counts);
  }
  if (checks.count(Check::Mean))
    rec.checks["mean"] = std::abs(*rec.mean_I - rec.predicted_mean) <= bands.mean_z * *rec.stderr_mean;
  if (checks.count(Check::Variance) || checks.count(Check::Distribution)) {
    rec.mean_I4_exact = sample_mean(p4);
    rec.var_I4_exact = sample_variance(p4);
  }
  if (checks.count(Check::Variance)) {
    rec.var_residual = sample_variance(resid);
    double ratio = *rec.var_I / rec.predicted_var;
    rec.checks["variance"] = ratio >= bands.variance_low && ratio <= bands.variance_high;
  }
  if (checks.count(Check::Distribution)) {
    RngStream law_rng(cfg.master_seed, static_cast<std::uint64_t>(rec.n), 0, kTagLimitLaw);
    rec.ks_distance_J = distribution_distance(p4, {std::abs(rec.mu4), LawKind::J}, cfg.limit_draws, law_rng);
    rec.checks["distribution"] = *rec.ks_distance_J <= bands.ks_max;
  }
  if (checks.count(Check::ChaosIdentities)) {
    rec.identity_max_abs_err = id_err;
    rec.projection2_max_abs = p2;
    rec.checks["chaos-identities"] = id_err <= bands.identity_tolerance && p2 <= bands.projection2_tolerance;
  }
  if (checks.count(Check::NodalLength)) {
    rec.mean_nodal_length = sample_mean(nodal);
    rec.stderr_nodal_length = std::sqrt(sample_variance(nodal) / valid);
    rec.mean_nodal_length_hat = sample_mean(nodal_hat);
    rec.predicted_nodal_length = std::sqrt(level->eigenvalue()) / (2.0 * std::numbers::sqrt2);
    rec.checks["nodal-length"] =
        std::abs(*rec.mean_nodal_length - *rec.predicted_nodal_length) <= bands.nodal_relative * *rec.predicted_nodal_length;
  }
  if (checks.count(Check::KacRice)) {
    rec.factorial_moment_mc = sample_mean(fm);
    rec.factorial_moment_mc_stderr = std::sqrt(sample_variance(fm) / valid);
    RngStream kr_rng(cfg.master_seed, static_cast<std::uint64_t>(rec.n), 0, kTagKacRice);
    K2Estimate k = factorial_moment_kac_rice(*level, 1.0 / default_cells_per_axis(rec.n), cfg.kacrice_draws, kr_rng);
    rec.factorial_moment_kac_rice = k.value;
    rec.factorial_moment_kac_rice_stderr = k.std_error;
    rec.checks["kacrice"] = std::abs(*rec.factorial_moment_mc - k.value) <= bands.kacrice_relative * k.value;
  }
  return rec;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  for (long n : config.n) {
    LevelPtr level = make_level(n);
    std::vector<ReplicationResult> reps(static_cast<std::size_t>(config.replications));
    parallel_for(config.replications, config.threads,
                 [&](long r) { reps[static_cast<std::size_t>(r)] = run_replication(config, level, r); });
    report.levels.push_back(aggregate(config, level, reps));
  }
  report.metadata.seed = config.master_seed;
  report.metadata.tool_version = tool_version();
  report.metadata.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace arw
