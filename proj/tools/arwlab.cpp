#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "arwlab/chaos.hpp"
#include "arwlab/errors.hpp"
#include "arwlab/harness.hpp"
#include "arwlab/kacrice.hpp"

using namespace arw;

namespace {

std::vector<long> parse_levels(const std::string& s) {
  std::vector<long> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stol(item));
  return out;
}

std::pair<long, long> parse_range(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--range", "expected lo:hi");
  return {std::stol(s.substr(0, colon)), std::stol(s.substr(colon + 1))};
}

// path for level n when several levels share one output flag
std::string per_level_path(const std::string& path, long n, bool several) {
  if (!several) return path;
  auto dot = path.rfind('.');
  std::string tag = "_n" + std::to_string(n);
  return dot == std::string::npos ? path + tag : path.substr(0, dot) + tag + path.substr(dot);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  return out;
}

// Zeros and grid of replication 0, same stream as the experiment.
void dump_first_replication(const ExperimentConfig& cfg, const std::string& zeros_csv, const std::string& grid_csv,
                            int grid_m) {
  const bool several = cfg.n.size() > 1;
  for (long n : cfg.n) {
    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(n), 0, kTagWave);
    WaveSample s = sample_wave(make_level(n), rng);
    if (!zeros_csv.empty()) {
      auto out = open_out(per_level_path(zeros_csv, n, several));
      out << "x1,x2,charge,detjac\n";
      auto zs = locate_zeros_with_retry(s, cfg.cells_per_axis);
      if (zs)
        for (const auto& z : zs->zeros)
          out << z.position[0] << ',' << z.position[1] << ',' << z.charge << ',' << z.jacobian_det << '\n';
    }
    if (!grid_csv.empty()) {
      auto out = open_out(per_level_path(grid_csv, n, several));
      out << "x1,x2,t,that,dt1,dt2,dth1,dth2\n";
      FieldGrid g = evaluate_grid(s, grid_m);
      for (int i = 0; i < g.m; ++i)
        for (int j = 0; j < g.m; ++j) {
          const auto& p = g.at(i, j);
          out << static_cast<double>(i) / g.m << ',' << static_cast<double>(j) / g.m << ',' << p.t << ','
              << p.that << ',' << p.grad_t[0] << ',' << p.grad_t[1] << ',' << p.grad_that[0] << ','
              << p.grad_that[1] << '\n';
        }
    }
  }
}

int run_chaos_check(long n, long reps, std::uint64_t seed) {
  auto level = make_level(n);
  const char* names[] = {"quartic_i", "quartic_iv", "quartic_v", "quartic_viii", "projection2", "projection4_terms"};
  const double tol[] = {1e-9, 1e-9, 1e-9, 1e-9, 1e-8, 1e-9};
  double worst[6] = {};
  for (long r = 0; r < reps; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r), kTagWave);
    WaveSample s = sample_wave(level, rng);
    auto ids = quartic_identities(s);
    for (int k = 0; k < 4; ++k) worst[k] = std::max(worst[k], std::abs(ids[k].quadrature - ids[k].coefficients));
    worst[4] = std::max(worst[4], std::abs(projection2(s)));
    double p4 = projection4_exact(s);
    worst[5] = std::max(worst[5], std::abs(projection_from_terms(s, 4) - p4) / std::max(1.0, std::abs(p4)));
  }
  bool all = true;
  std::printf("check,n,samples,max_abs_err,pass\n");
  for (int k = 0; k < 6; ++k) {
    bool ok = worst[k] <= tol[k];
    all = all && ok;
    std::printf("%s,%ld,%ld,%.3e,%s\n", names[k], n, reps, worst[k], ok ? "true" : "false");
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arithmetic random wave laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo experiment over one or more levels");
  std::string n_list, checks = "mean", out_path, config_path, zeros_csv, grid_csv;
  long reps = 100;
  std::uint64_t seed = 42;
  int threads = 1, cells = 0, grid_m = 64;
  sim->add_option("--n", n_list, "level(s), comma separated");
  sim->add_option("--reps", reps, "replications per level")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--checks", checks, "mean,variance,distribution,chaos-identities,kacrice,nodal-length");
  sim->add_option("--out", out_path, "report path (JSON; CSV written alongside)");
  sim->add_option("--threads", threads)->check(CLI::PositiveNumber);
  sim->add_option("--cells", cells, "zero finder cells per axis");
  sim->add_option("--config", config_path, "JSON config with the same fields as the flags")
      ->check(CLI::ExistingFile);
  sim->add_option("--zeros-csv", zeros_csv, "zeros of replication 0: x1,x2,charge,detjac");
  sim->add_option("--dump-grid", grid_csv, "field grid of replication 0");
  sim->add_option("--grid-m", grid_m, "grid size for --dump-grid")->check(CLI::PositiveNumber);

  // lattice
  auto* lat = app.add_subcommand("lattice", "Level summary rows: n,multiplicity,mu4,s4,s6");
  std::string range = "1:100";
  int six_cap = 64;
  lat->add_option("--range", range, "lo:hi");
  lat->add_option("--six-cap", six_cap, "largest multiplicity for the order-6 count");

  // chaos-check
  auto* cc = app.add_subcommand("chaos-check", "Exact chaos identities on random samples");
  long cc_n = 25, cc_reps = 200;
  std::uint64_t cc_seed = 42;
  cc->add_option("--n", cc_n);
  cc->add_option("--reps", cc_reps)->check(CLI::PositiveNumber);
  cc->add_option("--seed", cc_seed);

  // kacrice
  auto* kr = app.add_subcommand("kacrice", "Radial scan of the conditional covariance and two-point function");
  long kr_n = 25, kr_draws = 20000;
  double first = 1, last = 4;
  int per_decade = 2;
  std::uint64_t kr_seed = 42;
  kr->add_option("--n", kr_n);
  kr->add_option("--first", first, "largest radius is 10^-first / sqrt(n)");
  kr->add_option("--last", last, "smallest radius is 10^-last / sqrt(n)");
  kr->add_option("--per-decade", per_decade)->check(CLI::PositiveNumber);
  kr->add_option("--draws", kr_draws);
  kr->add_option("--seed", kr_seed);

  // report
  auto* rep = app.add_subcommand("report", "Print a saved report");
  std::string in_path, format = "csv";
  rep->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  rep->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      ExperimentConfig cfg;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        cfg = config_from_json(nlohmann::json::parse(in));
      }
      if (sim->count("--n")) cfg.n = parse_levels(n_list);
      if (sim->count("--reps")) cfg.replications = reps;
      if (sim->count("--seed")) cfg.master_seed = seed;
      if (sim->count("--checks")) cfg.checks = parse_checks(checks);
      if (sim->count("--out")) cfg.output_path = out_path;
      if (sim->count("--threads")) cfg.threads = threads;
      if (sim->count("--cells")) cfg.cells_per_axis = cells;
      cfg.validate();
      if (!zeros_csv.empty() || !grid_csv.empty()) dump_first_replication(cfg, zeros_csv, grid_csv, grid_m);
      ExperimentReport report = run_experiment(cfg);
      if (!cfg.output_path.empty()) persist(report, cfg.output_path);
      std::cout << report_to_csv(report);
      return report.all_passed() ? 0 : 1;
    }
    if (*lat) {
      auto [lo, hi] = parse_range(range);
      std::printf("n,multiplicity,mu4,s4,s6\n");
      for (long n : representable_in(lo, hi)) {
        auto level = make_level(n);
        auto s4 = correlation_count(*level, 4).count;
        std::string s6;
        if (level->multiplicity() <= six_cap) s6 = std::to_string(correlation_count(*level, 6, six_cap).count);
        std::printf("%ld,%d,%.17g,%lld,%s\n", n, level->multiplicity(), mu_hat(*level, 4),
                    static_cast<long long>(s4), s6.c_str());
      }
      return 0;
    }
    if (*cc) return run_chaos_check(cc_n, cc_reps, cc_seed);
    if (*kr) {
      auto level = make_level(kr_n);
      RngStream rng(kr_seed, static_cast<std::uint64_t>(kr_n), 0, kTagKacRice);
      std::printf("x_norm,direction,det_omega,psi,k2,k2_stderr\n");
      for (const auto& row : radial_scan(*level, first, last, per_decade, kr_draws, rng))
        std::printf("%.6e,%s,%.10e,%.10e,%.10e,%.3e\n", row.x_norm, row.direction.c_str(), row.det_omega, row.psi,
                    row.k2, row.k2_std_error);
      return 0;
    }
    if (*rep) {
      ExperimentReport r = load(in_path);
      if (format == "json")
        std::cout << report_to_json(r).dump(2) << '\n';
      else
        std::cout << report_to_csv(r);
      return r.all_passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "arwlab: %s\n", e.what());
    return 2;
  }
  return 0;
}
