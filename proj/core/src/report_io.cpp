#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "arwlab/errors.hpp"
#include "arwlab/harness.hpp"

namespace arw {

namespace {

using nlohmann::json;

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <class T>
void get(const json& j, const char* key, std::optional<T>& v) {
  if (!j.contains(key)) throw SchemaError(std::string("report: missing field ") + key);
  v = j[key].is_null() ? std::nullopt : std::optional<T>(j[key].get<T>());
}

template <class T>
void get(const json& j, const char* key, T& v) {
  if (!j.contains(key)) throw SchemaError(std::string("report: missing field ") + key);
  v = j[key].get<T>();
}

#define ARW_OPTIONAL_FIELDS(X)                                                                               \
  X(mean_I) X(stderr_mean) X(var_I) X(mean_I4_exact) X(var_I4_exact) X(var_residual) X(ks_distance_J)        \
  X(identity_max_abs_err) X(projection2_max_abs) X(mean_nodal_length) X(stderr_nodal_length)                 \
  X(mean_nodal_length_hat) X(predicted_nodal_length) X(factorial_moment_mc) X(factorial_moment_mc_stderr)    \
  X(factorial_moment_kac_rice) X(factorial_moment_kac_rice_stderr) X(charge_violations)

json level_to_json(const LevelRecord& r) {
  json j;
  j["n"] = r.n;
  j["multiplicity"] = r.multiplicity;
  j["mu4"] = r.mu4;
  j["replications"] = r.replications;
  j["invalid_count"] = r.invalid_count;
  j["predicted_mean"] = r.predicted_mean;
  j["predicted_var"] = r.predicted_var;
#define X(f) put(j, #f, r.f);
  ARW_OPTIONAL_FIELDS(X)
#undef X
  j["checks"] = r.checks;
  return j;
}

LevelRecord level_from_json(const json& j) {
  LevelRecord r;
  get(j, "n", r.n);
  get(j, "multiplicity", r.multiplicity);
  get(j, "mu4", r.mu4);
  get(j, "replications", r.replications);
  get(j, "invalid_count", r.invalid_count);
  get(j, "predicted_mean", r.predicted_mean);
  get(j, "predicted_var", r.predicted_var);
#define X(f) get(j, #f, r.f);
  ARW_OPTIONAL_FIELDS(X)
#undef X
  get(j, "checks", r.checks);
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

template <class T>
std::string fmt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>)
    return fmt(static_cast<double>(*v));
  else
    return std::to_string(*v);
}

}  // namespace

json report_to_json(const ExperimentReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["metadata"] = {{"seed", r.metadata.seed},
                   {"tool_version", r.metadata.tool_version},
                   {"wall_seconds", r.metadata.wall_seconds}};
  j["levels"] = json::array();
  for (const auto& l : r.levels) j["levels"].push_back(level_to_json(l));
  return j;
}

ExperimentReport report_from_json(const json& j) {
  if (!j.is_object() || !j.contains("schema_version")) throw SchemaError("report: no schema_version");
  int v = j["schema_version"].get<int>();
  if (v != kReportSchemaVersion)
    throw SchemaError("report: schema version " + std::to_string(v) + " is not supported (expected " +
                      std::to_string(kReportSchemaVersion) + ")");
  ExperimentReport r;
  const auto& m = j.at("metadata");
  get(m, "seed", r.metadata.seed);
  get(m, "tool_version", r.metadata.tool_version);
  get(m, "wall_seconds", r.metadata.wall_seconds);
  for (const auto& l : j.at("levels")) r.levels.push_back(level_from_json(l));
  return r;
}

std::string report_to_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "n,multiplicity,mu4,replications,invalid_count,mean_I,stderr_mean,predicted_mean,var_I,var_I4_exact,"
        "predicted_var,ks_distance_J,mean_nodal_length,predicted_nodal_length,factorial_moment_mc,"
        "factorial_moment_kac_rice,passed\n";
  for (const auto& l : r.levels) {
    bool ok = true;
    for (const auto& [k, v] : l.checks) ok = ok && v;
    os << l.n << ',' << l.multiplicity << ',' << fmt(l.mu4) << ',' << l.replications << ',' << l.invalid_count << ','
       << fmt(l.mean_I) << ',' << fmt(l.stderr_mean) << ',' << fmt(l.predicted_mean) << ',' << fmt(l.var_I) << ','
       << fmt(l.var_I4_exact) << ',' << fmt(l.predicted_var) << ',' << fmt(l.ks_distance_J) << ','
       << fmt(l.mean_nodal_length) << ',' << fmt(l.predicted_nodal_length) << ',' << fmt(l.factorial_moment_mc)
       << ',' << fmt(l.factorial_moment_kac_rice) << ',' << (ok ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string csv_path_for(const std::string& json_path) {
  auto dot = json_path.find_last_of('.');
  auto slash = json_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return json_path + ".csv";
  return json_path.substr(0, dot) + ".csv";
}

void persist(const ExperimentReport& report, const std::string& path) {
  std::ofstream js(path);
  if (!js) throw std::runtime_error("persist: cannot open " + path);
  js << report_to_json(report).dump(2) << '\n';
  if (!js) throw std::runtime_error("persist: write failed for " + path);
  std::ofstream cs(csv_path_for(path));
  if (!cs) throw std::runtime_error("persist: cannot open " + csv_path_for(path));
  cs << report_to_csv(report);
}

ExperimentReport load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("load: malformed JSON: ") + e.what());
  }
  return report_from_json(j);
}

}  // namespace arw
