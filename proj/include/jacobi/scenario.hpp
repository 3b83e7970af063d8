#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jacobi/dynamics.hpp"

namespace jacobi {

enum class ScenarioMode { Flow, MapCheck };

// Flat `key = value` document. Vectors are whitespace-separated numbers;
// `probe_list` holds points separated by ';'. '#' starts a comment.
struct ScenarioConfig {
  ScenarioMode mode = ScenarioMode::Flow;
  std::string system = "harmonic_oscillator";
  int n = 1;
  SystemParams params;
  std::optional<Vec> q0;          // default: all ones
  std::optional<Vec> p0;          // default: all zeros
  std::optional<double> eps0;     // default: H(q0, p0, t0)
  double t0 = 0.0;
  double t_end = 5.0;
  double dt = 1e-3;
  Method method = Method::RK4;
  std::size_t probes = 20;
  std::vector<Vec> probe_list;
  std::uint64_t seed = 1;
  std::size_t jacobian_stride = 10;
  std::string map = "identity";
  double map_param = 0.5;
  std::string trajectory_csv = "trajectory.csv";
  std::string invariance_json = "invariance.json";
  std::string ledger_json = "ledger.json";
  double tol_omega = kFiniteDiffTol;
  double tol_lambda = kFiniteDiffTol;
  double tol_flow_omega = kFiniteDiffTol;
  double tol_flow_lambda = 1e-10;
  double tol_hamilton = 1e-5;
  double tol_ledger = 1e-5;
};

/// Throws Error(ConfigError) on syntax errors, unknown or duplicate keys,
/// and invalid values.
ScenarioConfig parse_config(const std::string& text);

/// Range and consistency checks (dt > 0, t_end > t0, sizes of q0/p0, ...).
void validate_config(const ScenarioConfig& config);

/// Every setting with its resolved value, as written into reports.
nlohmann::json resolved_config(const ScenarioConfig& config);

/// Maps available in map_check mode: identity, t_doubling, rotation, shear,
/// squeeze, boost.
MapHandle builtin_map(const std::string& name, Dimension dim, double param);
const std::vector<std::string>& builtin_map_names();

struct ScenarioResult {
  int exit_code = 0;  // 0 pass, 1 verification failure, 2 config error
  std::string classification;
  std::vector<std::string> files;
  std::string message;
};

/// Runs a validated config, writing its outputs under `out_dir`.
ScenarioResult run_scenario(const ScenarioConfig& config, const std::string& out_dir);

struct SelftestOptions {
  std::optional<int> n;  // default: n = 1, 2, 3
  std::uint64_t seed = 20240101;
  std::optional<double> fuzz;
};

struct SelftestResult {
  bool passed = true;
  nlohmann::json summary;
};

/// Group-law, homomorphism, factorization, Lie algebra, commutator and
/// Euclidean-subgroup suites with a fixed seed.
SelftestResult selftest(const SelftestOptions& options);

std::string version();

}  // namespace jacobi
