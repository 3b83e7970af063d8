#include "jacobi/scenario.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "jacobi/serialize.hpp"
#include "jacobi/verify.hpp"

namespace jacobi {

std::string version() { return JACOBI_VERSION; }

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    config_error("config key '" + key + "': '" + text + "' is not a finite number");
  }
  return value;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  std::uint64_t value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) config_error("config key '" + key + "': '" + text + "' is not a non-negative integer");
  return value;
}

Vec parse_vec(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  std::vector<double> values;
  std::string token;
  while (in >> token) values.push_back(parse_double(key, token));
  if (values.empty()) config_error("config key '" + key + "': empty vector");
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string vec_text(const Vec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_double(v(i));
  }
  return out;
}

using Setter = std::function<void(ScenarioConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto number = [](double ScenarioConfig::*field) {
      return Setter([field](ScenarioConfig& c, const std::string& k, const std::string& v) { c.*field = parse_double(k, v); });
    };
    auto param = [](double SystemParams::*field) {
      return Setter(
          [field](ScenarioConfig& c, const std::string& k, const std::string& v) { c.params.*field = parse_double(k, v); });
    };
    auto text = [](std::string ScenarioConfig::*field) {
      return Setter([field](ScenarioConfig& c, const std::string&, const std::string& v) { c.*field = v; });
    };
    t["mode"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      if (v == "flow") {
        c.mode = ScenarioMode::Flow;
      } else if (v == "map_check") {
        c.mode = ScenarioMode::MapCheck;
      } else {
        config_error("config key '" + k + "': expected flow or map_check");
      }
    };
    t["system"] = text(&ScenarioConfig::system);
    t["n"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      const auto n = parse_uint(k, v);
      if (n < 1 || n > 64) config_error("config key 'n': must be in [1, 64]");
      c.n = static_cast<int>(n);
    };
    t["mass"] = param(&SystemParams::mass);
    t["frequency"] = param(&SystemParams::frequency);
    t["force"] = param(&SystemParams::force);
    t["drive_amplitude"] = param(&SystemParams::drive_amplitude);
    t["drive_frequency"] = param(&SystemParams::drive_frequency);
    t["q0"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.q0 = parse_vec(k, v); };
    t["p0"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.p0 = parse_vec(k, v); };
    t["eps0"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      if (v == "auto") {
        c.eps0.reset();
      } else {
        c.eps0 = parse_double(k, v);
      }
    };
    t["t0"] = number(&ScenarioConfig::t0);
    t["t_end"] = number(&ScenarioConfig::t_end);
    t["dt"] = number(&ScenarioConfig::dt);
    t["method"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      try {
        c.method = method_from_string(v);
      } catch (const Error&) {
        config_error("config key '" + k + "': expected rk4 or leapfrog");
      }
    };
    t["probes"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.probes = parse_uint(k, v); };
    t["probe_list"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.probe_list.clear();
      std::istringstream in(v);
      std::string point;
      while (std::getline(in, point, ';')) {
        if (!trim(point).empty()) c.probe_list.push_back(parse_vec(k, point));
      }
    };
    t["seed"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.seed = parse_uint(k, v); };
    t["jacobian_stride"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.jacobian_stride = parse_uint(k, v);
    };
    t["map"] = text(&ScenarioConfig::map);
    t["map_param"] = number(&ScenarioConfig::map_param);
    t["trajectory_csv"] = text(&ScenarioConfig::trajectory_csv);
    t["invariance_json"] = text(&ScenarioConfig::invariance_json);
    t["ledger_json"] = text(&ScenarioConfig::ledger_json);
    t["tol_omega"] = number(&ScenarioConfig::tol_omega);
    t["tol_lambda"] = number(&ScenarioConfig::tol_lambda);
    t["tol_flow_omega"] = number(&ScenarioConfig::tol_flow_omega);
    t["tol_flow_lambda"] = number(&ScenarioConfig::tol_flow_lambda);
    t["tol_hamilton"] = number(&ScenarioConfig::tol_hamilton);
    t["tol_ledger"] = number(&ScenarioConfig::tol_ledger);
    return t;
  }();
  return table;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) config_error("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) config_error("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    if (value.empty()) config_error("config line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    it->second(config, key, value);
  }
  validate_config(config);
  return config;
}

void validate_config(const ScenarioConfig& c) {
  if (c.n < 1) config_error("n must be >= 1");
  const Dimension dim(c.n);
  if (!(c.dt > 0.0)) config_error("dt must be > 0");
  if (c.mode == ScenarioMode::Flow) {
    const auto& names = builtin_system_names();
    if (std::find(names.begin(), names.end(), c.system) == names.end()) config_error("unknown system '" + c.system + "'");
    if (!(c.t_end > c.t0)) config_error("t_end must exceed t0");
    if (!(c.params.mass > 0.0)) config_error("mass must be > 0");
    if (!(c.params.frequency > 0.0)) config_error("frequency must be > 0");
    if (c.q0 && c.q0->size() != c.n) config_error("q0 must have n entries");
    if (c.p0 && c.p0->size() != c.n) config_error("p0 must have n entries");
    if ((c.t_end - c.t0) / c.dt > 1e7) config_error("more than 1e7 steps requested");
  } else {
    const auto& names = builtin_map_names();
    if (std::find(names.begin(), names.end(), c.map) == names.end()) config_error("unknown map '" + c.map + "'");
    if (c.map == "squeeze" && !(c.map_param > 0.0)) config_error("squeeze map needs map_param > 0");
  }
  if (c.probe_list.empty() && c.probes == 0) config_error("probes must be >= 1");
  for (const Vec& p : c.probe_list) {
    if (p.size() != dim.extended()) config_error("probe_list points must have 2n+2 entries");
  }
  for (double tol : {c.tol_omega, c.tol_lambda, c.tol_flow_omega, c.tol_flow_lambda, c.tol_hamilton, c.tol_ledger}) {
    if (!(tol > 0.0)) config_error("tolerances must be > 0");
  }
  for (const std::string* path : {&c.trajectory_csv, &c.invariance_json, &c.ledger_json}) {
    if (path->empty()) config_error("output paths must be non-empty");
  }
}

nlohmann::json resolved_config(const ScenarioConfig& c) {
  const Dimension dim(c.n);
  nlohmann::json j;
  j["mode"] = c.mode == ScenarioMode::Flow ? "flow" : "map_check";
  j["system"] = c.system;
  j["n"] = c.n;
  j["mass"] = c.params.mass;
  j["frequency"] = c.params.frequency;
  j["force"] = c.params.force;
  j["drive_amplitude"] = c.params.drive_amplitude;
  j["drive_frequency"] = c.params.drive_frequency;
  j["q0"] = vec_text(c.q0.value_or(Vec::Ones(dim.n())));
  j["p0"] = vec_text(c.p0.value_or(Vec::Zero(dim.n())));
  j["eps0"] = c.eps0 ? format_double(*c.eps0) : std::string("auto");
  j["t0"] = c.t0;
  j["t_end"] = c.t_end;
  j["dt"] = c.dt;
  j["method"] = to_string(c.method);
  j["probes"] = c.probes;
  nlohmann::json list = nlohmann::json::array();
  for (const Vec& p : c.probe_list) list.push_back(vec_text(p));
  j["probe_list"] = list;
  j["seed"] = c.seed;
  j["jacobian_stride"] = c.jacobian_stride;
  j["map"] = c.map;
  j["map_param"] = c.map_param;
  j["trajectory_csv"] = c.trajectory_csv;
  j["invariance_json"] = c.invariance_json;
  j["ledger_json"] = c.ledger_json;
  j["tol_omega"] = c.tol_omega;
  j["tol_lambda"] = c.tol_lambda;
  j["tol_flow_omega"] = c.tol_flow_omega;
  j["tol_flow_lambda"] = c.tol_flow_lambda;
  j["tol_hamilton"] = c.tol_hamilton;
  j["tol_ledger"] = c.tol_ledger;
  return j;
}

const std::vector<std::string>& builtin_map_names() {
  static const std::vector<std::string> names{"identity", "t_doubling", "rotation", "shear", "squeeze", "boost"};
  return names;
}

MapHandle builtin_map(const std::string& name, Dimension dim, double param) {
  const int n = dim.n();
  const int e = dim.eps_index();
  const int t = dim.t_index();
  std::function<Vec(const Vec&)> eval;
  if (name == "identity") {
    eval = [](const Vec& z) { return z; };
  } else if (name == "t_doubling") {
    eval = [t](const Vec& z) {
      Vec out = z;
      out(t) = 2.0 * z(t);
      return out;
    };
  } else if (name == "rotation") {
    const double c = std::cos(param), s = std::sin(param);
    eval = [dim, n, c, s](const Vec& z) {
      Vec out = z;
      for (int i = 0; i < n; ++i) {
        out(dim.q_index(i)) = c * z(dim.q_index(i)) + s * z(dim.p_index(i));
        out(dim.p_index(i)) = -s * z(dim.q_index(i)) + c * z(dim.p_index(i));
      }
      return out;
    };
  } else if (name == "shear") {
    // Nonlinear kick p_i += a sin(q_i).
    eval = [dim, n, param](const Vec& z) {
      Vec out = z;
      for (int i = 0; i < n; ++i) out(dim.p_index(i)) += param * std::sin(z(dim.q_index(i)));
      return out;
    };
  } else if (name == "squeeze") {
    if (!(param > 0.0)) throw Error(ErrorCode::InvalidParameter, "squeeze map needs a positive parameter");
    eval = [dim, n, param](const Vec& z) {
      Vec out = z;
      for (int i = 0; i < n; ++i) {
        out(dim.q_index(i)) = param * z(dim.q_index(i));
        out(dim.p_index(i)) = z(dim.p_index(i)) / param;
      }
      return out;
    };
  } else if (name == "boost") {
    // Galilean boost with velocity `param` in every direction.
    eval = [dim, n, e, t, param](const Vec& z) {
      Vec out = z;
      for (int i = 0; i < n; ++i) {
        out(dim.q_index(i)) += param * z(t);
        out(e) += param * z(dim.p_index(i));
      }
      return out;
    };
  } else {
    throw Error(ErrorCode::InvalidParameter, "unknown map '" + name + "'");
  }
  return MapHandle{dim, std::move(eval), {}};
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

std::vector<PhasePoint> explicit_probes(const ScenarioConfig& c) {
  std::vector<PhasePoint> probes;
  for (const Vec& z : c.probe_list) probes.push_back(PhasePoint::from_flat(z));
  return probes;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, const std::string& out_dir) {
  validate_config(config);
  const Dimension dim(config.n);
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + out_dir + "'");

  nlohmann::json header{{"version", version()}, {"config", resolved_config(config)}};
  Rng rng(config.seed);
  ScenarioResult result;

  if (config.mode == ScenarioMode::MapCheck) {
    const MapHandle map = builtin_map(config.map, dim, config.map_param);
    const std::vector<PhasePoint> probes =
        config.probe_list.empty() ? sample_box_probes(dim, config.probes, rng) : explicit_probes(config);
    const InvarianceReport report = check_invariance(map, probes, config.tol_omega, config.tol_lambda);
    nlohmann::json doc = header;
    doc.update(report_to_json(report));
    doc["passed"] = report.classification == Classification::Jacobimorphism;
    write_file(dir / config.invariance_json, doc.dump(2) + "\n");
    result.files.push_back((dir / config.invariance_json).string());
    result.classification = to_string(report.classification);
    result.exit_code = report.classification == Classification::Jacobimorphism ? 0 : 1;
    result.message = "map '" + config.map + "' classified as " + result.classification;
    return result;
  }

  const HamiltonianSystem sys = builtin_system(config.system, dim, config.params);
  const Vec q0 = config.q0.value_or(Vec::Ones(dim.n()));
  const Vec p0 = config.p0.value_or(Vec::Zero(dim.n()));
  const double eps0 = config.eps0.value_or(sys.value(q0, p0, config.t0));
  const PhasePoint z0(q0, p0, eps0, config.t0);

  Trajectory traj = [&] {
    try {
      return integrate_flow(sys, z0, config.t_end, config.dt, config.method, true);
    } catch (const BlowUpError& err) {
      nlohmann::json doc = header;
      doc["error"] = err.what();
      doc["last_valid_step"] = err.last_valid_step();
      doc["passed"] = false;
      write_file(dir / config.invariance_json, doc.dump(2) + "\n");
      throw;
    }
  }();

  {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_file(dir / config.trajectory_csv, csv.str());
    result.files.push_back((dir / config.trajectory_csv).string());
  }

  const FlowJacobianReport flow = check_flow_jacobians(traj, config.jacobian_stride, config.tol_flow_omega);
  const bool flow_ok = flow.omega_residual_max <= config.tol_flow_omega &&
                       flow.lambda_residual_max <= config.tol_flow_lambda && flow.factored == flow.checked;

  const RhoTransform rho = make_rho(traj, sys);
  const std::vector<PhasePoint> probes =
      config.probe_list.empty() ? sample_reference_probes(rho, config.probes, rng) : explicit_probes(config);
  const InvarianceReport report = check_invariance(rho.as_map(), probes, config.tol_omega, config.tol_lambda);

  const bool enough = traj.size() >= 5;
  const double ham = enough ? hamilton_residual(traj, sys) : 0.0;
  const bool ham_ok = !enough || ham <= config.tol_hamilton;
  const EnergyLedger ledger = energy_ledger(traj, sys);
  const bool ledger_ok = ledger.residual <= config.tol_ledger;
  const bool rho_ok = report.classification == Classification::Jacobimorphism;

  nlohmann::json inv = header;
  inv.update(report_to_json(report));
  inv["flow_jacobians"] = nlohmann::json{{"omega_residual_max", flow.omega_residual_max},
                                         {"lambda_residual_max", flow.lambda_residual_max},
                                         {"checked", flow.checked},
                                         {"factored", flow.factored},
                                         {"stride", config.jacobian_stride},
                                         {"passed", flow_ok}};
  inv["hamilton_residual"] = enough ? nlohmann::json(ham) : nlohmann::json(nullptr);
  inv["tol_hamilton"] = config.tol_hamilton;
  inv["step"] = traj.dt();
  inv["passed"] = rho_ok && flow_ok && ham_ok;
  write_file(dir / config.invariance_json, inv.dump(2) + "\n");
  result.files.push_back((dir / config.invariance_json).string());

  nlohmann::json led = header;
  led.update(ledger_to_json(ledger));
  led["tol_ledger"] = config.tol_ledger;
  led["passed"] = ledger_ok;
  write_file(dir / config.ledger_json, led.dump(2) + "\n");
  result.files.push_back((dir / config.ledger_json).string());

  result.classification = to_string(report.classification);
  const bool ok = rho_ok && flow_ok && ham_ok && ledger_ok;
  result.exit_code = ok ? 0 : 1;
  result.message = ok ? "all checks passed" : "verification failed";
  return result;
}

}  // namespace jacobi
