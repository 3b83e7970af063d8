#include "jacobi/jacobi.h"

#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "jacobi/scenario.hpp"
#include "jacobi/serialize.hpp"
#include "jacobi/verify.hpp"

struct jac_element {
  jacobi::JacobiElement value;
};

struct jac_system {
  jacobi::HamiltonianSystem value;
};

struct jac_trajectory {
  jacobi::Trajectory value;
};

namespace {

thread_local std::string last_error;

jac_status to_status(jacobi::ErrorCode code) { return static_cast<jac_status>(static_cast<int>(code)); }

jac_status fail(jac_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs body, translating exceptions into status codes.
template <typename F>
jac_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return JAC_OK;
  } catch (const jacobi::Error& err) {
    return fail(to_status(err.code()), err.what());
  } catch (const std::bad_alloc&) {
    return fail(JAC_INTERNAL, "out of memory");
  } catch (const std::exception& err) {
    return fail(JAC_INTERNAL, err.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

jacobi::Mat read_matrix(const double* data, int rows) {
  jacobi::Mat m(rows, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < rows; ++j) m(i, j) = data[i * rows + j];
  return m;
}

void write_matrix(const jacobi::Mat& m, double* out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
}

jacobi::Vec read_vec(const double* data, int size) { return Eigen::Map<const jacobi::Vec>(data, size); }

#define JAC_REQUIRE(ptr) \
  if (!(ptr)) return fail(JAC_NULL_ARGUMENT, "null argument: " #ptr)

}  // namespace

extern "C" {

const char* jac_version(void) {
  static const std::string v = jacobi::version();
  return v.c_str();
}

const char* jac_status_name(jac_status status) {
  if (status == JAC_NULL_ARGUMENT) return "NullArgument";
  if (status < JAC_OK || status > JAC_INTERNAL) return "Unknown";
  return jacobi::to_string(static_cast<jacobi::ErrorCode>(static_cast<int>(status)));
}

const char* jac_last_error(void) { return last_error.c_str(); }

void jac_string_free(char* s) { delete[] s; }

jac_status jac_element_create(int n, const double* sigma, const double* w, double r, int eps, jac_element** out) {
  JAC_REQUIRE(sigma);
  JAC_REQUIRE(w);
  JAC_REQUIRE(out);
  return guarded([&] {
    const jacobi::Dimension dim(n);
    if (eps != 1 && eps != -1) throw jacobi::Error(jacobi::ErrorCode::InvalidParameter, "eps must be +1 or -1");
    jacobi::SymplecticBlock block(read_matrix(sigma, dim.reduced()), 1e-10);
    *out = new jac_element{jacobi::JacobiElement(std::move(block), read_vec(w, dim.reduced()), r, eps)};
  });
}

jac_status jac_element_identity(int n, jac_element** out) {
  JAC_REQUIRE(out);
  return guarded([&] { *out = new jac_element{jacobi::JacobiElement::identity(jacobi::Dimension(n))}; });
}

void jac_element_destroy(jac_element* g) { delete g; }

int jac_element_n(const jac_element* g) { return g ? g->value.dim().n() : 0; }

jac_status jac_element_sigma(const jac_element* g, double* out) {
  JAC_REQUIRE(g);
  JAC_REQUIRE(out);
  write_matrix(g->value.sigma().matrix(), out);
  return JAC_OK;
}

jac_status jac_element_w(const jac_element* g, double* out) {
  JAC_REQUIRE(g);
  JAC_REQUIRE(out);
  const jacobi::Vec& w = g->value.w();
  std::copy(w.data(), w.data() + w.size(), out);
  return JAC_OK;
}

double jac_element_r(const jac_element* g) { return g ? g->value.r() : 0.0; }

int jac_element_eps(const jac_element* g) { return g ? g->value.tr() : 0; }

jac_status jac_element_mul(const jac_element* a, const jac_element* b, jac_element** out) {
  JAC_REQUIRE(a);
  JAC_REQUIRE(b);
  JAC_REQUIRE(out);
  return guarded([&] { *out = new jac_element{jacobi::jacobi_mul(a->value, b->value)}; });
}

jac_status jac_element_inv(const jac_element* g, jac_element** out) {
  JAC_REQUIRE(g);
  JAC_REQUIRE(out);
  return guarded([&] { *out = new jac_element{jacobi::jacobi_inv(g->value)}; });
}

jac_status jac_element_matrix(const jac_element* g, double* out) {
  JAC_REQUIRE(g);
  JAC_REQUIRE(out);
  return guarded([&] { write_matrix(jacobi::jacobi_matrix(g->value), out); });
}

jac_status jac_element_factor(int n, const double* matrix, double tol, jac_element** out) {
  JAC_REQUIRE(matrix);
  JAC_REQUIRE(out);
  return guarded([&] {
    const jacobi::Dimension dim(n);
    *out = new jac_element{jacobi::jacobi_factor(read_matrix(matrix, dim.extended()), tol)};
  });
}

jac_status jac_element_to_json(const jac_element* g, char** json_out) {
  JAC_REQUIRE(g);
  JAC_REQUIRE(json_out);
  return guarded([&] { *json_out = dup_string(jacobi::element_to_json(g->value).dump()); });
}

jac_status jac_element_from_json(const char* json, jac_element** out) {
  JAC_REQUIRE(json);
  JAC_REQUIRE(out);
  return guarded([&] {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& err) {
      throw jacobi::Error(jacobi::ErrorCode::InvalidParameter, err.what());
    }
    *out = new jac_element{jacobi::element_from_json(doc)};
  });
}

jac_status jac_canonical_form(int n, jac_form form, double* out) {
  JAC_REQUIRE(out);
  return guarded([&] {
    const jacobi::Dimension dim(n);
    const auto f = form == JAC_FORM_ZETA ? jacobi::canonical_zeta(dim) : jacobi::canonical_eta(dim);
    write_matrix(f.matrix(), out);
  });
}

jac_status jac_form_residual(int n, const double* matrix, jac_form form, double* residual) {
  JAC_REQUIRE(matrix);
  JAC_REQUIRE(residual);
  return guarded([&] {
    const jacobi::Dimension dim(n);
    const auto f = form == JAC_FORM_ZETA ? jacobi::canonical_zeta(dim) : jacobi::canonical_eta(dim);
    *residual = jacobi::form_residual(read_matrix(matrix, dim.extended()), f);
  });
}

jac_status jac_system_create(const char* name, int n, double mass, double frequency, double force, jac_system** out) {
  JAC_REQUIRE(name);
  JAC_REQUIRE(out);
  return guarded([&] {
    jacobi::SystemParams params;
    params.mass = mass;
    params.frequency = frequency;
    params.force = force;
    *out = new jac_system{jacobi::builtin_system(name, jacobi::Dimension(n), params)};
  });
}

void jac_system_destroy(jac_system* sys) { delete sys; }

jac_status jac_system_hamiltonian(const jac_system* sys, const double* q, const double* p, double t, double* value) {
  JAC_REQUIRE(sys);
  JAC_REQUIRE(q);
  JAC_REQUIRE(p);
  JAC_REQUIRE(value);
  return guarded([&] {
    const int n = sys->value.dim.n();
    *value = sys->value.value(read_vec(q, n), read_vec(p, n), t);
  });
}

jac_status jac_integrate(const jac_system* sys, const double* z0, double t_end, double dt, jac_method method,
                         int with_variational, jac_trajectory** out) {
  JAC_REQUIRE(sys);
  JAC_REQUIRE(z0);
  JAC_REQUIRE(out);
  return guarded([&] {
    const auto z = jacobi::PhasePoint::from_flat(read_vec(z0, sys->value.dim.extended()));
    const auto m = method == JAC_METHOD_LEAPFROG ? jacobi::Method::Leapfrog : jacobi::Method::RK4;
    *out = new jac_trajectory{jacobi::integrate_flow(sys->value, z, t_end, dt, m, with_variational != 0)};
  });
}

void jac_trajectory_destroy(jac_trajectory* traj) { delete traj; }

size_t jac_trajectory_size(const jac_trajectory* traj) { return traj ? traj->value.size() : 0; }

jac_status jac_trajectory_state(const jac_trajectory* traj, size_t k, double* z) {
  JAC_REQUIRE(traj);
  JAC_REQUIRE(z);
  if (k >= traj->value.size()) return fail(JAC_OUT_OF_RANGE, "sample index out of range");
  const jacobi::Vec flat = traj->value.samples()[k].z.flatten();
  std::copy(flat.data(), flat.data() + flat.size(), z);
  return JAC_OK;
}

jac_status jac_trajectory_write_csv(const jac_trajectory* traj, const char* path) {
  JAC_REQUIRE(traj);
  JAC_REQUIRE(path);
  return guarded([&] {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw jacobi::Error(jacobi::ErrorCode::IoError, std::string("cannot open '") + path + "'");
    jacobi::write_trajectory_csv(file, traj->value);
    if (!file) throw jacobi::Error(jacobi::ErrorCode::IoError, std::string("write failed for '") + path + "'");
  });
}

jac_status jac_hamilton_residual(const jac_trajectory* traj, const jac_system* sys, double* residual) {
  JAC_REQUIRE(traj);
  JAC_REQUIRE(sys);
  JAC_REQUIRE(residual);
  return guarded([&] { *residual = jacobi::hamilton_residual(traj->value, sys->value); });
}

jac_status jac_energy_ledger(const jac_trajectory* traj, const jac_system* sys, double* out) {
  JAC_REQUIRE(traj);
  JAC_REQUIRE(sys);
  JAC_REQUIRE(out);
  return guarded([&] {
    const jacobi::EnergyLedger l = jacobi::energy_ledger(traj->value, sys->value);
    out[0] = l.delta_h;
    out[1] = l.kinetic_term;
    out[2] = l.work_term;
    out[3] = l.power_term;
    out[4] = l.residual;
  });
}

jac_status jac_check_invariance(int n, jac_map_fn map, void* user, const double* probes, size_t count, double tol_omega,
                                double tol_lambda, char** report_json) {
  JAC_REQUIRE(map);
  JAC_REQUIRE(probes);
  JAC_REQUIRE(report_json);
  return guarded([&] {
    const jacobi::Dimension dim(n);
    const int size = dim.extended();
    jacobi::MapHandle handle{dim, [&](const jacobi::Vec& z) {
                               jacobi::Vec out(size);
                               if (map(z.data(), out.data(), user) != 0)
                                 throw jacobi::Error(jacobi::ErrorCode::InvalidParameter, "map callback failed");
                               return out;
                             },
                             {}};
    std::vector<jacobi::PhasePoint> points;
    points.reserve(count);
    for (size_t k = 0; k < count; ++k) points.push_back(jacobi::PhasePoint::from_flat(read_vec(probes + k * size, size)));
    const auto report = jacobi::check_invariance(handle, points, tol_omega, tol_lambda);
    *report_json = dup_string(jacobi::report_to_json(report).dump(2));
  });
}

jac_status jac_run_scenario(const char* config_text, const char* out_dir, const uint64_t* seed, const double* tol_omega,
                            const double* tol_lambda, int* exit_code) {
  JAC_REQUIRE(config_text);
  JAC_REQUIRE(out_dir);
  JAC_REQUIRE(exit_code);
  *exit_code = 2;
  jacobi::ScenarioConfig config;
  const jac_status parsed = guarded([&] {
    config = jacobi::parse_config(config_text);
    if (seed) config.seed = *seed;
    if (tol_omega) config.tol_omega = *tol_omega;
    if (tol_lambda) config.tol_lambda = *tol_lambda;
    jacobi::validate_config(config);
  });
  if (parsed != JAC_OK) return parsed;
  std::string message;
  const jac_status status = guarded([&] {
    try {
      const jacobi::ScenarioResult result = jacobi::run_scenario(config, out_dir);
      *exit_code = result.exit_code;
      message = result.message;
    } catch (const jacobi::BlowUpError& err) {
      *exit_code = 1;
      message = err.what();
    }
  });
  if (status == JAC_OK) last_error = message;
  return status;
}

jac_status jac_selftest(int n, uint64_t seed, const double* fuzz, char** summary_json, int* passed) {
  JAC_REQUIRE(summary_json);
  JAC_REQUIRE(passed);
  return guarded([&] {
    jacobi::SelftestOptions options;
    if (n > 0) options.n = n;
    options.seed = seed;
    if (fuzz) options.fuzz = *fuzz;
    const jacobi::SelftestResult result = jacobi::selftest(options);
    *passed = result.passed ? 1 : 0;
    *summary_json = dup_string(result.summary.dump(2) + "\n");
  });
}

}  // extern "C"
