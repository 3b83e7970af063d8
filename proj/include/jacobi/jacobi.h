/* C interface to the Jacobi group toolkit. All functions return a jac_status;
 * on failure jac_last_error() describes the most recent error on this thread. */
#ifndef JACOBI_JACOBI_H
#define JACOBI_JACOBI_H

#include <stddef.h>
#include <stdint.h>

#if defined(JAC_BUILDING_LIBRARY)
#define JAC_API __attribute__((visibility("default")))
#else
#define JAC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum jac_status {
  JAC_OK = 0,
  JAC_INVALID_DIMENSION,
  JAC_DIMENSION_MISMATCH,
  JAC_NON_FINITE,
  JAC_NOT_SYMPLECTIC,
  JAC_NOT_TIME_PRESERVING,
  JAC_PATTERN_VIOLATION,
  JAC_NOT_A_ROTATION,
  JAC_NOT_AUTONOMOUS,
  JAC_METHOD_MISMATCH,
  JAC_BLOW_UP,
  JAC_OUT_OF_RANGE,
  JAC_TOO_FEW_SAMPLES,
  JAC_UNKNOWN_SYSTEM,
  JAC_INVALID_PARAMETER,
  JAC_CONFIG_ERROR,
  JAC_IO_ERROR,
  JAC_INTERNAL,
  JAC_NULL_ARGUMENT
} jac_status;

typedef enum jac_form { JAC_FORM_ZETA = 0, JAC_FORM_ETA = 1 } jac_form;
typedef enum jac_method { JAC_METHOD_RK4 = 0, JAC_METHOD_LEAPFROG = 1 } jac_method;

typedef struct jac_element jac_element;
typedef struct jac_system jac_system;
typedef struct jac_trajectory jac_trajectory;

JAC_API const char* jac_version(void);
JAC_API const char* jac_status_name(jac_status status);
/* Message for the last failed call on the calling thread; never NULL. */
JAC_API const char* jac_last_error(void);
/* Frees strings returned through char** out-parameters. */
JAC_API void jac_string_free(char* s);

/* Matrices are row-major, (2n+2)x(2n+2) for extended ones, 2n x 2n for sigma. */
JAC_API jac_status jac_element_create(int n, const double* sigma, const double* w, double r, int eps,
                                      jac_element** out);
JAC_API jac_status jac_element_identity(int n, jac_element** out);
JAC_API void jac_element_destroy(jac_element* g);
JAC_API int jac_element_n(const jac_element* g);
JAC_API jac_status jac_element_sigma(const jac_element* g, double* out);
JAC_API jac_status jac_element_w(const jac_element* g, double* out);
JAC_API double jac_element_r(const jac_element* g);
JAC_API int jac_element_eps(const jac_element* g);
JAC_API jac_status jac_element_mul(const jac_element* a, const jac_element* b, jac_element** out);
JAC_API jac_status jac_element_inv(const jac_element* g, jac_element** out);
JAC_API jac_status jac_element_matrix(const jac_element* g, double* out);
JAC_API jac_status jac_element_factor(int n, const double* matrix, double tol, jac_element** out);
JAC_API jac_status jac_element_to_json(const jac_element* g, char** json_out);
JAC_API jac_status jac_element_from_json(const char* json, jac_element** out);

JAC_API jac_status jac_canonical_form(int n, jac_form form, double* out);
JAC_API jac_status jac_form_residual(int n, const double* matrix, jac_form form, double* residual);

/* Builtin systems: free_particle, harmonic_oscillator, constant_force, driven_oscillator. */
JAC_API jac_status jac_system_create(const char* name, int n, double mass, double frequency, double force,
                                     jac_system** out);
JAC_API void jac_system_destroy(jac_system* sys);
JAC_API jac_status jac_system_hamiltonian(const jac_system* sys, const double* q, const double* p, double t,
                                          double* value);

/* z0 is (q1,p1,...,qn,pn,eps,t). */
JAC_API jac_status jac_integrate(const jac_system* sys, const double* z0, double t_end, double dt,
                                 jac_method method, int with_variational, jac_trajectory** out);
JAC_API void jac_trajectory_destroy(jac_trajectory* traj);
JAC_API size_t jac_trajectory_size(const jac_trajectory* traj);
/* Writes the 2n+2 state of sample k. */
JAC_API jac_status jac_trajectory_state(const jac_trajectory* traj, size_t k, double* z);
JAC_API jac_status jac_trajectory_write_csv(const jac_trajectory* traj, const char* path);
JAC_API jac_status jac_hamilton_residual(const jac_trajectory* traj, const jac_system* sys, double* residual);
/* out[5] = delta_H, kinetic_term, work_term, power_term, residual. */
JAC_API jac_status jac_energy_ledger(const jac_trajectory* traj, const jac_system* sys, double* out);

/* A map on extended phase space: writes f(z) into out, returns 0 on success. */
typedef int (*jac_map_fn)(const double* z, double* out, void* user);

/* probes: count points of length 2n+2. report_json receives the JSON report. */
JAC_API jac_status jac_check_invariance(int n, jac_map_fn map, void* user, const double* probes, size_t count,
                                        double tol_omega, double tol_lambda, char** report_json);

/* Runs a key=value scenario. Overrides are applied when the pointer is non-NULL.
 * exit_code: 0 pass, 1 verification failure, 2 config error. */
JAC_API jac_status jac_run_scenario(const char* config_text, const char* out_dir, const uint64_t* seed,
                                    const double* tol_omega, const double* tol_lambda, int* exit_code);

/* n <= 0 runs n = 1, 2, 3. fuzz may be NULL. */
JAC_API jac_status jac_selftest(int n, uint64_t seed, const double* fuzz, char** summary_json, int* passed);

#ifdef __cplusplus
}
#endif

#endif
