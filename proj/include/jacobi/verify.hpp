#pragma once

#include <optional>
#include <span>
#include <vector>

#include "jacobi/dynamics.hpp"
#include "jacobi/jacobigroup.hpp"
#include "jacobi/sampling.hpp"

namespace jacobi {

enum class Classification { Symplectomorphism, Jacobimorphism, TimePreservingOnly, Neither };

const char* to_string(Classification c) noexcept;

struct ProbeResult {
  PhasePoint z;
  double omega_residual;
  double lambda_residual;
  std::optional<JacobiElement> factorization;
  ErrorCode factor_error = ErrorCode::Ok;
};

struct InvarianceReport {
  double omega_residual_max = 0.0;
  double lambda_residual_max = 0.0;
  double tol_omega = 0.0;
  double tol_lambda = 0.0;
  Classification classification = Classification::Neither;
  std::vector<ProbeResult> probes;
};

/// Pullback check of omega and lambda at each probe. Jacobimorphism needs
/// both residuals within tolerance and a successful jacobi_factor at every
/// probe; otherwise Symplectomorphism / TimePreservingOnly / Neither by
/// which residual passes.
InvarianceReport check_invariance(const MapHandle& f, std::span<const PhasePoint> probes, double tol_omega,
                                  double tol_lambda);

/// Uniform probes in [-half_width, half_width]^{2n+2}.
std::vector<PhasePoint> sample_box_probes(Dimension dim, std::size_t count, Rng& rng, double half_width = 2.0);

/// Probes on the reference curve of `rho`: (q_ref(t), p_ref(t), eps, t) with
/// t uniform in the central (1 - 2 margin) part of the tabulated range and
/// eps uniform in [-2, 2].
std::vector<PhasePoint> sample_reference_probes(const RhoTransform& rho, std::size_t count, Rng& rng,
                                                double margin = 0.05);

/// max over interior samples of |central difference of (q, p, eps) - (v, f, r)|_inf.
double hamilton_residual(const Trajectory& traj, const HamiltonianSystem& sys);

struct EnergyLedger {
  double delta_h = 0.0;
  double kinetic_term = 0.0;  // int v . dp
  double work_term = 0.0;     // -int f . dq
  double power_term = 0.0;    // int r dt
  double residual = 0.0;
};

EnergyLedger energy_ledger(const Trajectory& traj, const HamiltonianSystem& sys);

struct NoncommutativityResult {
  VfrView left;   // a then b as a product a * b
  VfrView right;  // b * a
  double commutator_r = 0.0;  // left.r_phys - right.r_phys
};

/// Products through heisenberg_mul, cross-checked against matrix products.
NoncommutativityResult noncommutativity_check(const VfrView& a, const VfrView& b);

struct FlowJacobianReport {
  double omega_residual_max = 0.0;
  double lambda_residual_max = 0.0;
  std::size_t checked = 0;
  std::size_t factored = 0;
  ErrorCode first_error = ErrorCode::Ok;
};

/// Residuals and factorization of every `stride`-th variational Jacobian.
FlowJacobianReport check_flow_jacobians(const Trajectory& traj, std::size_t stride, double factor_tol);

}  // namespace jacobi
