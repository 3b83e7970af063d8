#include "jacobi/verify.hpp"

#include <algorithm>
#include <cmath>

namespace jacobi {

const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::Symplectomorphism: return "Symplectomorphism";
    case Classification::Jacobimorphism: return "Jacobimorphism";
    case Classification::TimePreservingOnly: return "TimePreservingOnly";
    case Classification::Neither: return "Neither";
  }
  return "Neither";
}

InvarianceReport check_invariance(const MapHandle& f, std::span<const PhasePoint> probes, double tol_omega,
                                  double tol_lambda) {
  if (probes.empty()) throw Error(ErrorCode::TooFewSamples, "check_invariance: at least one probe required");
  const BilinearForm zeta = canonical_zeta(f.dim);
  const BilinearForm eta = canonical_eta(f.dim);

  InvarianceReport report;
  report.tol_omega = tol_omega;
  report.tol_lambda = tol_lambda;
  bool all_factored = true;
  for (const PhasePoint& z : probes) {
    if (!(z.dim() == f.dim)) throw Error(ErrorCode::DimensionMismatch, "check_invariance: probe dimension");
    const Mat jac = map_jacobian(f, z.flatten());
    ProbeResult probe{z, form_residual(jac, zeta), form_residual(jac, eta), std::nullopt, ErrorCode::Ok};
    try {
      probe.factorization = jacobi_factor(jac, std::max(tol_omega, tol_lambda));
    } catch (const Error& err) {
      probe.factor_error = err.code();
      all_factored = false;
    }
    report.omega_residual_max = std::max(report.omega_residual_max, probe.omega_residual);
    report.lambda_residual_max = std::max(report.lambda_residual_max, probe.lambda_residual);
    report.probes.push_back(std::move(probe));
  }

  const bool omega_ok = report.omega_residual_max <= tol_omega;
  const bool lambda_ok = report.lambda_residual_max <= tol_lambda;
  if (omega_ok && lambda_ok && all_factored) {
    report.classification = Classification::Jacobimorphism;
  } else if (omega_ok) {
    report.classification = Classification::Symplectomorphism;
  } else if (lambda_ok) {
    report.classification = Classification::TimePreservingOnly;
  } else {
    report.classification = Classification::Neither;
  }
  return report;
}

std::vector<PhasePoint> sample_box_probes(Dimension dim, std::size_t count, Rng& rng, double half_width) {
  std::vector<PhasePoint> probes;
  probes.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    probes.push_back(PhasePoint::from_flat(rng.uniform_vec(dim.extended(), -half_width, half_width)));
  }
  return probes;
}

std::vector<PhasePoint> sample_reference_probes(const RhoTransform& rho, std::size_t count, Rng& rng, double margin) {
  const double span = rho.t_end() - rho.t_begin();
  const double lo = rho.t_begin() + margin * span;
  const double hi = rho.t_end() - margin * span;
  std::vector<PhasePoint> probes;
  probes.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = rng.uniform(lo, hi);
    const double eps = rng.uniform(-2.0, 2.0);
    probes.emplace_back(rho.reference_q(t), rho.reference_p(t), eps, t);
  }
  return probes;
}

double hamilton_residual(const Trajectory& traj, const HamiltonianSystem& sys) {
  const auto& s = traj.samples();
  if (s.size() < 5) throw Error(ErrorCode::TooFewSamples, "hamilton_residual: need >= 5 samples");
  if (!(traj.dim() == sys.dim)) throw Error(ErrorCode::DimensionMismatch, "hamilton_residual: dimension");
  const int n = sys.dim.n();
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const PhasePoint& z = s[k].z;
    const double span = s[k + 1].z.t() - s[k - 1].z.t();
    const Vec dq = (s[k + 1].z.q() - s[k - 1].z.q()) / span;
    const Vec dp = (s[k + 1].z.p() - s[k - 1].z.p()) / span;
    const double de = (s[k + 1].z.eps() - s[k - 1].z.eps()) / span;
    const Vec v = sys.grad_p(z.q(), z.p(), z.t());
    const Vec f = -sys.grad_q(z.q(), z.p(), z.t());
    const double r = sys.d_t(z.q(), z.p(), z.t());
    for (int i = 0; i < n; ++i) {
      worst = std::max({worst, std::abs(dq(i) - v(i)), std::abs(dp(i) - f(i))});
    }
    worst = std::max(worst, std::abs(de - r));
  }
  return worst;
}

EnergyLedger energy_ledger(const Trajectory& traj, const HamiltonianSystem& sys) {
  const auto& s = traj.samples();
  if (s.size() < 2) throw Error(ErrorCode::TooFewSamples, "energy_ledger: need >= 2 samples");
  EnergyLedger ledger;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const auto& a = s[k];
    const auto& b = s[k + 1];
    const Vec dp = b.z.p() - a.z.p();
    const Vec dq = b.z.q() - a.z.q();
    const double dt = b.z.t() - a.z.t();
    ledger.kinetic_term += 0.5 * (a.v + b.v).dot(dp);
    ledger.work_term -= 0.5 * (a.f + b.f).dot(dq);
    ledger.power_term += 0.5 * (a.r + b.r) * dt;
  }
  const PhasePoint& z0 = s.front().z;
  const PhasePoint& z1 = s.back().z;
  ledger.delta_h = sys.value(z1.q(), z1.p(), z1.t()) - sys.value(z0.q(), z0.p(), z0.t());
  ledger.residual = std::abs(ledger.delta_h - (ledger.kinetic_term + ledger.work_term + ledger.power_term));
  return ledger;
}

NoncommutativityResult noncommutativity_check(const VfrView& a, const VfrView& b) {
  if (a.v.size() != b.v.size()) throw Error(ErrorCode::DimensionMismatch, "noncommutativity_check: dimension");
  const HeisenbergElement ha = from_vfr(a);
  const HeisenbergElement hb = from_vfr(b);
  const HeisenbergElement ab = heisenberg_mul(ha, hb);
  const HeisenbergElement ba = heisenberg_mul(hb, ha);

  const Mat ma = heisenberg_matrix(ha);
  const Mat mb = heisenberg_matrix(hb);
  const double scale = std::max({1.0, max_abs(ma), max_abs(mb)});
  const double tol = 1e-13 * scale * scale;
  if (max_abs(heisenberg_matrix(ab) - ma * mb) > tol || max_abs(heisenberg_matrix(ba) - mb * ma) > tol) {
    throw Error(ErrorCode::Internal, "noncommutativity_check: group law disagrees with matrix product");
  }

  NoncommutativityResult result{to_vfr(ab), to_vfr(ba), 0.0};
  if (max_abs(result.left.v - result.right.v) > 0.0 || max_abs(result.left.f - result.right.f) > 0.0) {
    throw Error(ErrorCode::Internal, "noncommutativity_check: (v, f) parts of the two products differ");
  }
  result.commutator_r = result.left.r_phys - result.right.r_phys;
  return result;
}

FlowJacobianReport check_flow_jacobians(const Trajectory& traj, std::size_t stride, double factor_tol) {
  if (!traj.has_jacobians()) throw Error(ErrorCode::InvalidParameter, "check_flow_jacobians: no variational data");
  if (stride == 0) stride = 1;
  const BilinearForm zeta = canonical_zeta(traj.dim());
  const BilinearForm eta = canonical_eta(traj.dim());
  FlowJacobianReport report;
  const auto& jacs = traj.jacobians();
  for (std::size_t k = 0; k < jacs.size(); k += stride) {
    report.omega_residual_max = std::max(report.omega_residual_max, form_residual(jacs[k], zeta));
    report.lambda_residual_max = std::max(report.lambda_residual_max, form_residual(jacs[k], eta));
    ++report.checked;
    try {
      (void)jacobi_factor(jacs[k], factor_tol);
      ++report.factored;
    } catch (const Error& err) {
      if (report.first_error == ErrorCode::Ok) report.first_error = err.code();
    }
  }
  return report;
}

}  // namespace jacobi
