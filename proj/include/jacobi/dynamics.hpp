#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jacobi/formcore.hpp"
#include "jacobi/spline.hpp"

namespace jacobi {

// H(q, p, t) with its first derivatives. The extended Hamiltonian is
// K(q, p, eps, t) = H(q, p, t) - eps.
struct HamiltonianSystem {
  using Scalar = std::function<double(const Vec& q, const Vec& p, double t)>;
  using Gradient = std::function<Vec(const Vec& q, const Vec& p, double t)>;
  using Hessian = std::function<Mat(const Vec& q, const Vec& p, double t)>;

  Dimension dim{1};
  std::string name;
  Scalar value;
  Gradient grad_q;
  Gradient grad_p;
  Scalar d_t;
  // Optional: second derivatives in (q1..qn, p1..pn, t) order.
  Hessian hessian;
  bool separable = false;
  bool autonomous = false;

  double extended_value(const PhasePoint& z) const { return value(z.q(), z.p(), z.t()) - z.eps(); }
};

/// Hessian of H in (q, p, t) order: the analytic one when provided,
/// otherwise central differences of the analytic gradients.
Mat hamiltonian_hessian(const HamiltonianSystem& sys, const Vec& q, const Vec& p, double t);

/// (dH/dp, -dH/dq, dH/dt, 1) in canonical interleaved order.
Vec extended_vector_field(const HamiltonianSystem& sys, const PhasePoint& z);

/// zeta0-rotated gradient on reduced phase space y = (q1,p1,...). Throws
/// NotAutonomous for time-dependent systems.
Vec reduced_vector_field(const HamiltonianSystem& sys, const Vec& y);

/// Jacobian of extended_vector_field with respect to z (interleaved).
Mat extended_field_jacobian(const HamiltonianSystem& sys, const PhasePoint& z);

enum class Method { RK4, Leapfrog };

const char* to_string(Method method) noexcept;
Method method_from_string(const std::string& name);

struct TrajectorySample {
  double tau;
  PhasePoint z;
  Vec v;
  Vec f;
  double r;
};

class Trajectory {
 public:
  Trajectory(Dimension dim, double dt, Method method) : dim_(dim), dt_(dt), method_(method) {}

  Dimension dim() const noexcept { return dim_; }
  double dt() const noexcept { return dt_; }
  Method method() const noexcept { return method_; }
  const std::vector<TrajectorySample>& samples() const noexcept { return samples_; }
  const std::vector<Mat>& jacobians() const noexcept { return jacobians_; }
  bool has_jacobians() const noexcept { return !jacobians_.empty(); }
  std::size_t size() const noexcept { return samples_.size(); }

  void push(TrajectorySample sample) { samples_.push_back(std::move(sample)); }
  void push_jacobian(Mat j) { jacobians_.push_back(std::move(j)); }

 private:
  Dimension dim_;
  double dt_;
  Method method_;
  std::vector<TrajectorySample> samples_;
  std::vector<Mat> jacobians_;
};

/// Integrates the extended flow from z0 to t_end. The grid is uniform with
/// ceil((t_end - t0) / dt) steps, so the effective step may be slightly
/// smaller than `dt`; the time coordinate of sample k is t0 + k * step.
/// With `with_variational`, J_k = d phi / d z0 is propagated alongside.
Trajectory integrate_flow(const HamiltonianSystem& sys, const PhasePoint& z0, double t_end, double dt, Method method,
                          bool with_variational);

// Parameters for the builtin test systems. Unused fields are ignored.
struct SystemParams {
  double mass = 1.0;
  double frequency = 1.0;
  double force = 1.0;
  double drive_amplitude = 0.3;
  double drive_frequency = 2.0;
};

/// free_particle, harmonic_oscillator, constant_force, driven_oscillator.
HamiltonianSystem builtin_system(const std::string& name, Dimension dim, const SystemParams& params = {});
const std::vector<std::string>& builtin_system_names();

// q~ = q + xi(t), p~ = p + pi(t), eps~ = eps + H(q, p, t), t~ = t, with
// xi and pi tabulated from a reference trajectory.
class RhoTransform {
 public:
  RhoTransform(HamiltonianSystem sys, std::vector<CubicSpline> xi, std::vector<CubicSpline> pi,
               std::vector<CubicSpline> q_ref, std::vector<CubicSpline> p_ref);

  Dimension dim() const noexcept { return sys_.dim; }
  double t_begin() const { return xi_.front().front(); }
  double t_end() const { return xi_.front().back(); }

  Vec xi(double t) const;
  Vec pi(double t) const;
  Vec xi_rate(double t) const;
  Vec pi_rate(double t) const;

  /// Reference state (q_ref(t), p_ref(t)) of the trajectory the shift was built from.
  Vec reference_q(double t) const;
  Vec reference_p(double t) const;

  Vec apply(const Vec& z) const;
  MapHandle as_map() const;

 private:
  HamiltonianSystem sys_;
  std::vector<CubicSpline> xi_;
  std::vector<CubicSpline> pi_;
  std::vector<CubicSpline> q_ref_;
  std::vector<CubicSpline> p_ref_;
};

RhoTransform make_rho(const Trajectory& traj, const HamiltonianSystem& sys);

}  // namespace jacobi
