#include "jacobi/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace jacobi {

namespace {

// Reorders a (q, p, t) Hessian into interleaved z columns and builds the
// field Jacobian: rows q_i -> H_{p_i,.}, p_i -> -H_{q_i,.}, eps -> H_{t,.}.
Mat field_jacobian_from_hessian(Dimension dim, const Mat& hess) {
  const int n = dim.n();
  Mat a = Mat::Zero(dim.extended(), dim.extended());
  auto z_col = [&](int k) {  // (q, p, t) index -> interleaved z index
    if (k < n) return dim.q_index(k);
    if (k < 2 * n) return dim.p_index(k - n);
    return dim.t_index();
  };
  for (int k = 0; k < 2 * n + 1; ++k) {
    const int col = z_col(k);
    for (int i = 0; i < n; ++i) {
      a(dim.q_index(i), col) = hess(n + i, k);
      a(dim.p_index(i), col) = -hess(i, k);
    }
    a(dim.eps_index(), col) = hess(2 * n, k);
  }
  return a;
}

void check_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + ": non-finite Hamiltonian evaluation");
}

TrajectorySample make_sample(const HamiltonianSystem& sys, double tau, const PhasePoint& z) {
  Vec v = sys.grad_p(z.q(), z.p(), z.t());
  Vec f = -sys.grad_q(z.q(), z.p(), z.t());
  const double r = sys.d_t(z.q(), z.p(), z.t());
  return TrajectorySample{tau, z, std::move(v), std::move(f), r};
}

bool finite_state(const Vec& z, const Mat* jac) { return z.allFinite() && (jac == nullptr || jac->allFinite()); }

}  // namespace

Mat hamiltonian_hessian(const HamiltonianSystem& sys, const Vec& q, const Vec& p, double t) {
  const int n = sys.dim.n();
  if (sys.hessian) return sys.hessian(q, p, t);

  // Columns by central differences of the analytic gradient (H_q, H_p, H_t).
  auto grad = [&](const Vec& qq, const Vec& pp, double tt) {
    Vec g(2 * n + 1);
    g.head(n) = sys.grad_q(qq, pp, tt);
    g.segment(n, n) = sys.grad_p(qq, pp, tt);
    g(2 * n) = sys.d_t(qq, pp, tt);
    return g;
  };
  double scale = std::abs(t);
  if (n > 0) scale = std::max({scale, q.cwiseAbs().maxCoeff(), p.cwiseAbs().maxCoeff()});
  const double h = 1e-5 * std::max(1.0, scale);
  Mat hess(2 * n + 1, 2 * n + 1);
  for (int k = 0; k < 2 * n + 1; ++k) {
    Vec qp = q, pp = p, qm = q, pm = p;
    double tp = t, tm = t;
    if (k < n) {
      qp(k) += h;
      qm(k) -= h;
    } else if (k < 2 * n) {
      pp(k - n) += h;
      pm(k - n) -= h;
    } else {
      tp += h;
      tm -= h;
    }
    hess.col(k) = (grad(qp, pp, tp) - grad(qm, pm, tm)) / (2.0 * h);
  }
  return 0.5 * (hess + hess.transpose());
}

Vec extended_vector_field(const HamiltonianSystem& sys, const PhasePoint& z) {
  const Dimension dim = sys.dim;
  if (!(z.dim() == dim)) throw Error(ErrorCode::DimensionMismatch, "extended_vector_field: point dimension");
  const Vec hq = sys.grad_q(z.q(), z.p(), z.t());
  const Vec hp = sys.grad_p(z.q(), z.p(), z.t());
  const double ht = sys.d_t(z.q(), z.p(), z.t());
  check_finite(hq, "extended_vector_field");
  check_finite(hp, "extended_vector_field");
  if (!std::isfinite(ht)) throw Error(ErrorCode::NonFinite, "extended_vector_field: non-finite dH/dt");
  Vec x(dim.extended());
  for (int i = 0; i < dim.n(); ++i) {
    x(dim.q_index(i)) = hp(i);
    x(dim.p_index(i)) = -hq(i);
  }
  x(dim.eps_index()) = ht;
  x(dim.t_index()) = 1.0;
  return x;
}

Vec reduced_vector_field(const HamiltonianSystem& sys, const Vec& y) {
  if (!sys.autonomous) throw Error(ErrorCode::NotAutonomous, "reduced_vector_field: system depends on time");
  const Dimension dim = sys.dim;
  if (y.size() != dim.reduced()) throw Error(ErrorCode::DimensionMismatch, "reduced_vector_field: y has wrong length");
  Vec q(dim.n()), p(dim.n());
  for (int i = 0; i < dim.n(); ++i) {
    q(i) = y(dim.q_index(i));
    p(i) = y(dim.p_index(i));
  }
  // X = zeta0 * grad_y H. Evaluated at t = 0; autonomy makes t irrelevant.
  Vec grad(dim.reduced());
  const Vec hq = sys.grad_q(q, p, 0.0);
  const Vec hp = sys.grad_p(q, p, 0.0);
  for (int i = 0; i < dim.n(); ++i) {
    grad(dim.q_index(i)) = hq(i);
    grad(dim.p_index(i)) = hp(i);
  }
  Vec x = reduced_zeta(dim) * grad;
  check_finite(x, "reduced_vector_field");
  return x;
}

Mat extended_field_jacobian(const HamiltonianSystem& sys, const PhasePoint& z) {
  return field_jacobian_from_hessian(sys.dim, hamiltonian_hessian(sys, z.q(), z.p(), z.t()));
}

const char* to_string(Method method) noexcept { return method == Method::RK4 ? "rk4" : "leapfrog"; }

Method method_from_string(const std::string& name) {
  if (name == "rk4" || name == "RK4") return Method::RK4;
  if (name == "leapfrog" || name == "Leapfrog") return Method::Leapfrog;
  throw Error(ErrorCode::InvalidParameter, "unknown integration method '" + name + "'");
}

Trajectory integrate_flow(const HamiltonianSystem& sys, const PhasePoint& z0, double t_end, double dt, Method method,
                          bool with_variational) {
  const Dimension dim = sys.dim;
  if (!(z0.dim() == dim)) throw Error(ErrorCode::DimensionMismatch, "integrate_flow: z0 dimension");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidParameter, "integrate_flow: dt must be > 0");
  if (!(t_end > z0.t()) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::InvalidParameter, "integrate_flow: t_end must exceed the initial time");
  }
  if (method == Method::Leapfrog && !sys.separable) {
    throw Error(ErrorCode::MethodMismatch, "integrate_flow: leapfrog requires a separable Hamiltonian");
  }

  const double t0 = z0.t();
  const double span = t_end - t0;
  const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt * (1.0 - 1e-12))));
  const double h = span / static_cast<double>(steps);

  Trajectory traj(dim, h, method);
  traj.push(make_sample(sys, t0, z0));
  Mat jac = Mat::Identity(dim.extended(), dim.extended());
  if (with_variational) traj.push_jacobian(jac);

  const int e = dim.eps_index();
  const int ti = dim.t_index();
  Vec z = z0.flatten();

  auto field_at = [&](const Vec& state, double t) {
    Vec s = state;
    s(ti) = t;
    return extended_vector_field(sys, PhasePoint::from_flat(s));
  };
  auto jac_at = [&](const Vec& state, double t) {
    Vec s = state;
    s(ti) = t;
    return extended_field_jacobian(sys, PhasePoint::from_flat(s));
  };

  for (long k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    const double t_next = t0 + static_cast<double>(k + 1) * h;
    Vec next;
    Mat jac_next;

    try {
      if (method == Method::RK4) {
        const Vec k1 = field_at(z, t);
        const Vec z2 = z + 0.5 * h * k1;
        const Vec k2 = field_at(z2, t + 0.5 * h);
        const Vec z3 = z + 0.5 * h * k2;
        const Vec k3 = field_at(z3, t + 0.5 * h);
        const Vec z4 = z + h * k3;
        const Vec k4 = field_at(z4, t_next);
        next = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (with_variational) {
          const Mat a1 = jac_at(z, t) * jac;
          const Mat a2 = jac_at(z2, t + 0.5 * h) * (jac + 0.5 * h * a1);
          const Mat a3 = jac_at(z3, t + 0.5 * h) * (jac + 0.5 * h * a2);
          const Mat a4 = jac_at(z4, t_next) * (jac + h * a3);
          jac_next = jac + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        }
      } else {
        // Kick (V at fixed t) / drift (q and t advance) / kick.
        const int n = dim.n();
        next = z;
        if (with_variational) jac_next = jac;
        auto kick = [&](double tau, double t_kick) {
          const PhasePoint pt = PhasePoint::from_flat([&] {
            Vec s = next;
            s(ti) = t_kick;
            return s;
          }());
          const Vec hq = sys.grad_q(pt.q(), pt.p(), t_kick);
          const double ht = sys.d_t(pt.q(), pt.p(), t_kick);
          check_finite(hq, "integrate_flow");
          if (with_variational) {
            const Mat hess = hamiltonian_hessian(sys, pt.q(), pt.p(), t_kick);
            Mat step = Mat::Identity(dim.extended(), dim.extended());
            for (int i = 0; i < n; ++i) {
              for (int j = 0; j < n; ++j) step(dim.p_index(i), dim.q_index(j)) = -tau * hess(i, j);
              step(dim.p_index(i), ti) = -tau * hess(i, 2 * n);
              step(e, dim.q_index(i)) = tau * hess(2 * n, i);
            }
            step(e, ti) = tau * hess(2 * n, 2 * n);
            jac_next = step * jac_next;
          }
          for (int i = 0; i < n; ++i) next(dim.p_index(i)) -= tau * hq(i);
          next(e) += tau * ht;
        };
        auto drift = [&](double tau, double t_drift) {
          const PhasePoint pt = PhasePoint::from_flat([&] {
            Vec s = next;
            s(ti) = t_drift;
            return s;
          }());
          const Vec hp = sys.grad_p(pt.q(), pt.p(), t_drift);
          check_finite(hp, "integrate_flow");
          if (with_variational) {
            const Mat hess = hamiltonian_hessian(sys, pt.q(), pt.p(), t_drift);
            Mat step = Mat::Identity(dim.extended(), dim.extended());
            for (int i = 0; i < n; ++i) {
              for (int j = 0; j < n; ++j) step(dim.q_index(i), dim.p_index(j)) = tau * hess(n + i, n + j);
            }
            jac_next = step * jac_next;
          }
          for (int i = 0; i < n; ++i) next(dim.q_index(i)) += tau * hp(i);
        };
        kick(0.5 * h, t);
        drift(h, t);
        kick(0.5 * h, t_next);
      }
    } catch (const Error& err) {
      if (err.code() == ErrorCode::NonFinite) {
        throw BlowUpError("integrate_flow: non-finite state after step " + std::to_string(k), k);
      }
      throw;
    }

    next(ti) = t_next;
    if (!finite_state(next, with_variational ? &jac_next : nullptr)) {
      throw BlowUpError("integrate_flow: non-finite state after step " + std::to_string(k), k);
    }
    z = std::move(next);
    const PhasePoint pt = PhasePoint::from_flat(z);
    TrajectorySample sample = make_sample(sys, t_next, pt);
    if (!sample.v.allFinite() || !sample.f.allFinite() || !std::isfinite(sample.r)) {
      throw BlowUpError("integrate_flow: non-finite field after step " + std::to_string(k), k);
    }
    traj.push(std::move(sample));
    if (with_variational) {
      jac = std::move(jac_next);
      traj.push_jacobian(jac);
    }
  }
  return traj;
}

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidParameter, std::string(what) + " must be positive");
  }
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw Error(ErrorCode::InvalidParameter, std::string(what) + " must be finite");
}

}  // namespace

const std::vector<std::string>& builtin_system_names() {
  static const std::vector<std::string> names{"free_particle", "harmonic_oscillator", "constant_force",
                                              "driven_oscillator"};
  return names;
}

HamiltonianSystem builtin_system(const std::string& name, Dimension dim, const SystemParams& params) {
  require_positive(params.mass, "mass");
  const int n = dim.n();
  const double m = params.mass;

  HamiltonianSystem sys;
  sys.dim = dim;
  sys.name = name;
  sys.separable = true;
  sys.grad_p = [m](const Vec&, const Vec& p, double) -> Vec { return p / m; };

  // Quadratic potential stiffness and linear potential coefficient c(t).
  double stiffness = 0.0;
  std::function<double(double)> linear = [](double) { return 0.0; };
  std::function<double(double)> linear_rate = [](double) { return 0.0; };
  std::function<double(double)> linear_accel = [](double) { return 0.0; };

  if (name == "free_particle") {
    sys.autonomous = true;
  } else if (name == "harmonic_oscillator") {
    require_positive(params.frequency, "frequency");
    stiffness = m * params.frequency * params.frequency;
    sys.autonomous = true;
  } else if (name == "constant_force") {
    require_finite(params.force, "force");
    const double g = params.force;
    linear = [g](double) { return g; };
    sys.autonomous = true;
  } else if (name == "driven_oscillator") {
    require_positive(params.frequency, "frequency");
    require_finite(params.drive_amplitude, "drive_amplitude");
    require_finite(params.drive_frequency, "drive_frequency");
    stiffness = m * params.frequency * params.frequency;
    const double amp = params.drive_amplitude;
    const double om = params.drive_frequency;
    linear = [amp, om](double t) { return amp * std::cos(om * t); };
    linear_rate = [amp, om](double t) { return -amp * om * std::sin(om * t); };
    linear_accel = [amp, om](double t) { return -amp * om * om * std::cos(om * t); };
    sys.autonomous = false;
  } else {
    throw Error(ErrorCode::UnknownSystem, "unknown builtin system '" + name + "'");
  }

  // H = |p|^2 / 2m + stiffness |q|^2 / 2 + c(t) sum_i q_i
  sys.value = [m, stiffness, linear](const Vec& q, const Vec& p, double t) {
    return p.squaredNorm() / (2.0 * m) + 0.5 * stiffness * q.squaredNorm() + linear(t) * q.sum();
  };
  sys.grad_q = [stiffness, linear](const Vec& q, const Vec&, double t) -> Vec {
    return stiffness * q + Vec::Constant(q.size(), linear(t));
  };
  sys.d_t = [linear_rate](const Vec& q, const Vec&, double t) { return linear_rate(t) * q.sum(); };
  sys.hessian = [n, m, stiffness, linear_rate, linear_accel](const Vec& q, const Vec&, double t) {
    Mat hess = Mat::Zero(2 * n + 1, 2 * n + 1);
    for (int i = 0; i < n; ++i) {
      hess(i, i) = stiffness;
      hess(n + i, n + i) = 1.0 / m;
      hess(i, 2 * n) = linear_rate(t);
      hess(2 * n, i) = linear_rate(t);
    }
    hess(2 * n, 2 * n) = linear_accel(t) * q.sum();
    return hess;
  };
  return sys;
}

RhoTransform::RhoTransform(HamiltonianSystem sys, std::vector<CubicSpline> xi, std::vector<CubicSpline> pi,
                           std::vector<CubicSpline> q_ref, std::vector<CubicSpline> p_ref)
    : sys_(std::move(sys)), xi_(std::move(xi)), pi_(std::move(pi)), q_ref_(std::move(q_ref)), p_ref_(std::move(p_ref)) {
  const auto n = static_cast<std::size_t>(sys_.dim.n());
  if (xi_.size() != n || pi_.size() != n || q_ref_.size() != n || p_ref_.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "RhoTransform: one spline per degree of freedom expected");
  }
}

namespace {

Vec eval_all(const std::vector<CubicSpline>& splines, double t, bool derivative) {
  Vec out(static_cast<Eigen::Index>(splines.size()));
  for (std::size_t i = 0; i < splines.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = derivative ? splines[i].derivative(t) : splines[i](t);
  }
  return out;
}

}  // namespace

Vec RhoTransform::xi(double t) const { return eval_all(xi_, t, false); }
Vec RhoTransform::pi(double t) const { return eval_all(pi_, t, false); }
Vec RhoTransform::xi_rate(double t) const { return eval_all(xi_, t, true); }
Vec RhoTransform::pi_rate(double t) const { return eval_all(pi_, t, true); }
Vec RhoTransform::reference_q(double t) const { return eval_all(q_ref_, t, false); }
Vec RhoTransform::reference_p(double t) const { return eval_all(p_ref_, t, false); }

Vec RhoTransform::apply(const Vec& z) const {
  const PhasePoint pt = PhasePoint::from_flat(z);
  if (!(pt.dim() == dim())) throw Error(ErrorCode::DimensionMismatch, "RhoTransform: point dimension");
  const double t = pt.t();
  const PhasePoint out(pt.q() + xi(t), pt.p() + pi(t), pt.eps() + sys_.value(pt.q(), pt.p(), t), t);
  return out.flatten();
}

MapHandle RhoTransform::as_map() const {
  return MapHandle{dim(), [self = *this](const Vec& z) { return self.apply(z); }, {}};
}

RhoTransform make_rho(const Trajectory& traj, const HamiltonianSystem& sys) {
  if (!(traj.dim() == sys.dim)) throw Error(ErrorCode::DimensionMismatch, "make_rho: trajectory/system dimension");
  const auto& samples = traj.samples();
  if (samples.size() < 2) throw Error(ErrorCode::TooFewSamples, "make_rho: need >= 2 samples");
  const int n = sys.dim.n();
  std::vector<double> times;
  times.reserve(samples.size());
  for (const auto& s : samples) times.push_back(s.z.t());

  std::vector<CubicSpline> xi, pi, q_ref, p_ref;
  for (int i = 0; i < n; ++i) {
    std::vector<double> dq, dp, qs, ps;
    for (const auto& s : samples) {
      qs.push_back(s.z.q()(i));
      ps.push_back(s.z.p()(i));
      dq.push_back(s.z.q()(i) - samples.front().z.q()(i));
      dp.push_back(s.z.p()(i) - samples.front().z.p()(i));
    }
    xi.emplace_back(times, std::move(dq));
    pi.emplace_back(times, std::move(dp));
    q_ref.emplace_back(times, std::move(qs));
    p_ref.emplace_back(times, std::move(ps));
  }
  return RhoTransform(sys, std::move(xi), std::move(pi), std::move(q_ref), std::move(p_ref));
}

}  // namespace jacobi
