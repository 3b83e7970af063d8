#include <cmath>
#include <numbers>

#include "doctest.h"
#include "jacobi/dynamics.hpp"
#include "jacobi/sampling.hpp"

using namespace jacobi;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

PhasePoint point(double q, double p, double eps, double t) { return PhasePoint(vec({q}), vec({p}), eps, t); }

// Non-separable H = q^2 p^2 / 2, for error paths.
HamiltonianSystem coupled_system() {
  HamiltonianSystem sys;
  sys.dim = Dimension(1);
  sys.name = "coupled";
  sys.value = [](const Vec& q, const Vec& p, double) { return 0.5 * q(0) * q(0) * p(0) * p(0); };
  sys.grad_q = [](const Vec& q, const Vec& p, double) -> Vec { return vec({q(0) * p(0) * p(0)}); };
  sys.grad_p = [](const Vec& q, const Vec& p, double) -> Vec { return vec({q(0) * q(0) * p(0)}); };
  sys.d_t = [](const Vec&, const Vec&, double) { return 0.0; };
  sys.autonomous = true;
  return sys;
}

// H = p^2/2 - q^4, which escapes to infinity in finite time.
HamiltonianSystem runaway_system() {
  HamiltonianSystem sys;
  sys.dim = Dimension(1);
  sys.name = "runaway";
  sys.value = [](const Vec& q, const Vec& p, double) { return 0.5 * p(0) * p(0) - std::pow(q(0), 4); };
  sys.grad_q = [](const Vec& q, const Vec&, double) -> Vec { return vec({-4 * std::pow(q(0), 3)}); };
  sys.grad_p = [](const Vec&, const Vec& p, double) -> Vec { return p; };
  sys.d_t = [](const Vec&, const Vec&, double) { return 0.0; };
  sys.separable = true;
  sys.autonomous = true;
  return sys;
}

double fd(const std::function<double(double)>& f, double x) {
  const double h = 1e-5 * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2 * h);
}

}  // namespace

TEST_CASE("extended vector field examples") {
  const auto ho = builtin_system("harmonic_oscillator", Dimension(1));
  CHECK(extended_vector_field(ho, point(1, 0, 0.3, 0.7)) == vec({0, -1, 0, 1}));

  const auto free = builtin_system("free_particle", Dimension(1));
  CHECK(extended_vector_field(free, point(-4, 2.5, 1, 3)) == vec({2.5, 0, 0, 1}));

  Rng rng(1);
  for (const auto& name : builtin_system_names()) {
    const auto sys = builtin_system(name, Dimension(2));
    if (!sys.autonomous) continue;
    const Vec z = rng.uniform_vec(6, -2, 2);
    CHECK(extended_vector_field(sys, PhasePoint::from_flat(z))(4) == 0.0);
  }
}

TEST_CASE("reduced vector field") {
  const auto ho = builtin_system("harmonic_oscillator", Dimension(1));
  CHECK(reduced_vector_field(ho, vec({1, 0})) == vec({0, -1}));

  HamiltonianSystem flat;
  flat.dim = Dimension(2);
  flat.value = [](const Vec&, const Vec&, double) { return 4.0; };
  flat.grad_q = [](const Vec& q, const Vec&, double) -> Vec { return Vec::Zero(q.size()); };
  flat.grad_p = flat.grad_q;
  flat.d_t = [](const Vec&, const Vec&, double) { return 0.0; };
  flat.autonomous = true;
  CHECK(reduced_vector_field(flat, vec({1, 2, 3, 4})).isZero(0));

  Rng rng(2);
  for (const auto& name : {"free_particle", "harmonic_oscillator", "constant_force"}) {
    const auto sys = builtin_system(name, Dimension(2));
    const Vec z = rng.uniform_vec(6, -2, 2);
    const Vec ext = extended_vector_field(sys, PhasePoint::from_flat(z));
    CHECK(reduced_vector_field(sys, z.head(4)) == ext.head(4));
  }

  const auto driven = builtin_system("driven_oscillator", Dimension(1));
  CHECK_THROWS_AS(reduced_vector_field(driven, vec({1, 0})), Error);
}

TEST_CASE("builtin systems: flags, gradients and hessians") {
  for (const auto& name : builtin_system_names()) {
    const auto sys = builtin_system(name, Dimension(1));
    CHECK(sys.separable);
    CHECK(sys.autonomous == (name != "driven_oscillator"));
  }

  SystemParams params;
  params.force = 9.81;
  const auto cf = builtin_system("constant_force", Dimension(1), params);
  CHECK(cf.grad_q(vec({3.0}), vec({1.0}), 2.0)(0) == 9.81);  // f = -g

  // dH/dt for H = p^2/2 + q^2/2 + 0.3 q cos(2t) is -0.6 q sin(2t).
  const auto driven = builtin_system("driven_oscillator", Dimension(1));
  for (double t : {0.0, 0.4, 1.3, 2.9}) {
    const double q = 1.7;
    CHECK(driven.d_t(vec({q}), vec({0.2}), t) == doctest::Approx(-0.6 * q * std::sin(2 * t)).epsilon(1e-14));
    CHECK(driven.value(vec({q}), vec({0.2}), t) ==
          doctest::Approx(0.02 + 0.5 * q * q + 0.3 * q * std::cos(2 * t)).epsilon(1e-14));
  }

  Rng rng(3);
  for (const auto& name : builtin_system_names()) {
    for (int n = 1; n <= 2; ++n) {
      const auto sys = builtin_system(name, Dimension(n));
      for (int k = 0; k < 10; ++k) {
        const Vec q = rng.uniform_vec(n, -2, 2), p = rng.uniform_vec(n, -2, 2);
        const double t = rng.uniform(0, 5);
        for (int i = 0; i < n; ++i) {
          auto along_q = [&](double x) {
            Vec qq = q;
            qq(i) = x;
            return sys.value(qq, p, t);
          };
          auto along_p = [&](double x) {
            Vec pp = p;
            pp(i) = x;
            return sys.value(q, pp, t);
          };
          CHECK(std::abs(sys.grad_q(q, p, t)(i) - fd(along_q, q(i))) <= 1e-6);
          CHECK(std::abs(sys.grad_p(q, p, t)(i) - fd(along_p, p(i))) <= 1e-6);
        }
        CHECK(std::abs(sys.d_t(q, p, t) - fd([&](double s) { return sys.value(q, p, s); }, t)) <= 1e-6);

        HamiltonianSystem numeric = sys;
        numeric.hessian = nullptr;
        CHECK(max_abs(hamiltonian_hessian(sys, q, p, t) - hamiltonian_hessian(numeric, q, p, t)) <= 1e-6);
      }
    }
  }

  CHECK_THROWS_AS(builtin_system("pendulum", Dimension(1)), Error);
  SystemParams bad;
  bad.mass = 0.0;
  CHECK_THROWS_AS(builtin_system("free_particle", Dimension(1), bad), Error);
}

TEST_CASE("field jacobian matches central differences of the field") {
  Rng rng(4);
  for (const auto& name : builtin_system_names()) {
    const auto sys = builtin_system(name, Dimension(2));
    const Vec z = rng.uniform_vec(6, -2, 2);
    MapHandle field{Dimension(2), [&](const Vec& x) { return extended_vector_field(sys, PhasePoint::from_flat(x)); }, {}};
    CHECK(max_abs(extended_field_jacobian(sys, PhasePoint::from_flat(z)) - numeric_jacobian(field, z, 1e-5)) <= 1e-6);
  }
}

TEST_CASE("harmonic oscillator closes after one period") {
  const auto ho = builtin_system("harmonic_oscillator", Dimension(1));
  const auto traj = integrate_flow(ho, point(1, 0, 0.5, 0), 2 * std::numbers::pi, 1e-3, Method::RK4, false);
  const auto& last = traj.samples().back().z;
  CHECK(std::abs(last.q()(0) - 1.0) <= 1e-9);
  CHECK(std::abs(last.p()(0)) <= 1e-9);
  CHECK(last.t() == 2 * std::numbers::pi);
  for (const auto& s : traj.samples()) {
    CHECK(s.z.eps() == 0.5);
    // Closed form q = cos t, p = -sin t.
    CHECK(std::abs(s.z.q()(0) - std::cos(s.tau)) <= 1e-9);
    CHECK(std::abs(s.z.p()(0) + std::sin(s.tau)) <= 1e-9);
  }
}

TEST_CASE("free particle flow is exact") {
  const auto free = builtin_system("free_particle", Dimension(1));
  for (Method m : {Method::RK4, Method::Leapfrog}) {
    const auto traj = integrate_flow(free, point(0, 2, 2, 0), 3.0, 1e-3, m, false);
    const auto& last = traj.samples().back().z;
    CHECK(std::abs(last.q()(0) - 6.0) <= 1e-12);
    CHECK(last.p()(0) == 2.0);
    CHECK(last.eps() == 2.0);
    CHECK(last.t() == 3.0);
  }
}

TEST_CASE("driven oscillator keeps eps - H constant") {
  const auto sys = builtin_system("driven_oscillator", Dimension(1));
  const auto z0 = point(1, 0, sys.value(vec({1}), vec({0}), 0), 0);
  const auto traj = integrate_flow(sys, z0, 5.0, 1e-3, Method::RK4, false);
  const double h0 = sys.value(z0.q(), z0.p(), 0);
  double worst = 0;
  for (const auto& s : traj.samples()) {
    worst = std::max(worst, std::abs((s.z.eps() - z0.eps()) - (sys.value(s.z.q(), s.z.p(), s.z.t()) - h0)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("trajectory records v, f, r and an exact time grid") {
  const auto sys = builtin_system("driven_oscillator", Dimension(2));
  const PhasePoint z0(vec({1, -0.5}), vec({0.2, 0.1}), 0.0, 0.25);
  const auto traj = integrate_flow(sys, z0, 1.0, 0.03, Method::RK4, true);
  const std::size_t steps = static_cast<std::size_t>(std::ceil(0.75 / 0.03));
  REQUIRE(traj.size() == steps + 1);
  const double h = 0.75 / static_cast<double>(steps);
  CHECK(traj.samples().back().z.t() == 1.0);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& s = traj.samples()[k];
    CHECK(s.z.t() == 0.25 + static_cast<double>(k) * h);
    CHECK(s.tau == s.z.t());
    CHECK(s.v == sys.grad_p(s.z.q(), s.z.p(), s.z.t()));
    CHECK(s.f == -sys.grad_q(s.z.q(), s.z.p(), s.z.t()));
    CHECK(s.r == sys.d_t(s.z.q(), s.z.p(), s.z.t()));
    if (k > 0) CHECK(s.tau > traj.samples()[k - 1].tau);
  }
  CHECK(traj.jacobians().front() == Mat::Identity(6, 6));
  CHECK(traj.jacobians().size() == traj.size());
}

TEST_CASE("variational jacobian matches finite differences of the flow") {
  for (Method method : {Method::RK4, Method::Leapfrog}) {
    for (const auto& name : builtin_system_names()) {
      const auto sys = builtin_system(name, Dimension(2));
      const Vec z0 = vec({0.8, -0.3, 0.4, 0.6, 0.1, 0.2});
      const auto traj = integrate_flow(sys, PhasePoint::from_flat(z0), 1.2, 1e-2, method, true);
      // Perturbing the start time shifts the whole grid; compare at the
      // matching end time by flowing over the same span.
      MapHandle flow{Dimension(2),
                     [&](const Vec& z) {
                       const auto p = PhasePoint::from_flat(z);
                       return integrate_flow(sys, p, p.t() + 1.0, 1e-2, method, false).samples().back().z.flatten();
                     },
                     {}};
      const Mat numeric = numeric_jacobian(flow, z0, 1e-6);
      const Mat& variational = traj.jacobians()[100];
      CHECK(std::abs(traj.samples()[100].z.t() - 1.2) <= 1e-15);
      CHECK(max_abs(variational - numeric) <= 1e-6);
    }
  }
}

TEST_CASE("convergence orders of RK4 and leapfrog") {
  const auto ho = builtin_system("harmonic_oscillator", Dimension(1));
  const double t_end = 3.0;
  auto error = [&](Method m, double dt) {
    const auto last = integrate_flow(ho, point(1, 0, 0.5, 0), t_end, dt, m, false).samples().back().z;
    return std::hypot(last.q()(0) - std::cos(t_end), last.p()(0) + std::sin(t_end));
  };
  CHECK(error(Method::RK4, 0.02) / error(Method::RK4, 0.01) >= 3.8);
  CHECK(error(Method::RK4, 0.02) / error(Method::RK4, 0.01) >= 14.0);
  CHECK(error(Method::Leapfrog, 0.02) / error(Method::Leapfrog, 0.01) >= 3.8);
  CHECK(error(Method::Leapfrog, 0.02) / error(Method::Leapfrog, 0.01) <= 4.2);

  // Leapfrog and RK4 agree to O(dt^2).
  const auto rk = integrate_flow(ho, point(1, 0, 0.5, 0), t_end, 0.01, Method::RK4, false).samples().back().z;
  const auto lf = integrate_flow(ho, point(1, 0, 0.5, 0), t_end, 0.01, Method::Leapfrog, false).samples().back().z;
  CHECK(max_abs(rk.flatten() - lf.flatten()) <= 1e-3);
}

TEST_CASE("integration errors") {
  const auto ho = builtin_system("harmonic_oscillator", Dimension(1));
  const auto z0 = point(1, 0, 0.5, 0);
  auto code_of = [](auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Ok;
  };
  CHECK(code_of([&] { integrate_flow(ho, z0, 1.0, 0.0, Method::RK4, false); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([&] { integrate_flow(ho, z0, 1.0, -1e-3, Method::RK4, false); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([&] { integrate_flow(ho, z0, 0.0, 1e-3, Method::RK4, false); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([&] { integrate_flow(coupled_system(), z0, 1.0, 1e-3, Method::Leapfrog, false); }) ==
        ErrorCode::MethodMismatch);
  CHECK_NOTHROW(integrate_flow(coupled_system(), z0, 1.0, 1e-2, Method::RK4, true));

  try {
    integrate_flow(runaway_system(), point(1, 1, 0, 0), 10.0, 1e-2, Method::RK4, false);
    FAIL("expected blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.code() == ErrorCode::BlowUp);
    CHECK(e.last_valid_step() > 0);
    CHECK(e.last_valid_step() < 1000);
  }
}

TEST_CASE("method names") {
  CHECK(method_from_string("rk4") == Method::RK4);
  CHECK(method_from_string("leapfrog") == Method::Leapfrog);
  CHECK(std::string(to_string(Method::Leapfrog)) == "leapfrog");
  CHECK_THROWS_AS(method_from_string("euler"), Error);
}

TEST_CASE("cubic spline") {
  std::vector<double> x{0, 0.5, 1.5, 2, 3}, y;
  for (double xi : x) y.push_back(3 * xi - 1);
  const CubicSpline line(x, y);
  for (double s : {0.0, 0.2, 1.0, 2.7, 3.0}) {
    CHECK(line(s) == doctest::Approx(3 * s - 1).epsilon(1e-14));
    CHECK(line.derivative(s) == doctest::Approx(3).epsilon(1e-13));
  }
  CHECK_THROWS_AS(line(3.1), Error);
  CHECK_THROWS_AS(line(-0.1), Error);
  CHECK_THROWS_AS(CubicSpline({0, 1}, {1}), Error);

  std::vector<double> xs, ys;
  for (int k = 0; k <= 200; ++k) {
    xs.push_back(k * 0.01);
    ys.push_back(std::sin(xs.back()));
  }
  const CubicSpline s(xs, ys);
  for (double t : {0.3, 0.777, 1.234, 1.6}) {
    CHECK(std::abs(s(t) - std::sin(t)) <= 1e-8);
    CHECK(std::abs(s.derivative(t) - std::cos(t)) <= 1e-6);
  }
}

TEST_CASE("rho transform") {
  const auto free = builtin_system("free_particle", Dimension(1));
  const auto traj = integrate_flow(free, point(0, 2, 2, 0), 3.0, 1e-2, Method::RK4, false);
  const auto rho = make_rho(traj, free);
  CHECK(rho.t_begin() == 0.0);
  CHECK(rho.t_end() == 3.0);
  CHECK(rho.xi(0.0).isZero(0));
  CHECK(rho.pi(0.0).isZero(0));
  for (double t : {0.4, 1.1, 2.5}) {
    CHECK(std::abs(rho.xi(t)(0) - 2 * t) <= 1e-12);
    CHECK(std::abs(rho.pi(t)(0)) <= 1e-12);
  }

  // At t0 only the energy coordinate moves.
  const Vec z = vec({0.7, -0.4, 1.5, 0.0});
  const Vec out = rho.apply(z);
  CHECK(out(0) == z(0));
  CHECK(out(1) == z(1));
  CHECK(out(2) == doctest::Approx(1.5 + 0.08));
  CHECK(out(3) == 0.0);
  CHECK_THROWS_AS(rho.apply(vec({0, 0, 0, 3.5})), Error);

  // Jacobian structure: identity on y, t-column from the shift rates and dH/dt,
  // eps-row from the gradient of H, bottom row (0, ..., 0, 1).
  const auto sys = builtin_system("driven_oscillator", Dimension(1));
  const auto dtraj = integrate_flow(sys, point(1, 0, 0.5, 0), 5.0, 1e-3, Method::RK4, false);
  const auto drho = make_rho(dtraj, sys);
  const Vec zp = vec({0.3, 0.2, 0.1, 2.2});
  const Mat j = numeric_jacobian(drho.as_map(), zp, default_step(zp));
  const Vec q = vec({0.3}), p = vec({0.2});
  Mat expected = Mat::Identity(4, 4);
  expected(0, 3) = drho.xi_rate(2.2)(0);
  expected(1, 3) = drho.pi_rate(2.2)(0);
  expected(2, 0) = sys.grad_q(q, p, 2.2)(0);
  expected(2, 1) = sys.grad_p(q, p, 2.2)(0);
  expected(2, 3) = sys.d_t(q, p, 2.2);
  CHECK(max_abs(j - expected) <= 1e-6);
  // The shift rates are the reference velocity and force.
  const auto& s = dtraj.samples()[2200];
  CHECK(std::abs(drho.xi_rate(2.2)(0) - s.v(0)) <= 1e-5);
  CHECK(std::abs(drho.pi_rate(2.2)(0) - s.f(0)) <= 1e-5);
}
