// Acceptance suite: one PASS/FAIL line per criterion. Every tolerance used
// here is pinned in this file; oracles are computed independently of the
// library routine under test wherever one exists.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "jacobi/verify.hpp"

using namespace jacobi;

namespace {

// Pinned tolerances.
constexpr double kGroupLawTol = 1e-10;      // criterion 1
constexpr double kIntersectionTol = 1e-12;  // criterion 2, form residuals
constexpr double kRoundTripTol = 1e-10;     // criterion 2, parameter recovery
constexpr double kFlowOmegaTol = 1e-6;      // criterion 4
constexpr double kFlowLambdaTol = 1e-10;    // criterion 4
constexpr double kHamiltonCoarseTol = 1e-5; // criterion 5, dt = 1e-3
constexpr double kHamiltonFineTol = 1e-7;   // criterion 5, dt = 1e-4
constexpr double kHamiltonMinRatio = 50.0;  // criterion 5, when above the rounding floor
constexpr double kRoundingFloor = 1e-9;     // criterion 5
constexpr double kLedgerTol = 1e-5;         // criterion 6
constexpr double kPeriodTol = 1e-9;         // criterion 7
constexpr double kFreeParticleTol = 1e-12;  // criterion 7
constexpr double kEuclideanTol = 1e-12;     // criterion 9
constexpr double kMapOmegaTol = 1e-6;       // criterion 10, finite-difference Jacobians
constexpr double kMapLambdaTol = 1e-6;      // criterion 10
constexpr double kMapTranslationTol = 1e-8; // criterion 10, |w| and |r|

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  if (!out.pass) ++failures;
  std::printf("criterion %2d: %s  %s: %s\n", id, out.pass ? "PASS" : "FAIL", name, out.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c, d);
  return buf;
}

Mat zeta0(int n) {
  Mat z = Mat::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    z(2 * i, 2 * i + 1) = 1;
    z(2 * i + 1, 2 * i) = -1;
  }
  return z;
}

// Upsilon(w, r) assembled from its block layout.
Mat upsilon(const Vec& w, double r) {
  const int m = static_cast<int>(w.size());
  Mat u = Mat::Identity(m + 2, m + 2);
  u.block(0, m + 1, m, 1) = w;
  u.block(m, 0, 1, m) = w.transpose() * zeta0(m / 2);
  u(m, m + 1) = 2 * r;
  return u;
}

Mat embed(const Mat& sigma) {
  const Eigen::Index m = sigma.rows();
  Mat e = Mat::Identity(m + 2, m + 2);
  e.topLeftCorner(m, m) = sigma;
  return e;
}

Mat reversal(int n, int eps) {
  Mat t = Mat::Identity(2 * n + 2, 2 * n + 2);
  t(2 * n, 2 * n) = eps;
  t(2 * n + 1, 2 * n + 1) = eps;
  return t;
}

PhasePoint start(const HamiltonianSystem& sys) {
  const int n = sys.dim.n();
  const Vec q = Vec::LinSpaced(n, 1.0, 0.5), p = Vec::LinSpaced(n, 0.0, 0.3);
  return PhasePoint(q, p, sys.value(q, p, 0.0), 0.0);
}

// Central differences of the stored states against the Hamiltonian's own
// derivatives, independent of verify::hamilton_residual.
double hamilton_oracle(const Trajectory& traj, const HamiltonianSystem& sys) {
  const auto& s = traj.samples();
  double worst = 0;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double span = s[k + 1].z.t() - s[k - 1].z.t();
    const auto& z = s[k].z;
    const Vec dq = (s[k + 1].z.q() - s[k - 1].z.q()) / span;
    const Vec dp = (s[k + 1].z.p() - s[k - 1].z.p()) / span;
    const double de = (s[k + 1].z.eps() - s[k - 1].z.eps()) / span;
    worst = std::max(worst, (dq - sys.grad_p(z.q(), z.p(), z.t())).cwiseAbs().maxCoeff());
    worst = std::max(worst, (dp + sys.grad_q(z.q(), z.p(), z.t())).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(de - sys.d_t(z.q(), z.p(), z.t())));
  }
  return worst;
}

double param_error(const JacobiElement& g, const Mat& sigma, const Vec& w, double r, int eps) {
  return std::max({max_abs(g.sigma().matrix() - sigma), max_abs(g.w() - w), std::abs(g.r() - r),
                   g.tr() == eps ? 0.0 : INFINITY});
}

}  // namespace

int main() {
  report(1, "group-law oracle equivalence", [] {
    Rng rng(101);
    double hom = 0, inv = 0;
    for (int n = 1; n <= 3; ++n) {
      for (int k = 0; k < 500; ++k) {
        const auto a = random_jacobi(Dimension(n), rng, 10.0, true);
        const auto b = random_jacobi(Dimension(n), rng, 10.0, true);
        hom = std::max(hom, max_abs(jacobi_matrix(jacobi_mul(a, b)) - jacobi_matrix(a) * jacobi_matrix(b)));
        inv = std::max(inv, max_abs(jacobi_matrix(jacobi_inv(a)) - jacobi_matrix(a).partialPivLu().inverse()));
      }
    }
    return Outcome{hom <= kGroupLawTol && inv <= kGroupLawTol,
                   fmt("product %.3g, inverse %.3g (tol %.0e)", hom, inv, kGroupLawTol)};
  });

  report(2, "intersection theorem", [] {
    Rng rng(202);
    double res = 0, jac_err = 0, igl_err = 0;
    for (int n = 1; n <= 3; ++n) {
      const Dimension d(n);
      for (int k = 0; k < 200; ++k) {
        const Mat m = jacobi_matrix(random_jacobi(d, rng, 10.0, true));
        res = std::max({res, form_residual(m, canonical_zeta(d)), form_residual(m, canonical_eta(d))});
      }
      for (int k = 0; k < 200; ++k) {
        // Gamma0(sigma, w, r) = Upsilon(w, r) sigma, then the time reversal factor.
        const auto sigma = random_symplectic(d, rng);
        const Vec w = rng.uniform_vec(2 * n, -10, 10);
        const double r = rng.uniform(-10, 10);
        const int eps = rng.sign();
        const Mat m = upsilon(w, r) * embed(sigma.matrix()) * reversal(n, eps);
        jac_err = std::max(jac_err, param_error(jacobi_factor(m, kIntersectionTol), sigma.matrix(), w, r, eps));

        // Lambda = Lambda0(omega, u) Delta(eps).
        const int ks = 2 * n + 1;
        Mat omega;
        do {
          omega = rng.uniform_vec(ks * ks, -10, 10).reshaped(ks, ks);
        } while (std::abs(omega.determinant()) < 1e-3);
        const Vec u = rng.uniform_vec(ks, -10, 10);
        Mat lam0 = Mat::Identity(ks + 1, ks + 1);
        lam0.topLeftCorner(ks, ks) = omega;
        lam0.topRightCorner(ks, 1) = u;
        Mat delta = Mat::Identity(ks + 1, ks + 1);
        delta(ks, ks) = eps;
        const IglElement back = igl_factor(lam0 * delta, kIntersectionTol);
        igl_err = std::max({igl_err, max_abs(back.omega - omega), max_abs(back.u - u),
                            back.eps == eps ? 0.0 : INFINITY});
      }
    }
    return Outcome{res <= kIntersectionTol && jac_err <= kRoundTripTol && igl_err <= kRoundTripTol,
                   fmt("form residual %.3g (tol %.0e), ", res, kIntersectionTol) +
                       fmt("jacobi round trip %.3g, igl round trip %.3g (tol %.0e)", jac_err, igl_err, kRoundTripTol)};
  });

  report(3, "Lie algebra relations", [] {
    double worst = 0;
    for (int n = 1; n <= 4; ++n) {
      const Dimension d(n);
      const auto alg = heisenberg_generators(d);
      const Mat z0 = zeta0(n);
      Mat r_oracle = Mat::Zero(2 * n + 2, 2 * n + 2);
      r_oracle(2 * n, 2 * n + 1) = 2;
      worst = std::max(worst, max_abs(alg.r - r_oracle));
      for (int a = 0; a < 2 * n; ++a) {
        Vec e = Vec::Zero(2 * n);
        e(a) = 1;
        worst = std::max(worst, max_abs(alg.w[a] - (upsilon(e, 0) - Mat::Identity(2 * n + 2, 2 * n + 2))));
        for (int b = 0; b < 2 * n; ++b) {
          worst = std::max(worst, max_abs(alg.w[a] * alg.w[b] - alg.w[b] * alg.w[a] - z0(a, b) * alg.r));
        }
        worst = std::max(worst, max_abs(alg.w[a] * alg.r - alg.r * alg.w[a]));
      }
    }
    return Outcome{worst == 0.0, fmt("max deviation %.3g (exact, n = 1..4)", worst)};
  });

  report(4, "flow is a Jacobimorphism", [] {
    double om = 0, lam = 0;
    int checked = 0, factored = 0;
    for (const auto& name : builtin_system_names()) {
      for (int n = 1; n <= 2; ++n) {
        const Dimension d(n);
        const auto sys = builtin_system(name, d);
        const auto traj = integrate_flow(sys, start(sys), 5.0, 1e-3, Method::RK4, true);
        for (std::size_t k = 0; k < traj.size(); k += 10) {
          const Mat& j = traj.jacobians()[k];
          om = std::max(om, form_residual(j, canonical_zeta(d)));
          lam = std::max(lam, form_residual(j, canonical_eta(d)));
          ++checked;
          try {
            jacobi_factor(j, kFlowOmegaTol);
            ++factored;
          } catch (const Error&) {
          }
        }
      }
    }
    return Outcome{om <= kFlowOmegaTol && lam <= kFlowLambdaTol && factored == checked,
                   fmt("zeta %.3g (tol %.0e), eta %.3g (tol %.0e)", om, kFlowOmegaTol, lam, kFlowLambdaTol) +
                       fmt(", factored %.0f/%.0f", factored, checked)};
  });

  report(5, "Hamilton residual", [] {
    bool pass = true;
    std::string detail;
    for (const auto& name : builtin_system_names()) {
      const auto sys = builtin_system(name, Dimension(1));
      const auto coarse_traj = integrate_flow(sys, start(sys), 5.0, 1e-3, Method::RK4, false);
      const auto fine_traj = integrate_flow(sys, start(sys), 5.0, 1e-4, Method::RK4, false);
      const double coarse = hamilton_residual(coarse_traj, sys);
      const double fine = hamilton_residual(fine_traj, sys);
      // The library residual must agree with the independent differencing.
      const double agree = std::max(std::abs(coarse - hamilton_oracle(coarse_traj, sys)),
                                    std::abs(fine - hamilton_oracle(fine_traj, sys)));
      const bool ratio_ok = coarse <= kRoundingFloor || coarse / fine >= kHamiltonMinRatio;
      pass = pass && coarse <= kHamiltonCoarseTol && fine <= kHamiltonFineTol && ratio_ok && agree <= 1e-15;
      detail += name + fmt(" %.2g->%.2g", coarse, fine) + (coarse > kRoundingFloor ? fmt(" (x%.0f)", coarse / fine) : "") + "; ";
    }
    detail += fmt("tol %.0e / %.0e, ratio >= %.0f above %.0e", kHamiltonCoarseTol, kHamiltonFineTol, kHamiltonMinRatio,
                  kRoundingFloor);
    return Outcome{pass, detail};
  });

  report(6, "energy ledger", [] {
    const auto driven = builtin_system("driven_oscillator", Dimension(1));
    const auto traj = integrate_flow(driven, start(driven), 5.0, 1e-3, Method::RK4, false);
    const auto l = energy_ledger(traj, driven);
    // Independent trapezoid quadrature of the same integrands.
    double kin = 0, work = 0, power = 0;
    const auto& s = traj.samples();
    for (std::size_t k = 1; k < s.size(); ++k) {
      kin += 0.5 * (s[k].v + s[k - 1].v).dot(s[k].z.p() - s[k - 1].z.p());
      work -= 0.5 * (s[k].f + s[k - 1].f).dot(s[k].z.q() - s[k - 1].z.q());
      power += 0.5 * (s[k].r + s[k - 1].r) * (s[k].z.t() - s[k - 1].z.t());
    }
    const double dh = driven.value(s.back().z.q(), s.back().z.p(), s.back().z.t()) -
                      driven.value(s.front().z.q(), s.front().z.p(), s.front().z.t());
    const double oracle_residual = std::abs(dh - (kin + work + power));
    const bool consistent = std::abs(l.residual - oracle_residual) <= 1e-12;

    const auto free = builtin_system("free_particle", Dimension(2));
    const auto fl = energy_ledger(integrate_flow(free, start(free), 5.0, 1e-3, Method::RK4, false), free);
    const bool zeros = fl.kinetic_term == 0 && fl.work_term == 0 && fl.power_term == 0 && fl.delta_h == 0;
    return Outcome{l.residual <= kLedgerTol && consistent && zeros,
                   fmt("driven residual %.3g (tol %.0e), oracle %.3g; free particle terms ", l.residual, kLedgerTol,
                       oracle_residual) +
                       (zeros ? "all exactly 0" : "NOT zero")};
  });

  report(7, "closed-form flows", [] {
    const auto ho = builtin_system("harmonic_oscillator", Dimension(1));
    const PhasePoint z0(Vec::Constant(1, 1.0), Vec::Zero(1), 0.5, 0.0);
    const auto last = integrate_flow(ho, z0, 2 * std::numbers::pi, 1e-3, Method::RK4, false).samples().back().z;
    const double period = std::max(std::abs(last.q()(0) - 1.0), std::abs(last.p()(0)));

    const auto free = builtin_system("free_particle", Dimension(1));
    const PhasePoint f0(Vec::Zero(1), Vec::Constant(1, 2.0), 2.0, 0.0);
    const auto fe = integrate_flow(free, f0, 3.0, 1e-3, Method::RK4, false).samples().back().z;
    const double exact = std::max({std::abs(fe.q()(0) - 6.0), std::abs(fe.p()(0) - 2.0), std::abs(fe.eps() - 2.0),
                                   std::abs(fe.t() - 3.0)});
    return Outcome{period <= kPeriodTol && exact <= kFreeParticleTol,
                   fmt("oscillator after 2pi %.3g (tol %.0e), free particle %.3g (tol %.0e)", period, kPeriodTol, exact,
                       kFreeParticleTol)};
  });

  report(8, "noncommutativity", [] {
    Rng rng(808);
    double worst = 0, inertial = 0;
    auto pick = [&] { return std::round(rng.uniform(-20, 20)); };
    for (int k = 0; k < 100; ++k) {
      const int n = 1 + k % 3;
      VfrView a{Vec(n), Vec(n), 2 * pick()}, b{Vec(n), Vec(n), 2 * pick()};
      for (int i = 0; i < n; ++i) {
        a.v(i) = pick();
        a.f(i) = pick();
        b.v(i) = pick();
        b.f(i) = pick();
      }
      const auto res = noncommutativity_check(a, b);
      const Mat ma = upsilon(from_vfr(a).w(), from_vfr(a).r());
      const Mat mb = upsilon(from_vfr(b).w(), from_vfr(b).r());
      const Mat comm = ma * mb - mb * ma;
      worst = std::max(worst, std::abs(res.commutator_r - comm(2 * n, 2 * n + 1)));

      VfrView ia{a.v, Vec::Zero(n), 0}, ib{b.v, Vec::Zero(n), 0};
      inertial = std::max(inertial, std::abs(noncommutativity_check(ia, ib).commutator_r));
    }
    return Outcome{worst == 0.0 && inertial == 0.0,
                   fmt("max |commutator - matrix oracle| %.3g, inertial commutator %.3g (both exact)", worst, inertial)};
  });

  report(9, "Euclidean embedding", [] {
    Rng rng(909);
    double membership = 0, closure = 0;
    int zero_w = 0, rejected = 0;
    for (int k = 0; k < 100; ++k) {
      const int n = 1 + k % 3;
      const Dimension d(n);
      const Mat rot = random_rotation(n, rng);
      const Vec v = rng.uniform_vec(n, -10, 10);
      const auto g = euclidean_element(rot, v);
      const Mat m = jacobi_matrix(g);
      membership = std::max({membership, form_residual(m, canonical_zeta(d)), form_residual(m, canonical_eta(d))});
      try {
        if (jacobi_factor(m, kEuclideanTol).w().isZero(0)) ++zero_w;
      } catch (const Error&) {
        ++rejected;
      }
      const auto h = euclidean_element(random_rotation(n, rng), rng.uniform_vec(n, -10, 10));
      const VfrView view = to_vfr(jacobi_mul(g, h).heisenberg_part());
      closure = std::max({closure, view.f.cwiseAbs().maxCoeff(), std::abs(view.r_phys)});
    }
    return Outcome{membership <= kEuclideanTol && rejected == 0 && zero_w == 0 && closure <= kEuclideanTol,
                   fmt("membership residual %.3g, rejected %.0f, zero-w %.0f, product f/r %.3g", membership, rejected,
                       zero_w, closure) +
                       fmt(" (tol %.0e)", kEuclideanTol)};
  });

  report(10, "canonical transformations", [] {
    struct Case {
      const char* name;
      int n;
      std::function<Vec(const Vec&)> sigma;
    };
    const std::vector<Case> cases{
        {"q-shear", 1, [](const Vec& y) { return Vec((Vec(2) << y(0) + 1.5 * y(1), y(1)).finished()); }},
        {"p-shear", 1, [](const Vec& y) { return Vec((Vec(2) << y(0), y(1) - 0.8 * y(0)).finished()); }},
        {"rotation", 1,
         [](const Vec& y) {
           const double c = std::cos(0.9), s = std::sin(0.9);
           return Vec((Vec(2) << c * y(0) + s * y(1), -s * y(0) + c * y(1)).finished());
         }},
        {"scaling", 2,
         [](const Vec& y) { return Vec((Vec(4) << 3 * y(0), y(1) / 3, 0.5 * y(2), 2 * y(3)).finished()); }},
        {"kick", 2,
         [](const Vec& y) {
           return Vec((Vec(4) << y(0), y(1) + 0.7 * std::sin(y(0)), y(2), y(3) - 0.2 * y(2) * y(2)).finished());
         }},
    };
    Rng rng(1010);
    bool pass = true;
    double om = 0, lam = 0, trans = 0;
    for (const auto& c : cases) {
      const Dimension d(c.n);
      const int m = 2 * c.n;
      MapHandle lifted{d,
                       [&c, m](const Vec& z) {
                         Vec out = z;
                         out.head(m) = c.sigma(z.head(m));
                         return out;
                       },
                       {}};
      const auto report = check_invariance(lifted, sample_box_probes(d, 10, rng), kMapOmegaTol, kMapLambdaTol);
      pass = pass && report.classification == Classification::Jacobimorphism;
      om = std::max(om, report.omega_residual_max);
      lam = std::max(lam, report.lambda_residual_max);
      for (const auto& p : report.probes) {
        if (!p.factorization) continue;
        trans = std::max({trans, max_abs(p.factorization->w()), std::abs(p.factorization->r())});
      }
    }
    pass = pass && trans <= kMapTranslationTol;
    return Outcome{pass, std::string("5 maps ") + (pass ? "all Jacobimorphism" : "misclassified") +
                             fmt(", zeta %.3g (tol %.0e), eta %.3g, max |w|,|r| %.3g", om, kMapOmegaTol, lam, trans) +
                             fmt(" (tol %.0e)", kMapTranslationTol)};
  });

  std::printf("%d criterion/criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
