#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "jacobi/sampling.hpp"
#include "jacobi/scenario.hpp"
#include "jacobi/verify.hpp"

namespace jacobi {

namespace {

struct Check {
  std::string name;
  int n;
  double residual;
  double threshold;
  bool passed;
  std::string error;
};

double param_distance(const JacobiElement& a, const JacobiElement& b) {
  double d = max_abs(a.sigma().matrix() - b.sigma().matrix());
  d = std::max(d, max_abs(a.w() - b.w()));
  d = std::max(d, std::abs(a.r() - b.r()));
  return a.tr() == b.tr() ? d : INFINITY;
}

double heis_distance(const HeisenbergElement& a, const HeisenbergElement& b) {
  return std::max(max_abs(a.w() - b.w()), std::abs(a.r() - b.r()));
}

// Integer-valued view so products are exact in double arithmetic.
VfrView integer_vfr(int n, Rng& rng, bool inertial) {
  auto pick = [&] { return std::round(rng.uniform(-10.0, 10.0)); };
  VfrView view{Vec(n), Vec(n), 0.0};
  for (int i = 0; i < n; ++i) {
    view.v(i) = pick();
    view.f(i) = inertial ? 0.0 : pick();
  }
  view.r_phys = inertial ? 0.0 : 2.0 * pick();
  return view;
}

class Suite {
 public:
  Suite(int n, Rng& rng, std::optional<double> fuzz) : dim_(n), rng_(rng), fuzz_(fuzz) {}

  void run(std::vector<Check>& out) {
    record(out, "heisenberg_group_axioms", 1e-10, [&] { return heisenberg_axioms(); });
    record(out, "jacobi_group_axioms", 1e-10, [&] { return jacobi_axioms(); });
    record(out, "jacobi_homomorphism", 1e-10, [&] { return homomorphism(); });
    record(out, "jacobi_inverse_vs_numeric", 1e-10, [&] { return inverse_vs_numeric(); });
    record(out, "intersection_residuals", 1e-12, [&] { return intersection(); });
    record(out, "jacobi_factor_roundtrip", 1e-10, [&] { return factor_roundtrip(); });
    record(out, "igl_factor_roundtrip", 1e-12, [&] { return igl_roundtrip(); });
    record(out, "lie_algebra_relations", 0.0, [&] { return lie_algebra(); });
    record(out, "z2_automorphism", 0.0, [&] { return automorphism(); });
    record(out, "sp_conjugation", 1e-10, [&] { return conjugation(); });
    record(out, "noncommutativity_matrix_oracle", 0.0, [&] { return noncommutativity(); });
    record(out, "euclidean_membership", 1e-12, [&] { return euclidean_membership(); });
    record(out, "euclidean_closure", 1e-12, [&] { return euclidean_closure(); });
  }

 private:
  void record(std::vector<Check>& out, const std::string& name, double threshold, const std::function<double()>& body) {
    Check check{name, dim_.n(), 0.0, threshold, false, {}};
    try {
      check.residual = body();
      check.passed = check.residual <= threshold;
    } catch (const Error& err) {
      check.residual = INFINITY;
      check.error = to_string(err.code());
    }
    out.push_back(std::move(check));
  }

  double heisenberg_axioms() {
    double worst = 0.0;
    const auto e = HeisenbergElement::identity(dim_);
    for (int k = 0; k < 500; ++k) {
      const auto a = random_heisenberg(dim_, rng_);
      const auto b = random_heisenberg(dim_, rng_);
      const auto c = random_heisenberg(dim_, rng_);
      worst = std::max(worst, heis_distance(heisenberg_mul(heisenberg_mul(a, b), c), heisenberg_mul(a, heisenberg_mul(b, c))));
      worst = std::max(worst, heis_distance(heisenberg_mul(e, a), a));
      worst = std::max(worst, heis_distance(heisenberg_mul(a, e), a));
      worst = std::max(worst, heis_distance(heisenberg_mul(a, heisenberg_inv(a)), e));
    }
    return worst;
  }

  double jacobi_axioms() {
    double worst = 0.0;
    const auto e = JacobiElement::identity(dim_);
    for (int k = 0; k < 500; ++k) {
      const auto a = random_jacobi(dim_, rng_, 10.0, true);
      const auto b = random_jacobi(dim_, rng_, 10.0, true);
      const auto c = random_jacobi(dim_, rng_, 10.0, true);
      worst = std::max(worst, param_distance(jacobi_mul(jacobi_mul(a, b), c), jacobi_mul(a, jacobi_mul(b, c))));
      worst = std::max(worst, param_distance(jacobi_mul(e, a), a));
      worst = std::max(worst, param_distance(jacobi_mul(a, e), a));
      worst = std::max(worst, param_distance(jacobi_mul(a, jacobi_inv(a)), e));
      worst = std::max(worst, param_distance(jacobi_mul(jacobi_inv(a), a), e));
    }
    return worst;
  }

  double homomorphism() {
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
      const auto a = random_jacobi(dim_, rng_, 10.0, true);
      const auto b = random_jacobi(dim_, rng_, 10.0, true);
      worst = std::max(worst, max_abs(jacobi_matrix(jacobi_mul(a, b)) - jacobi_matrix(a) * jacobi_matrix(b)));
    }
    return worst;
  }

  double inverse_vs_numeric() {
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
      const auto a = random_jacobi(dim_, rng_, 10.0, true);
      const Mat m = jacobi_matrix(a);
      worst = std::max(worst, max_abs(jacobi_matrix(jacobi_inv(a)) - m.inverse()));
    }
    return worst;
  }

  double intersection() {
    double worst = 0.0;
    const auto zeta = canonical_zeta(dim_);
    const auto eta = canonical_eta(dim_);
    for (int k = 0; k < 200; ++k) {
      const Mat m = jacobi_matrix(random_jacobi(dim_, rng_, 10.0, true));
      worst = std::max({worst, form_residual(m, zeta), form_residual(m, eta)});
    }
    return worst;
  }

  double factor_roundtrip() {
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const auto g = random_jacobi(dim_, rng_, 10.0, true);
      Mat m = jacobi_matrix(g);
      if (fuzz_ && k == 0) m(dim_.eps_index(), 0) += *fuzz_;
      worst = std::max(worst, param_distance(jacobi_factor(m, kExactTol), g));
    }
    return worst;
  }

  double igl_roundtrip() {
    double worst = 0.0;
    const int k_size = dim_.extended() - 1;
    for (int k = 0; k < 200; ++k) {
      IglElement g;
      do {
        g.omega = Mat::NullaryExpr(k_size, k_size, [&](Eigen::Index, Eigen::Index) { return rng_.uniform(-10.0, 10.0); });
      } while (std::abs(g.omega.determinant()) < 1e-3);
      g.u = rng_.uniform_vec(k_size, -10.0, 10.0);
      g.eps = rng_.sign();
      const IglElement back = igl_factor(igl_matrix(g), kExactTol);
      worst = std::max({worst, max_abs(back.omega - g.omega), max_abs(back.u - g.u),
                        back.eps == g.eps ? 0.0 : INFINITY});
    }
    return worst;
  }

  double lie_algebra() {
    const HeisenbergAlgebra alg = heisenberg_generators(dim_);
    const Mat z0 = reduced_zeta(dim_);
    double worst = 0.0;
    for (int a = 0; a < dim_.reduced(); ++a) {
      for (int b = 0; b < dim_.reduced(); ++b) {
        const Mat comm = alg.w[a] * alg.w[b] - alg.w[b] * alg.w[a];
        worst = std::max(worst, max_abs(comm - z0(a, b) * alg.r));
      }
      worst = std::max(worst, max_abs(alg.w[a] * alg.r - alg.r * alg.w[a]));
    }
    return worst;
  }

  double automorphism() {
    double worst = 0.0;
    const Mat rev = jacobi_matrix(JacobiElement::time_reversal(dim_));
    for (int k = 0; k < 100; ++k) {
      const auto g = random_jacobi(dim_, rng_);
      const JacobiElement conj = jacobi_factor(rev * jacobi_matrix(g) * rev, kExactTol);
      const JacobiElement expected(g.sigma(), -g.w(), g.r());
      worst = std::max(worst, param_distance(conj, expected));
    }
    return worst;
  }

  double conjugation() {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const auto s = random_symplectic(dim_, rng_);
      const auto a = random_heisenberg(dim_, rng_);
      const JacobiElement sg(s, Vec::Zero(dim_.reduced()), 0.0);
      const Mat conj = jacobi_matrix(sg) * heisenberg_matrix(a) * jacobi_matrix(jacobi_inv(sg));
      const HeisenbergElement c = conjugate_by_sp(s, a);
      worst = std::max({worst, max_abs(conj - heisenberg_matrix(c)), std::abs(c.r() - a.r())});
    }
    return worst;
  }

  double noncommutativity() {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const VfrView a = integer_vfr(dim_.n(), rng_, false);
      const VfrView b = integer_vfr(dim_.n(), rng_, false);
      const NoncommutativityResult res = noncommutativity_check(a, b);
      const Mat ma = heisenberg_matrix(from_vfr(a));
      const Mat mb = heisenberg_matrix(from_vfr(b));
      const int e = dim_.eps_index(), t = dim_.t_index();
      const double oracle = (ma * mb)(e, t) - (mb * ma)(e, t);
      worst = std::max(worst, std::abs(res.commutator_r - oracle));

      const VfrView ia = integer_vfr(dim_.n(), rng_, true);
      const VfrView ib = integer_vfr(dim_.n(), rng_, true);
      worst = std::max(worst, std::abs(noncommutativity_check(ia, ib).commutator_r));
    }
    return worst;
  }

  double euclidean_membership() {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Mat rot = random_rotation(dim_.n(), rng_);
      const Vec v = rng_.uniform_vec(dim_.n(), -10.0, 10.0);
      const JacobiElement g = euclidean_element(rot, v);
      const JacobiElement f = jacobi_factor(jacobi_matrix(g), kExactTol);
      // A nonzero velocity must show up as a nonzero translation.
      if (f.w().cwiseAbs().maxCoeff() == 0.0) return INFINITY;
      worst = std::max(worst, param_distance(f, g));
    }
    return worst;
  }

  double euclidean_closure() {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const JacobiElement a = euclidean_element(random_rotation(dim_.n(), rng_), rng_.uniform_vec(dim_.n(), -10, 10));
      const JacobiElement b = euclidean_element(random_rotation(dim_.n(), rng_), rng_.uniform_vec(dim_.n(), -10, 10));
      const VfrView view = to_vfr(jacobi_mul(a, b).heisenberg_part());
      worst = std::max({worst, view.f.cwiseAbs().maxCoeff(), std::abs(view.r_phys)});
    }
    return worst;
  }

  Dimension dim_;
  Rng& rng_;
  std::optional<double> fuzz_;
};

}  // namespace

SelftestResult selftest(const SelftestOptions& options) {
  std::vector<int> dims = options.n ? std::vector<int>{*options.n} : std::vector<int>{1, 2, 3};
  Rng rng(options.seed);
  std::vector<Check> checks;
  for (int n : dims) Suite(n, rng, options.fuzz).run(checks);

  SelftestResult result;
  nlohmann::json list = nlohmann::json::array();
  for (const Check& c : checks) {
    nlohmann::json entry{{"name", c.name}, {"n", c.n}, {"threshold", c.threshold}, {"passed", c.passed}};
    entry["residual"] = std::isfinite(c.residual) ? nlohmann::json(c.residual) : nlohmann::json(nullptr);
    if (!c.error.empty()) entry["error"] = c.error;
    list.push_back(std::move(entry));
    result.passed = result.passed && c.passed;
  }
  nlohmann::json opts{{"seed", options.seed}};
  opts["n"] = options.n ? nlohmann::json(*options.n) : nlohmann::json(dims);
  opts["fuzz"] = options.fuzz ? nlohmann::json(*options.fuzz) : nlohmann::json(nullptr);
  result.summary = nlohmann::json{{"version", version()}, {"config", opts}, {"checks", list}, {"passed", result.passed}};
  return result;
}

}  // namespace jacobi
