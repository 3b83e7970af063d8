#include "jacobi/jacobigroup.hpp"

#include <cmath>
#include <string>

namespace jacobi {

namespace {

void require_same_dim(Dimension a, Dimension b, const char* where) {
  if (!(a == b)) {
    throw Error(ErrorCode::DimensionMismatch, std::string(where) + ": operands have different n (" +
                                                  std::to_string(a.n()) + " vs " + std::to_string(b.n()) + ")");
  }
}

// zeta0 applied without forming the matrix: (zeta0 x)_{2i} = x_{2i+1},
// (zeta0 x)_{2i+1} = -x_{2i}.
Vec apply_zeta0(const Vec& x) {
  Vec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); i += 2) {
    out(i) = x(i + 1);
    out(i + 1) = -x(i);
  }
  return out;
}

// a^T zeta0 b
double symplectic_pairing(const Vec& a, const Vec& b) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.size(); i += 2) sum += a(i) * b(i + 1) - a(i + 1) * b(i);
  return sum;
}

int check_tr(int tr) {
  if (tr != 1 && tr != -1) throw Error(ErrorCode::InvalidParameter, "time-reversal sign must be +1 or -1");
  return tr;
}

}  // namespace

HeisenbergElement::HeisenbergElement(Vec w, double r) : w_(std::move(w)), r_(r) {
  if (w_.size() < 2 || w_.size() % 2 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "HeisenbergElement: w must have length 2n, n >= 1");
  }
  if (!w_.allFinite() || !std::isfinite(r_)) throw Error(ErrorCode::NonFinite, "HeisenbergElement: non-finite parameter");
}

HeisenbergElement HeisenbergElement::identity(Dimension dim) { return HeisenbergElement(Vec::Zero(dim.reduced()), 0.0); }

HeisenbergElement heisenberg_mul(const HeisenbergElement& a, const HeisenbergElement& b) {
  require_same_dim(a.dim(), b.dim(), "heisenberg_mul");
  return HeisenbergElement(a.w() + b.w(), a.r() + b.r() + 0.5 * symplectic_pairing(a.w(), b.w()));
}

HeisenbergElement heisenberg_inv(const HeisenbergElement& a) { return HeisenbergElement(-a.w(), -a.r()); }

SymplecticBlock::SymplecticBlock(Mat sigma, double tol) : sigma_(std::move(sigma)) {
  if (sigma_.rows() != sigma_.cols() || sigma_.rows() < 2 || sigma_.rows() % 2 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "SymplecticBlock: matrix must be 2n x 2n");
  }
  if (!sigma_.allFinite()) throw Error(ErrorCode::NonFinite, "SymplecticBlock: non-finite entry");
  const Mat z0 = reduced_zeta(dim());
  const double residual = max_abs(sigma_.transpose() * z0 * sigma_ - z0);
  if (!(residual <= tol)) {
    throw Error(ErrorCode::NotSymplectic, "SymplecticBlock: residual " + std::to_string(residual) + " exceeds tolerance");
  }
}

SymplecticBlock SymplecticBlock::identity(Dimension dim) {
  return SymplecticBlock(Mat::Identity(dim.reduced(), dim.reduced()), Unchecked{});
}

SymplecticBlock SymplecticBlock::inverse() const {
  const Mat z0 = reduced_zeta(dim());
  return SymplecticBlock(Mat(-z0 * sigma_.transpose() * z0), Unchecked{});
}

SymplecticBlock operator*(const SymplecticBlock& a, const SymplecticBlock& b) {
  require_same_dim(a.dim(), b.dim(), "SymplecticBlock product");
  return SymplecticBlock(Mat(a.sigma_ * b.sigma_), SymplecticBlock::Unchecked{});
}

JacobiElement::JacobiElement(SymplecticBlock sigma, Vec w, double r, int tr)
    : sigma_(std::move(sigma)), w_(std::move(w)), r_(r), tr_(check_tr(tr)) {
  if (w_.size() != sigma_.dim().reduced()) throw Error(ErrorCode::DimensionMismatch, "JacobiElement: w has wrong length");
  if (!w_.allFinite() || !std::isfinite(r_)) throw Error(ErrorCode::NonFinite, "JacobiElement: non-finite parameter");
}

JacobiElement JacobiElement::identity(Dimension dim) {
  return JacobiElement(SymplecticBlock::identity(dim), Vec::Zero(dim.reduced()), 0.0, +1);
}

JacobiElement JacobiElement::from_heisenberg(const HeisenbergElement& h) {
  return JacobiElement(SymplecticBlock::identity(h.dim()), h.w(), h.r(), +1);
}

JacobiElement JacobiElement::time_reversal(Dimension dim) {
  return JacobiElement(SymplecticBlock::identity(dim), Vec::Zero(dim.reduced()), 0.0, -1);
}

Mat jacobi_matrix(const JacobiElement& g) {
  const Dimension dim = g.dim();
  const int m = dim.reduced();
  const int e = dim.eps_index();
  const int t = dim.t_index();
  const Mat& sigma = g.sigma().matrix();
  const double tr = g.tr();

  Mat out = Mat::Zero(dim.extended(), dim.extended());
  out.topLeftCorner(m, m) = sigma;
  out.block(0, t, m, 1) = tr * g.w();
  // w^T zeta0 sigma = -(zeta0 w)^T sigma
  out.block(e, 0, 1, m) = -(apply_zeta0(g.w()).transpose() * sigma);
  out(e, e) = tr;
  out(e, t) = tr * 2.0 * g.r();
  out(t, t) = tr;
  return out;
}

Mat heisenberg_matrix(const HeisenbergElement& a) { return jacobi_matrix(JacobiElement::from_heisenberg(a)); }

JacobiElement jacobi_mul(const JacobiElement& a, const JacobiElement& b) {
  require_same_dim(a.dim(), b.dim(), "jacobi_mul");
  // Gamma0_a T_a Gamma0_b T_b = Gamma0_a (T_a Gamma0_b T_a^-1) T_a T_b and
  // T Gamma0(S, w, r) T^-1 = Gamma0(S, tr w, r).
  const Vec wb = a.tr() * b.w();
  const Vec sa_wb = a.sigma().matrix() * wb;
  const double r = a.r() + b.r() + 0.5 * symplectic_pairing(a.w(), sa_wb);
  return JacobiElement(a.sigma() * b.sigma(), a.w() + sa_wb, r, a.tr() * b.tr());
}

JacobiElement jacobi_inv(const JacobiElement& a) {
  const SymplecticBlock sigma_inv = a.sigma().inverse();
  const Vec w = -static_cast<double>(a.tr()) * (sigma_inv.matrix() * a.w());
  return JacobiElement(sigma_inv, w, -a.r(), a.tr());
}

JacobiElement jacobi_factor(const Mat& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 4 || m.rows() % 2 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "jacobi_factor: matrix must be (2n+2) x (2n+2)");
  }
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "jacobi_factor: non-finite entry");
  const Dimension dim(static_cast<int>(m.rows() / 2 - 1));
  const int n2 = dim.reduced();
  const int e = dim.eps_index();
  const int t = dim.t_index();

  const double eta_res = form_residual(m, canonical_eta(dim));
  if (!(eta_res <= tol)) {
    throw Error(ErrorCode::NotTimePreserving, "jacobi_factor: eta residual " + std::to_string(eta_res));
  }
  const int tr = m(t, t) < 0.0 ? -1 : 1;

  const Mat sigma = m.topLeftCorner(n2, n2);
  const Vec w = tr * m.block(0, t, n2, 1);
  const double r = 0.5 * tr * m(e, t);

  // Gamma0 * T pattern: eps column (0, tr, 0), eps-row y-block w^T zeta0 sigma.
  double pattern = std::abs(m(e, e) - tr);
  pattern = std::max(pattern, m.block(0, e, n2, 1).cwiseAbs().maxCoeff());
  pattern = std::max(pattern, std::abs(m(t, e)));
  const Eigen::RowVectorXd expected_row = -(apply_zeta0(w).transpose() * sigma);
  pattern = std::max(pattern, (m.block(e, 0, 1, n2) - expected_row).cwiseAbs().maxCoeff());
  if (!(pattern <= tol)) {
    throw Error(ErrorCode::PatternViolation, "jacobi_factor: block pattern deviates by " + std::to_string(pattern));
  }

  // M T(tr)^-1 = M T(tr) must be in Sp(2n+2).
  Mat untwisted = m;
  untwisted.col(e) *= tr;
  untwisted.col(t) *= tr;
  const double zeta_res = form_residual(untwisted, canonical_zeta(dim));
  if (!(zeta_res <= tol)) {
    throw Error(ErrorCode::NotSymplectic, "jacobi_factor: zeta residual " + std::to_string(zeta_res));
  }
  return JacobiElement(SymplecticBlock(sigma, tol), w, r, tr);
}

Mat igl_matrix(const IglElement& g) {
  const Eigen::Index k = g.omega.rows();
  if (g.omega.cols() != k || g.u.size() != k || k < 3 || k % 2 != 1) {
    throw Error(ErrorCode::DimensionMismatch, "igl_matrix: omega must be (2n+1) square and u of length 2n+1");
  }
  check_tr(g.eps);
  Mat out = Mat::Zero(k + 1, k + 1);
  out.topLeftCorner(k, k) = g.omega;
  out.block(0, k, k, 1) = g.eps * g.u;
  out(k, k) = g.eps;
  return out;
}

IglElement igl_factor(const Mat& lambda, double tol) {
  if (lambda.rows() != lambda.cols() || lambda.rows() < 4 || lambda.rows() % 2 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "igl_factor: matrix must be (2n+2) x (2n+2)");
  }
  if (!lambda.allFinite()) throw Error(ErrorCode::NonFinite, "igl_factor: non-finite entry");
  const Dimension dim(static_cast<int>(lambda.rows() / 2 - 1));
  const double eta_res = form_residual(lambda, canonical_eta(dim));
  if (!(eta_res <= tol)) {
    throw Error(ErrorCode::NotTimePreserving, "igl_factor: eta residual " + std::to_string(eta_res));
  }
  const Eigen::Index k = lambda.rows() - 1;
  IglElement g;
  g.eps = lambda(k, k) < 0.0 ? -1 : 1;
  g.omega = lambda.topLeftCorner(k, k);
  g.u = g.eps * lambda.block(0, k, k, 1);
  if (g.omega.fullPivLu().rank() < k) {
    throw Error(ErrorCode::InvalidParameter, "igl_factor: omega block is singular");
  }
  return g;
}

HeisenbergAlgebra heisenberg_generators(Dimension dim) {
  // d/dw^a of [[1, 0, w], [w^T zeta0, 1, 2r], [0, 0, 1]] and d/dr of the same.
  const int size = dim.extended();
  const int e = dim.eps_index();
  const int t = dim.t_index();
  const Mat z0 = reduced_zeta(dim);
  HeisenbergAlgebra alg;
  for (int a = 0; a < dim.reduced(); ++a) {
    Mat gen = Mat::Zero(size, size);
    gen(a, t) = 1.0;
    gen.block(e, 0, 1, dim.reduced()) = z0.row(a);
    alg.w.push_back(std::move(gen));
  }
  alg.r = Mat::Zero(size, size);
  alg.r(e, t) = 2.0;
  return alg;
}

HeisenbergElement conjugate_by_sp(const SymplecticBlock& s, const HeisenbergElement& a) {
  require_same_dim(s.dim(), a.dim(), "conjugate_by_sp");
  return HeisenbergElement(s.matrix() * a.w(), a.r());
}

JacobiElement euclidean_element(const Mat& rotation, const Vec& v, double tol) {
  const Eigen::Index n = rotation.rows();
  if (rotation.cols() != n || v.size() != n || n < 1) {
    throw Error(ErrorCode::DimensionMismatch, "euclidean_element: R must be n x n and v of length n");
  }
  const double orth = max_abs(rotation.transpose() * rotation - Mat::Identity(n, n));
  if (!(orth <= tol) || !(std::abs(rotation.determinant() - 1.0) <= tol)) {
    throw Error(ErrorCode::NotARotation, "euclidean_element: R is not in SO(n)");
  }
  const Dimension dim(static_cast<int>(n));
  Mat sigma = Mat::Zero(dim.reduced(), dim.reduced());
  Vec w = Vec::Zero(dim.reduced());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      sigma(dim.q_index(i), dim.q_index(j)) = rotation(i, j);
      sigma(dim.p_index(i), dim.p_index(j)) = rotation(i, j);
    }
    w(dim.q_index(i)) = v(i);
  }
  return JacobiElement(SymplecticBlock(std::move(sigma), tol), std::move(w), 0.0, +1);
}

VfrView to_vfr(const HeisenbergElement& a) {
  const Dimension dim = a.dim();
  VfrView view{Vec(dim.n()), Vec(dim.n()), 2.0 * a.r()};
  for (int i = 0; i < dim.n(); ++i) {
    view.v(i) = a.w()(dim.q_index(i));
    view.f(i) = a.w()(dim.p_index(i));
  }
  return view;
}

HeisenbergElement from_vfr(const VfrView& view) {
  if (view.v.size() != view.f.size()) throw Error(ErrorCode::DimensionMismatch, "from_vfr: v and f differ in length");
  const Dimension dim(static_cast<int>(view.v.size()));
  Vec w(dim.reduced());
  for (int i = 0; i < dim.n(); ++i) {
    w(dim.q_index(i)) = view.v(i);
    w(dim.p_index(i)) = view.f(i);
  }
  return HeisenbergElement(std::move(w), 0.5 * view.r_phys);
}

}  // namespace jacobi
