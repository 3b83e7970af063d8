#include "jacobi/formcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace jacobi {

Dimension::Dimension(int n) : n_(n) {
  if (n < 1) {
    throw Error(ErrorCode::InvalidDimension, "dimension must be >= 1, got " + std::to_string(n));
  }
}

BilinearForm::BilinearForm(FormKind kind, Dimension dim, Mat matrix)
    : kind_(kind), dim_(dim), matrix_(std::move(matrix)) {
  if (matrix_.rows() != dim.extended() || matrix_.cols() != dim.extended()) {
    throw Error(ErrorCode::DimensionMismatch, "bilinear form matrix has wrong size");
  }
}

BilinearForm canonical_zeta(Dimension dim) {
  const int size = dim.extended();
  Mat zeta = Mat::Zero(size, size);
  for (int k = 0; k < size; k += 2) {
    zeta(k, k + 1) = 1.0;
    zeta(k + 1, k) = -1.0;
  }
  return BilinearForm(FormKind::Symplectic, dim, std::move(zeta));
}

BilinearForm canonical_eta(Dimension dim) {
  const int size = dim.extended();
  Mat eta = Mat::Zero(size, size);
  eta(size - 1, size - 1) = 1.0;
  return BilinearForm(FormKind::DegenerateOrthogonal, dim, std::move(eta));
}

Mat reduced_zeta(Dimension dim) {
  return canonical_zeta(dim).matrix().topLeftCorner(dim.reduced(), dim.reduced());
}

double max_abs(const Mat& m) noexcept {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double form_residual(const Mat& m, const BilinearForm& form) {
  const Mat& f = form.matrix();
  if (m.rows() != m.cols() || m.rows() != f.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "form_residual: expected " + std::to_string(f.rows()) + "x" + std::to_string(f.rows()) +
                    " matrix, got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  return max_abs(m.transpose() * f * m - f);
}

PhasePoint::PhasePoint(Vec q, Vec p, double eps, double t)
    : q_(std::move(q)), p_(std::move(p)), eps_(eps), t_(t) {
  if (q_.size() < 1 || q_.size() != p_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "PhasePoint: q and p must have equal positive length");
  }
  if (!q_.allFinite() || !p_.allFinite() || !std::isfinite(eps_) || !std::isfinite(t_)) {
    throw Error(ErrorCode::NonFinite, "PhasePoint: non-finite coordinate");
  }
}

PhasePoint PhasePoint::zero(Dimension dim) {
  return PhasePoint(Vec::Zero(dim.n()), Vec::Zero(dim.n()), 0.0, 0.0);
}

PhasePoint PhasePoint::from_flat(const Vec& z) {
  if (z.size() < 4 || z.size() % 2 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "PhasePoint::from_flat: length must be 2n+2 with n >= 1");
  }
  const Dimension dim(static_cast<int>(z.size() / 2 - 1));
  Vec q(dim.n());
  Vec p(dim.n());
  for (int i = 0; i < dim.n(); ++i) {
    q(i) = z(dim.q_index(i));
    p(i) = z(dim.p_index(i));
  }
  return PhasePoint(std::move(q), std::move(p), z(dim.eps_index()), z(dim.t_index()));
}

Vec PhasePoint::flatten() const {
  const Dimension d = dim();
  Vec z(d.extended());
  for (int i = 0; i < d.n(); ++i) {
    z(d.q_index(i)) = q_(i);
    z(d.p_index(i)) = p_(i);
  }
  z(d.eps_index()) = eps_;
  z(d.t_index()) = t_;
  return z;
}

Mat block_permutation(Dimension dim) {
  const int n = dim.n();
  Mat perm = Mat::Zero(dim.extended(), dim.extended());
  for (int i = 0; i < n; ++i) {
    perm(i, dim.q_index(i)) = 1.0;
    perm(n + i, dim.p_index(i)) = 1.0;
  }
  perm(2 * n, dim.eps_index()) = 1.0;
  perm(2 * n + 1, dim.t_index()) = 1.0;
  return perm;
}

Vec to_block_order(const Vec& z) {
  return block_permutation(PhasePoint::from_flat(z).dim()) * z;
}

Vec from_block_order(const Vec& z_block) {
  if (z_block.size() < 4 || z_block.size() % 2 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "from_block_order: length must be 2n+2");
  }
  const Dimension dim(static_cast<int>(z_block.size() / 2 - 1));
  return block_permutation(dim).transpose() * z_block;
}

double default_step(const Vec& z) noexcept {
  const double scale = z.size() == 0 ? 0.0 : z.cwiseAbs().maxCoeff();
  return 1e-5 * std::max(1.0, scale);
}

Mat numeric_jacobian(const MapHandle& f, const Vec& z, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::InvalidParameter, "numeric_jacobian: step must be positive");
  }
  if (z.size() != f.dim.extended()) {
    throw Error(ErrorCode::DimensionMismatch, "numeric_jacobian: point has wrong length");
  }
  const int size = f.dim.extended();
  Mat jac(size, size);
  Vec probe = z;
  for (int col = 0; col < size; ++col) {
    probe(col) = z(col) + h;
    const Vec plus = f.eval(probe);
    probe(col) = z(col) - h;
    const Vec minus = f.eval(probe);
    probe(col) = z(col);
    if (plus.size() != size || minus.size() != size) {
      throw Error(ErrorCode::DimensionMismatch, "numeric_jacobian: map returned wrong length");
    }
    if (!plus.allFinite() || !minus.allFinite()) {
      throw Error(ErrorCode::NonFinite, "numeric_jacobian: non-finite map evaluation");
    }
    jac.col(col) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

Mat numeric_jacobian(const MapHandle& f, const PhasePoint& z, double h) {
  return numeric_jacobian(f, z.flatten(), h);
}

Mat map_jacobian(const MapHandle& f, const Vec& z) {
  if (f.jacobian) {
    Mat jac = f.jacobian(z);
    if (jac.rows() != f.dim.extended() || jac.cols() != f.dim.extended()) {
      throw Error(ErrorCode::DimensionMismatch, "analytic Jacobian has wrong size");
    }
    if (!jac.allFinite()) throw Error(ErrorCode::NonFinite, "analytic Jacobian is not finite");
    return jac;
  }
  return numeric_jacobian(f, z, default_step(z));
}

}  // namespace jacobi
