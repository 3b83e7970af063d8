#include "jacobi/sampling.hpp"

#include <cmath>

namespace jacobi {

Vec Rng::uniform_vec(Eigen::Index size, double lo, double hi) {
  Vec out(size);
  for (Eigen::Index i = 0; i < size; ++i) out(i) = uniform(lo, hi);
  return out;
}

namespace {

Mat pair_block(Dimension dim, int dof, double a, double b, double c, double d) {
  Mat m = Mat::Identity(dim.reduced(), dim.reduced());
  const int q = dim.q_index(dof);
  const int p = dim.p_index(dof);
  m(q, q) = a;
  m(q, p) = b;
  m(p, q) = c;
  m(p, p) = d;
  return m;
}

}  // namespace

SymplecticBlock random_symplectic(Dimension dim, Rng& rng) {
  Mat sigma = Mat::Identity(dim.reduced(), dim.reduced());
  for (int dof = 0; dof < dim.n(); ++dof) {
    const double theta = rng.uniform(-M_PI, M_PI);
    sigma = pair_block(dim, dof, std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta)) * sigma;
    const double shear = rng.uniform(-1.0, 1.0);
    sigma = pair_block(dim, dof, 1.0, shear, 0.0, 1.0) * sigma;
    const double squeeze = rng.uniform(0.5, 2.0);
    sigma = pair_block(dim, dof, squeeze, 0.0, 0.0, 1.0 / squeeze) * sigma;
    const double lower = rng.uniform(-1.0, 1.0);
    sigma = pair_block(dim, dof, 1.0, 0.0, lower, 1.0) * sigma;
  }
  if (dim.n() > 1) {
    // q += S p with S symmetric couples the degrees of freedom.
    Mat coupling = Mat::Identity(dim.reduced(), dim.reduced());
    for (int i = 0; i < dim.n(); ++i) {
      for (int j = i; j < dim.n(); ++j) {
        const double s = rng.uniform(-0.5, 0.5);
        coupling(dim.q_index(i), dim.p_index(j)) = s;
        coupling(dim.q_index(j), dim.p_index(i)) = s;
      }
    }
    sigma = coupling * sigma;
    // diag(R, R) on (q, p) with R orthogonal.
    const Mat rot = random_rotation(dim.n(), rng);
    Mat mix = Mat::Zero(dim.reduced(), dim.reduced());
    for (int i = 0; i < dim.n(); ++i) {
      for (int j = 0; j < dim.n(); ++j) {
        mix(dim.q_index(i), dim.q_index(j)) = rot(i, j);
        mix(dim.p_index(i), dim.p_index(j)) = rot(i, j);
      }
    }
    sigma = mix * sigma;
  }
  return SymplecticBlock(std::move(sigma), 1e-11);
}

Mat random_rotation(int n, Rng& rng) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  }
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

JacobiElement random_jacobi(Dimension dim, Rng& rng, double scale, bool allow_reversal) {
  SymplecticBlock sigma = random_symplectic(dim, rng);
  Vec w = rng.uniform_vec(dim.reduced(), -scale, scale);
  const double r = rng.uniform(-scale, scale);
  const int tr = allow_reversal ? rng.sign() : 1;
  return JacobiElement(std::move(sigma), std::move(w), r, tr);
}

HeisenbergElement random_heisenberg(Dimension dim, Rng& rng, double scale) {
  Vec w = rng.uniform_vec(dim.reduced(), -scale, scale);
  return HeisenbergElement(std::move(w), rng.uniform(-scale, scale));
}

}  // namespace jacobi
