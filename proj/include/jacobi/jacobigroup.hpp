#pragma once

#include <vector>

#include "jacobi/formcore.hpp"

namespace jacobi {

// Weyl-Heisenberg element in unpolarized coordinates. `r` is the central
// parameter of the product law; the matrix realization carries 2r.
class HeisenbergElement {
 public:
  HeisenbergElement(Vec w, double r);

  static HeisenbergElement identity(Dimension dim);

  Dimension dim() const { return Dimension(static_cast<int>(w_.size() / 2)); }
  const Vec& w() const noexcept { return w_; }
  double r() const noexcept { return r_; }

 private:
  Vec w_;
  double r_;
};

HeisenbergElement heisenberg_mul(const HeisenbergElement& a, const HeisenbergElement& b);
HeisenbergElement heisenberg_inv(const HeisenbergElement& a);

// 2n x 2n matrix with sigma^T zeta0 sigma = zeta0.
class SymplecticBlock {
 public:
  /// Validates against zeta0 at `tol`; throws NotSymplectic.
  explicit SymplecticBlock(Mat sigma, double tol = kExactTol);

  static SymplecticBlock identity(Dimension dim);

  Dimension dim() const { return Dimension(static_cast<int>(sigma_.rows() / 2)); }
  const Mat& matrix() const noexcept { return sigma_; }

  /// -zeta0 sigma^T zeta0, no factorization needed.
  SymplecticBlock inverse() const;

 private:
  struct Unchecked {};
  SymplecticBlock(Mat sigma, Unchecked) : sigma_(std::move(sigma)) {}
  friend SymplecticBlock operator*(const SymplecticBlock&, const SymplecticBlock&);

  Mat sigma_;
};

SymplecticBlock operator*(const SymplecticBlock& a, const SymplecticBlock& b);

// Element of HSp(2n) x| Z2. The matrix realization is
//   Gamma0(sigma, w, r) * T(tr),   T(tr) = diag(1_{2n}, tr, tr),
// where Gamma0 = [[sigma, 0, w], [w^T zeta0 sigma, 1, 2r], [0, 0, 1]].
class JacobiElement {
 public:
  JacobiElement(SymplecticBlock sigma, Vec w, double r, int tr = +1);

  static JacobiElement identity(Dimension dim);
  static JacobiElement from_heisenberg(const HeisenbergElement& h);
  static JacobiElement time_reversal(Dimension dim);

  Dimension dim() const { return sigma_.dim(); }
  const SymplecticBlock& sigma() const noexcept { return sigma_; }
  const Vec& w() const noexcept { return w_; }
  double r() const noexcept { return r_; }
  int tr() const noexcept { return tr_; }

  HeisenbergElement heisenberg_part() const { return HeisenbergElement(w_, r_); }

 private:
  SymplecticBlock sigma_;
  Vec w_;
  double r_;
  int tr_;
};

Mat jacobi_matrix(const JacobiElement& g);
Mat heisenberg_matrix(const HeisenbergElement& a);
JacobiElement jacobi_mul(const JacobiElement& a, const JacobiElement& b);
JacobiElement jacobi_inv(const JacobiElement& a);

/// Reads (sigma, w, r, tr) out of a (2n+2) matrix after checking, in order:
/// eta residual (NotTimePreserving), the block pattern of Gamma0 * T
/// (PatternViolation), then symplecticity (NotSymplectic).
JacobiElement jacobi_factor(const Mat& m, double tol = kExactTol);

// Lambda = Lambda0(omega, u) * Delta(eps), Delta = diag(1_{2n+1}, eps).
struct IglElement {
  Mat omega;
  Vec u;
  int eps = 1;
};

Mat igl_matrix(const IglElement& g);
IglElement igl_factor(const Mat& lambda, double tol = kExactTol);

struct HeisenbergAlgebra {
  std::vector<Mat> w;  // W_1 .. W_{2n}
  Mat r;
};

HeisenbergAlgebra heisenberg_generators(Dimension dim);

HeisenbergElement conjugate_by_sp(const SymplecticBlock& s, const HeisenbergElement& a);

/// Embeds R in SO(n) as diag(R, R) on (q, p) and v as a pure velocity
/// translation. Throws NotARotation.
JacobiElement euclidean_element(const Mat& rotation, const Vec& v, double tol = 1e-10);

// Velocity / force / power reading of a Weyl-Heisenberg element.
struct VfrView {
  Vec v;
  Vec f;
  double r_phys = 0.0;
};

VfrView to_vfr(const HeisenbergElement& a);
HeisenbergElement from_vfr(const VfrView& view);

}  // namespace jacobi
