#pragma once

#include <functional>

#include <Eigen/Dense>

#include "jacobi/error.hpp"

namespace jacobi {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Default tolerances: exact algebra vs. anything that went through a
// finite-difference stencil.
inline constexpr double kExactTol = 1e-12;
inline constexpr double kFiniteDiffTol = 1e-6;

// Number of position degrees of freedom.
class Dimension {
 public:
  explicit Dimension(int n);

  int n() const noexcept { return n_; }
  int reduced() const noexcept { return 2 * n_; }
  int extended() const noexcept { return 2 * n_ + 2; }

  // Canonical (interleaved) indices into an extended vector.
  int q_index(int i) const noexcept { return 2 * i; }
  int p_index(int i) const noexcept { return 2 * i + 1; }
  int eps_index() const noexcept { return 2 * n_; }
  int t_index() const noexcept { return 2 * n_ + 1; }

  friend bool operator==(Dimension a, Dimension b) noexcept { return a.n_ == b.n_; }

 private:
  int n_;
};

enum class FormKind { Symplectic, DegenerateOrthogonal };

class BilinearForm {
 public:
  BilinearForm(FormKind kind, Dimension dim, Mat matrix);

  FormKind kind() const noexcept { return kind_; }
  Dimension dim() const noexcept { return dim_; }
  const Mat& matrix() const noexcept { return matrix_; }

 private:
  FormKind kind_;
  Dimension dim_;
  Mat matrix_;
};

/// Canonical symplectic matrix on extended phase space: n interleaved
/// [[0,1],[-1,0]] blocks for (q_i,p_i) followed by one for (eps,t).
BilinearForm canonical_zeta(Dimension dim);

/// Degenerate time metric dt^2: zero except the (t,t) entry.
BilinearForm canonical_eta(Dimension dim);

/// The 2n x 2n top-left block of canonical_zeta.
Mat reduced_zeta(Dimension dim);

/// max |M^T F M - F| over entries. Throws DimensionMismatch unless M is
/// square with the form's size.
double form_residual(const Mat& m, const BilinearForm& form);

double max_abs(const Mat& m) noexcept;

// Extended phase space point. Flattening uses the interleaved ordering
// (q1,p1,...,qn,pn,eps,t).
class PhasePoint {
 public:
  PhasePoint(Vec q, Vec p, double eps, double t);

  static PhasePoint zero(Dimension dim);
  static PhasePoint from_flat(const Vec& z);

  Dimension dim() const { return Dimension(static_cast<int>(q_.size())); }
  const Vec& q() const noexcept { return q_; }
  const Vec& p() const noexcept { return p_; }
  double eps() const noexcept { return eps_; }
  double t() const noexcept { return t_; }

  Vec flatten() const;

 private:
  Vec q_;
  Vec p_;
  double eps_;
  double t_;
};

/// Permutation P with z_block = P * z, where z_block = (q1..qn, p1..pn, eps, t).
Mat block_permutation(Dimension dim);
Vec to_block_order(const Vec& z);
Vec from_block_order(const Vec& z_block);

// A map on R^{2n+2}. `jacobian` may be empty; evaluators must be reentrant.
struct MapHandle {
  Dimension dim;
  std::function<Vec(const Vec&)> eval;
  std::function<Mat(const Vec&)> jacobian;
};

/// h = 1e-5 * max(1, |z|_inf)
double default_step(const Vec& z) noexcept;

/// Central-difference Jacobian; throws NonFinite if any evaluation is not finite.
Mat numeric_jacobian(const MapHandle& f, const Vec& z, double h);
Mat numeric_jacobian(const MapHandle& f, const PhasePoint& z, double h);

/// Analytic Jacobian when the handle provides one, else numeric_jacobian
/// at default_step(z).
Mat map_jacobian(const MapHandle& f, const Vec& z);

}  // namespace jacobi
