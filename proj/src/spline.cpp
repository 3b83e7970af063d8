#include "jacobi/spline.hpp"

#include <algorithm>

#include "jacobi/error.hpp"

namespace jacobi {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw Error(ErrorCode::TooFewSamples, "CubicSpline: need >= 2 matching knots");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(x_[k] > x_[k - 1])) throw Error(ErrorCode::InvalidParameter, "CubicSpline: knots must increase");
  }
  m_.assign(n, 0.0);
  if (n < 3) return;

  // Thomas algorithm on the interior equations, m_0 = m_{n-1} = 0.
  const std::size_t k_max = n - 2;
  std::vector<double> diag(k_max), upper(k_max), rhs(k_max);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double h0 = x_[k] - x_[k - 1];
    const double h1 = x_[k + 1] - x_[k];
    diag[k - 1] = 2.0 * (h0 + h1);
    upper[k - 1] = h1;
    rhs[k - 1] = 6.0 * ((y_[k + 1] - y_[k]) / h1 - (y_[k] - y_[k - 1]) / h0);
  }
  for (std::size_t i = 1; i < k_max; ++i) {
    const double lower = x_[i + 1] - x_[i];
    const double factor = lower / diag[i - 1];
    diag[i] -= factor * upper[i - 1];
    rhs[i] -= factor * rhs[i - 1];
  }
  m_[k_max] = rhs[k_max - 1] / diag[k_max - 1];
  for (std::size_t i = k_max - 1; i-- > 0;) {
    m_[i + 1] = (rhs[i] - upper[i] * m_[i + 2]) / diag[i];
  }
}

std::size_t CubicSpline::interval(double x) const {
  if (x < x_.front() || x > x_.back()) {
    throw Error(ErrorCode::OutOfRange, "CubicSpline: evaluation outside tabulated range");
  }
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - x_.begin());
  return std::min(k == 0 ? 0 : k - 1, x_.size() - 2);
}

double CubicSpline::operator()(double x) const {
  const std::size_t k = interval(x);
  const double h = x_[k + 1] - x_[k];
  const double a = (x_[k + 1] - x) / h;
  const double b = (x - x_[k]) / h;
  return a * y_[k] + b * y_[k + 1] + ((a * a * a - a) * m_[k] + (b * b * b - b) * m_[k + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
  const std::size_t k = interval(x);
  const double h = x_[k + 1] - x_[k];
  const double a = (x_[k + 1] - x) / h;
  const double b = (x - x_[k]) / h;
  return (y_[k + 1] - y_[k]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m_[k] + (3.0 * b * b - 1.0) / 6.0 * h * m_[k + 1];
}

}  // namespace jacobi
