#include "mcckf/spd.hpp"

#include <cmath>

#include "mcckf/errors.hpp"

namespace mcckf {

SpdFactor::SpdFactor(const Mat& a, double asymTol) {
  if (a.rows() != a.cols()) throw ShapeError("SpdFactor: matrix must be square");
  const long n = a.rows();
  const Mat s = (n == 0) ? Mat(0, 0) : require_symmetric(a, asymTol, "spd input");
  chol_ = Mat::Zero(n, n);
  for (long j = 0; j < n; ++j) {
    double d = s(j, j);
    for (long k = 0; k < j; ++k) d -= chol_(j, k) * chol_(j, k);
    if (!(d > 0.0))
      throw DefinitenessError("matrix is not positive definite",
                              static_cast<int>(j));
    chol_(j, j) = std::sqrt(d);
    for (long i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (long k = 0; k < j; ++k) v -= chol_(i, k) * chol_(j, k);
      chol_(i, j) = v / chol_(j, j);
    }
  }
}

Mat SpdFactor::solve(const Mat& b) const {
  const long n = chol_.rows();
  if (b.rows() != n) throw ShapeError("SpdFactor::solve: rhs row count mismatch");
  Mat y = b;
  for (long i = 0; i < n; ++i) {
    for (long k = 0; k < i; ++k) y.row(i) -= chol_(i, k) * y.row(k);
    y.row(i) /= chol_(i, i);
  }
  for (long i = n - 1; i >= 0; --i) {
    for (long k = i + 1; k < n; ++k) y.row(i) -= chol_(k, i) * y.row(k);
    y.row(i) /= chol_(i, i);
  }
  return y;
}

Mat SpdFactor::inverse() const {
  const long n = chol_.rows();
  Mat inv = solve(Mat::Identity(n, n));
  return 0.5 * (inv + inv.transpose());
}

Mat spd_solve(const Mat& a, const Mat& b) { return SpdFactor(a).solve(b); }

}  // namespace mcckf
