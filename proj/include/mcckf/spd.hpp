#pragma once

// Symmetric positive definite solves via a cached Cholesky factorization.
// Hand-rolled (rather than Eigen's LLT) so a failed pivot reports its index.

#include "mcckf/matrix.hpp"

namespace mcckf {

class SpdFactor {
 public:
  // Symmetrizes and factorizes A = C*C^T (C lower triangular). Throws
  // AsymmetryError on asymmetric input and DefinitenessError (with the
  // pivot index) when a pivot is not strictly positive.
  explicit SpdFactor(const Mat& a, double asymTol = 1e-8);

  long n() const { return chol_.rows(); }
  // Solves A*X = B by forward/back substitution; no inverse is formed.
  Mat solve(const Mat& b) const;
  // Explicit inverse; materialized only where a recursion propagates the
  // inverse itself.
  Mat inverse() const;

 private:
  Mat chol_;
};

// One-shot convenience wrapper around SpdFactor.
Mat spd_solve(const Mat& a, const Mat& b);

}  // namespace mcckf
