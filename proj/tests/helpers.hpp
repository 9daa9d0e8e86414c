#pragma once

// Shared fixtures for the unit tests: seeded random matrices and models.
// Randomness goes through GaussianRng so every platform sees the same cases.

#include <Eigen/Eigenvalues>

#include "mcckf/matrix.hpp"
#include "mcckf/model.hpp"
#include "mcckf/rng.hpp"

namespace mcckf::testutil {

inline Mat randomMat(GaussianRng& rng, long rows, long cols,
                     double scale = 1.0) {
  Mat a(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) a(i, j) = scale * rng.normal();
  return a;
}

inline Mat randomSymmetric(GaussianRng& rng, long n, double scale = 1.0) {
  Mat a = randomMat(rng, n, n, scale);
  return 0.5 * (a + a.transpose());
}

inline Mat randomSpd(GaussianRng& rng, long n, double ridge = 0.5) {
  Mat b = randomMat(rng, n, n);
  return b * b.transpose() + ridge * Mat::Identity(n, n);
}

inline Mat randomPsd(GaussianRng& rng, long n, long rank) {
  Mat b = randomMat(rng, n, rank);
  return b * b.transpose();
}

// Random model with spectral radius of F scaled to <= 0.95 so covariance
// recursions stay bounded over long horizons.
inline LtiModel randomStableModel(GaussianRng& rng, long n, long q, long m) {
  LtiModel model;
  model.F = randomMat(rng, n, n);
  const double rho =
      Eigen::EigenSolver<Mat>(model.F).eigenvalues().cwiseAbs().maxCoeff();
  if (rho > 0.95) model.F *= 0.95 / rho;
  model.G = randomMat(rng, n, q, 0.5);
  model.H = randomMat(rng, m, n);
  model.Q = randomSpd(rng, q, 0.1);
  model.R = randomSpd(rng, m, 0.5);
  model.x0Mean = randomMat(rng, n, 1);
  model.Pi0 = randomSpd(rng, n, 0.1);
  model.validate();
  return model;
}

inline bool exactlyEqual(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a.data()[i] != b.data()[i]) return false;
  return true;
}

inline double maxAbsDiff(const Mat& a, const Mat& b) {
  if (a.size() == 0 && b.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace mcckf::testutil
