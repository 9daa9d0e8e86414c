#include "mcckf/kernel.hpp"

#include <cmath>

#include "mcckf/errors.hpp"

namespace mcckf {

double gaussian_kernel(double u, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian_kernel: sigma must be > 0");
  return std::exp(-(u * u) / (2.0 * sigma * sigma));
}

KernelStrategy KernelStrategy::constant(double lambda) {
  if (!(lambda > 0.0))
    throw ConfigError("KernelStrategy: constant lambda must be > 0");
  return KernelStrategy(Kind::ConstantLambda, lambda);
}

KernelStrategy KernelStrategy::adaptive() {
  return KernelStrategy(Kind::AdaptiveSigma, 0.0);
}

KernelStrategy KernelStrategy::fixedSigma(double sigma) {
  if (!(sigma > 0.0))
    throw ConfigError("KernelStrategy: fixed sigma must be > 0");
  return KernelStrategy(Kind::FixedSigma, sigma);
}

double KernelStrategy::constantLambda() const {
  switch (kind_) {
    case Kind::ConstantLambda:
      return value_;
    case Kind::AdaptiveSigma:
      return std::exp(-0.5);
    case Kind::FixedSigma:
      break;
  }
  throw ConfigError("FixedSigma yields a time-varying lambda; no constant");
}

double lambda_weight(const Mat& ek, const Mat& rInv,
                     const KernelStrategy& strategy) {
  if (strategy.kind() == KernelStrategy::Kind::ConstantLambda)
    return strategy.value();
  if (ek.cols() != 1 || rInv.rows() != ek.rows() || rInv.cols() != ek.rows())
    throw ShapeError("lambda_weight: e_k must be m x 1 and rInv m x m");
  const double normSq = (ek.transpose() * rInv * ek)(0, 0);
  const double norm = std::sqrt(std::max(0.0, normSq));
  if (strategy.kind() == KernelStrategy::Kind::AdaptiveSigma) {
    // sigma_k := ||e_k||_{R^-1} makes k_sigma(||e_k||) = exp(-1/2);
    // a zero innovation leaves the prediction un-down-weighted.
    return norm == 0.0 ? 1.0 : std::exp(-0.5);
  }
  // FixedSigma: the denominator argument ||x_pred - F x_post|| is
  // identically zero, so lambda_k = k_sigma(||e_k||_{R^-1}).
  return gaussian_kernel(norm, strategy.value());
}

}  // namespace mcckf
