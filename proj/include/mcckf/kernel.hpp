#pragma once

// Gaussian kernel and the scalar adjusting weight lambda used by the
// correntropy-based filters.

#include "mcckf/matrix.hpp"

namespace mcckf {

// k_sigma(u) = exp(-u^2 / (2 sigma^2)), in (0, 1].
double gaussian_kernel(double u, double sigma);

// How lambda_k is produced each step:
//  - ConstantLambda: a fixed lambda > 0.
//  - AdaptiveSigma: kernel size sigma_k := ||e_k||_{R^-1}, which collapses
//    the weight to the constant exp(-1/2) whenever e_k != 0 (and 1 at
//    e_k = 0: a perfect prediction is not down-weighted).
//  - FixedSigma: lambda_k = k_sigma(||e_k||_{R^-1}) / k_sigma(||x_pred -
//    F x_post||_{P^-1}); the a priori estimate equals F x_post exactly, so
//    the denominator is k_sigma(0) = 1 and lambda_k = k_sigma(||e_k||_{R^-1}).
//    Time-varying, hence admissible for Riccati-form filters only.
class KernelStrategy {
 public:
  enum class Kind { ConstantLambda, AdaptiveSigma, FixedSigma };

  static KernelStrategy constant(double lambda);
  static KernelStrategy adaptive();
  static KernelStrategy fixedSigma(double sigma);

  Kind kind() const { return kind_; }
  double value() const { return value_; }  // lambda or sigma per kind

  // Chandrasekhar recursions require a constant lambda.
  bool chandrasekharAdmissible() const { return kind_ != Kind::FixedSigma; }
  // The constant lambda this strategy realizes (exp(-1/2) for AdaptiveSigma);
  // throws ConfigError for FixedSigma.
  double constantLambda() const;

 private:
  KernelStrategy(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

// Evaluates lambda_k for innovation e_k given rInv = R^-1.
double lambda_weight(const Mat& ek, const Mat& rInv,
                     const KernelStrategy& strategy);

}  // namespace mcckf
