#pragma once

// Chandrasekhar-type low-rank recursions for the correntropy-weighted filter
// with constant lambda. Instead of the n x n covariance, they propagate the
// increment Delta P_{k+1|k} = P_{k+1|k} - P_{k|k-1} = L_k M_k L_k^T whose
// width alpha (the displacement rank) is fixed by the initialization.
//
// Four equivalent variants are provided:
//   Alg1: updates M with the prior innovation covariance (cached inverse)
//         and L with the freshly computed gain.
//   Alg2: updates M with the current innovation covariance and L with the
//         prior gain; one m x m inversion per step.
//   Alg3: propagates [R^l_e]^-1 (Sherman-Morrison-Woodbury) and M^-1, plus
//         the unnormalized gain K_k = K_{p,k} R^l_{e,k}; only an alpha x
//         alpha inversion per step.
//   Alg4: symmetric variant — R^l_e and K_p as Alg2, M^-1 as Alg3; one
//         m x m and one alpha x alpha inversion per step.

#include <vector>

#include "mcckf/ldlt.hpp"
#include "mcckf/matrix.hpp"
#include "mcckf/model.hpp"

namespace mcckf {

enum class ChandraVariant { Alg1, Alg2, Alg3, Alg4 };

const char* variant_name(ChandraVariant v);

struct ChandrasekharFilterState {
  ChandraVariant variant = ChandraVariant::Alg1;
  Mat xPred;  // n x 1, x_hat_{k|k-1}
  Mat L;      // n x alpha
  Mat M;      // alpha x alpha symmetric
  Mat Minv;   // alpha x alpha (Alg3/Alg4)
  Mat re;     // m x m R^l_{e,k} (Alg1/2/4)
  Mat reInv;  // m x m [R^l_{e,k}]^-1 (Alg1 cache, Alg3 propagated, Alg4 cache)
  Mat gain;   // n x m: K_{p,k} (Alg1/2/4) or K_k = K_{p,k} R^l_{e,k} (Alg3)
  int alpha = 0;
  long k = 0;

  // Uniform accessors for cross-variant probes (materialize as needed).
  Mat reMatrix() const;     // R^l_{e,k}
  Mat reInvMatrix() const;  // [R^l_{e,k}]^-1
  Mat kpMatrix() const;     // normalized gain K_{p,k}
  Mat deltaP() const;       // L_k M_k L_k^T
};

// Shared initialization ("performed only once"):
//   R^l_{e,0} = R + l H Pi0 H^T,  K_{p,0} = F Pi0 H^T [R^l_{e,0}]^-1,
//   Delta P_{1|0} = F Pi0 F^T + G Q G^T - l K_{p,0} R^l_{e,0} K_{p,0}^T - Pi0,
// factorized by the pivoted LDL^T and trimmed to (L0, M0, alpha).
// relTol < 0 selects the trim default.
ChandrasekharFilterState chandrasekhar_init(const LtiModel& model, double lambda,
                                            ChandraVariant variant,
                                            double relTol = -1.0);

// One step of the variant stored in `state`: consumes y_k, emits
// x_hat_{k+1|k} = F x_hat + l K_{p,k} (y - H x_hat) and the updated factors.
ChandrasekharFilterState chandrasekhar_step(const ChandrasekharFilterState& state,
                                            const Mat& y, const LtiModel& model,
                                            double lambda);

// Pi0 + sum_j L_j M_j L_j^T: the full covariance P_{k+1|k} recovered from the
// propagated factors (history entry j holds the step-j factors).
Mat reconstruct_covariance(const std::vector<LowRankFactors>& history,
                           const Mat& Pi0);

// Verification probe: evaluates both closed-form increment recursions
//   (F - l K_new H) [dP + l dP H^T Rprev^-1 H dP] (F - l K_new H)^T
//   (F - l K_prev H) [dP - l dP H^T Rnew^-1  H dP] (F - l K_prev H)^T
// from the previous step's quantities (dP = Delta P at prev) and returns the
// larger Frobenius discrepancy against the current L_k M_k L_k^T.
double lemma1_residual(const ChandrasekharFilterState& current,
                       const ChandrasekharFilterState& previous,
                       const LtiModel& model, double lambda);

}  // namespace mcckf
