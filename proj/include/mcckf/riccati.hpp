#pragma once

// Riccati-form filters in the a priori cycle: a step consumes y_k from the
// state (x_hat_{k|k-1}, P_{k|k-1}) and produces (x_hat_{k+1|k}, P_{k+1|k}).

#include "mcckf/kernel.hpp"
#include "mcckf/matrix.hpp"
#include "mcckf/model.hpp"

namespace mcckf {

struct RiccatiFilterState {
  Mat xPred;  // n x 1, x_hat_{k|k-1}
  Mat pPred;  // n x n, P_{k|k-1} (kept symmetric)
  long k = 0;
};

// Initial state (x0Mean, Pi0) at k = 0.
RiccatiFilterState riccati_init(const LtiModel& model);

// Classical Kalman filter:
//   e_k = y - H x,  R_e = R + H P H^T,  K_p = F P H^T R_e^-1,
//   x+ = F x + K_p e,  P+ = F P F^T + G Q G^T - K_p R_e K_p^T.
RiccatiFilterState kf_step(const RiccatiFilterState& state, const Mat& y,
                           const LtiModel& model);

// Correntropy-weighted step with an explicit lambda >= 0:
//   R_e^l = l H P H^T + R,  K_p = F P H^T [R_e^l]^-1,
//   x+ = F x + l K_p e,  P+ = F P F^T + G Q G^T - l K_p R_e^l K_p^T.
// lambda = 1 reduces to kf_step; lambda = 0 is pure prediction.
RiccatiFilterState imcc_riccati_step_lambda(const RiccatiFilterState& state,
                                            const Mat& y, const LtiModel& model,
                                            double lambda,
                                            double* lambdaOut = nullptr);

// Same step with lambda produced by the kernel strategy.
RiccatiFilterState imcckf_riccati_step(const RiccatiFilterState& state,
                                       const Mat& y, const LtiModel& model,
                                       const KernelStrategy& strategy,
                                       double* lambdaOut = nullptr);

// One measurement-update + time-update cycle of the two-stage form,
// starting from the prior pair:
//   MU: K^l = l P H^T [R_e^l]^-1, x_post = x + K^l e, P_post = (I - K^l H) P
//   TU: x+ = F x_post, P+ = F P_post F^T + G Q G^T
// `next` is the a priori pair for step k+1; the a posteriori pair is
// exposed for callers that want filtered estimates.
struct TwoStageResult {
  RiccatiFilterState next;
  Mat xPost;  // n x 1, x_hat_{k|k}
  Mat pPost;  // n x n, P_{k|k}
  double lambda = 1.0;
};

TwoStageResult imcckf_two_stage_step(const RiccatiFilterState& state,
                                     const Mat& y, const LtiModel& model,
                                     const KernelStrategy& strategy);

}  // namespace mcckf
