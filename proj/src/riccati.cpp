#include "mcckf/riccati.hpp"

#include "mcckf/errors.hpp"
#include "mcckf/spd.hpp"

namespace mcckf {

RiccatiFilterState riccati_init(const LtiModel& model) {
  RiccatiFilterState s;
  s.xPred = model.x0Mean;
  s.pPred = 0.5 * (model.Pi0 + model.Pi0.transpose());
  s.k = 0;
  return s;
}

namespace {

void checkStep(const RiccatiFilterState& state, const Mat& y,
               const LtiModel& model) {
  if (state.xPred.rows() != model.n() || state.xPred.cols() != 1)
    throw ShapeError("filter state x has wrong shape");
  if (state.pPred.rows() != model.n() || state.pPred.cols() != model.n())
    throw ShapeError("filter state P has wrong shape");
  if (y.rows() != model.m() || y.cols() != 1)
    throw ShapeError("measurement has wrong shape");
}

}  // namespace

RiccatiFilterState kf_step(const RiccatiFilterState& state, const Mat& y,
                           const LtiModel& model) {
  checkStep(state, y, model);
  const Mat& P = state.pPred;
  const Mat e = y - model.H * state.xPred;
  const Mat re = model.R + model.H * P * model.H.transpose();
  SpdFactor reF(re);
  const Mat kp = reF.solve(model.H * P.transpose() * model.F.transpose())
                     .transpose();  // F P H^T R_e^-1
  RiccatiFilterState next;
  next.xPred = model.F * state.xPred + kp * e;
  Mat pNext = model.F * P * model.F.transpose() +
              model.G * model.Q * model.G.transpose() -
              kp * re * kp.transpose();
  next.pPred = 0.5 * (pNext + pNext.transpose());
  next.k = state.k + 1;
  return next;
}

RiccatiFilterState imcc_riccati_step_lambda(const RiccatiFilterState& state,
                                            const Mat& y, const LtiModel& model,
                                            double lambda, double* lambdaOut) {
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  checkStep(state, y, model);
  if (lambdaOut) *lambdaOut = lambda;
  const Mat& P = state.pPred;
  const Mat e = y - model.H * state.xPred;
  const Mat re = lambda * (model.H * P * model.H.transpose()) + model.R;
  SpdFactor reF(re);
  const Mat kp =
      reF.solve(model.H * P.transpose() * model.F.transpose()).transpose();
  RiccatiFilterState next;
  next.xPred = model.F * state.xPred + lambda * (kp * e);
  Mat pNext = model.F * P * model.F.transpose() +
              model.G * model.Q * model.G.transpose() -
              lambda * (kp * re * kp.transpose());
  next.pPred = 0.5 * (pNext + pNext.transpose());
  next.k = state.k + 1;
  return next;
}

RiccatiFilterState imcckf_riccati_step(const RiccatiFilterState& state,
                                       const Mat& y, const LtiModel& model,
                                       const KernelStrategy& strategy,
                                       double* lambdaOut) {
  checkStep(state, y, model);
  const Mat e = y - model.H * state.xPred;
  const Mat rInv = SpdFactor(model.R).inverse();
  const double lambda = lambda_weight(e, rInv, strategy);
  return imcc_riccati_step_lambda(state, y, model, lambda, lambdaOut);
}

TwoStageResult imcckf_two_stage_step(const RiccatiFilterState& state,
                                     const Mat& y, const LtiModel& model,
                                     const KernelStrategy& strategy) {
  checkStep(state, y, model);
  const Mat& P = state.pPred;
  const Mat e = y - model.H * state.xPred;
  const Mat rInv = SpdFactor(model.R).inverse();
  const double lambda = lambda_weight(e, rInv, strategy);

  // Measurement update.
  const Mat re = lambda * (model.H * P * model.H.transpose()) + model.R;
  SpdFactor reF(re);
  const Mat kGain =
      lambda * reF.solve(model.H * P.transpose()).transpose();  // l P H^T Re^-1
  TwoStageResult out;
  out.lambda = lambda;
  out.xPost = state.xPred + kGain * e;
  Mat pPost = (Mat::Identity(model.n(), model.n()) - kGain * model.H) * P;
  out.pPost = 0.5 * (pPost + pPost.transpose());

  // Time update.
  out.next.xPred = model.F * out.xPost;
  Mat pNext = model.F * out.pPost * model.F.transpose() +
              model.G * model.Q * model.G.transpose();
  out.next.pPred = 0.5 * (pNext + pNext.transpose());
  out.next.k = state.k + 1;
  return out;
}

}  // namespace mcckf
