#include "mcckf/chandrasekhar.hpp"

#include "mcckf/errors.hpp"
#include "mcckf/spd.hpp"

namespace mcckf {

const char* variant_name(ChandraVariant v) {
  switch (v) {
    case ChandraVariant::Alg1: return "alg1";
    case ChandraVariant::Alg2: return "alg2";
    case ChandraVariant::Alg3: return "alg3";
    case ChandraVariant::Alg4: return "alg4";
  }
  return "?";
}

namespace {

Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

// alpha x alpha inverse of a symmetric (possibly indefinite) matrix via the
// pivoted LDL^T; reports the recursion step on singularity.
Mat symInverse(const Mat& a, long step, const char* what) {
  // Closed forms for the common tiny orders; the pivoted factorization
  // handles the rest.
  if (a.rows() == 1) {
    if (a(0, 0) == 0.0) {
      throw ConditioningError(std::string(what) + " is numerically singular",
                              step);
    }
    Mat r(1, 1);
    r(0, 0) = 1.0 / a(0, 0);
    return r;
  }
  if (a.rows() == 2) {
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    if (det == 0.0) {
      throw ConditioningError(std::string(what) + " is numerically singular",
                              step);
    }
    Mat r(2, 2);
    r << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
    return symmetrize(r / det);
  }
  try {
    const LdlFactorization f = ldlt_bunch_kaufman(a);
    return symmetrize(ldlt_solve(f, Mat::Identity(a.rows(), a.cols())));
  } catch (const ConditioningError&) {
    throw ConditioningError(std::string(what) + " is numerically singular", step);
  }
}

void checkStep(const ChandrasekharFilterState& state, const Mat& y,
               const LtiModel& model, double lambda) {
  if (!(lambda > 0.0))
    throw ConfigError("chandrasekhar_step: lambda must be > 0");
  if (state.xPred.rows() != model.n() || state.xPred.cols() != 1)
    throw ShapeError("chandrasekhar state x has wrong shape");
  if (y.rows() != model.m() || y.cols() != 1)
    throw ShapeError("measurement has wrong shape");
}

}  // namespace

Mat ChandrasekharFilterState::reMatrix() const {
  if (variant == ChandraVariant::Alg3) return SpdFactor(reInv).inverse();
  return re;
}

Mat ChandrasekharFilterState::reInvMatrix() const {
  if (variant == ChandraVariant::Alg2) return SpdFactor(re).inverse();
  return reInv;
}

Mat ChandrasekharFilterState::kpMatrix() const {
  if (variant == ChandraVariant::Alg3) return gain * reInv;
  return gain;
}

Mat ChandrasekharFilterState::deltaP() const {
  if (alpha == 0) return Mat::Zero(xPred.rows(), xPred.rows());
  return L * M * L.transpose();
}

ChandrasekharFilterState chandrasekhar_init(const LtiModel& model, double lambda,
                                            ChandraVariant variant,
                                            double relTol) {
  if (!(lambda > 0.0))
    throw ConfigError("chandrasekhar_init: lambda must be > 0");
  model.validate();

  const Mat pi0 = symmetrize(model.Pi0);
  const Mat re0 = symmetrize(
      model.R + lambda * (model.H * pi0 * model.H.transpose()));
  SpdFactor re0F(re0);
  const Mat kp0 =
      re0F.solve(model.H * pi0 * model.F.transpose()).transpose();
  Mat deltaP = model.F * pi0 * model.F.transpose() +
               model.G * model.Q * model.G.transpose() -
               lambda * (kp0 * re0 * kp0.transpose()) - pi0;
  deltaP = symmetrize(deltaP);

  // A Pi0 already at the steady state leaves deltaP at pure roundoff; treat
  // anything below the construction's noise floor as displacement rank zero
  // so the recursion runs with constant factors.
  const long n = model.n();
  const double buildScale =
      (model.F * pi0 * model.F.transpose()).norm() +
      (model.G * model.Q * model.G.transpose()).norm();
  LowRankFactors factors;
  if (deltaP.norm() <= static_cast<double>(n) * 1e-12 * (1.0 + buildScale)) {
    factors.L = Mat::Zero(n, 0);
    factors.M = Mat::Zero(0, 0);
    factors.alpha = 0;
  } else {
    factors = low_rank_trim(ldlt_bunch_kaufman(deltaP), relTol);
  }

  ChandrasekharFilterState s;
  s.variant = variant;
  s.xPred = model.x0Mean;
  s.L = factors.L;
  s.M = factors.M;
  s.alpha = factors.alpha;
  s.k = 0;
  switch (variant) {
    case ChandraVariant::Alg1:
      s.re = re0;
      s.reInv = re0F.inverse();
      s.gain = kp0;
      break;
    case ChandraVariant::Alg2:
      s.re = re0;
      s.gain = kp0;
      break;
    case ChandraVariant::Alg3:
      s.reInv = re0F.inverse();
      s.gain = kp0 * re0;  // K_0 = K_{p,0} R^l_{e,0} = F Pi0 H^T
      s.Minv = symInverse(s.M, 0, "M_0");
      break;
    case ChandraVariant::Alg4:
      s.re = re0;
      s.reInv = re0F.inverse();
      s.gain = kp0;
      s.Minv = symInverse(s.M, 0, "M_0");
      break;
  }
  return s;
}

namespace {

ChandrasekharFilterState alg1_step(const ChandrasekharFilterState& s,
                                   const Mat& y, const LtiModel& model,
                                   double lambda) {
  const Mat lm = s.L * s.M;                         // n x alpha
  const Mat hl = model.H * s.L;                     // m x alpha
  const Mat lmlH = lm * hl.transpose();             // L M L^T H^T, n x m
  ChandrasekharFilterState n;
  n.variant = s.variant;
  n.alpha = s.alpha;
  n.k = s.k + 1;
  n.re = symmetrize(s.re + lambda * (model.H * lmlH));
  SpdFactor reF(n.re);
  n.reInv = reF.inverse();  // the step's one m x m inversion, cached
  n.gain = (s.gain * s.re + model.F * lmlH) * n.reInv;
  n.L = (model.F - lambda * (n.gain * model.H)) * s.L;  // fresh gain
  const Mat mhrh = s.M * hl.transpose() * s.reInv * hl;  // prior R^-1
  n.M = symmetrize(s.M + lambda * (mhrh * s.M));
  n.xPred = model.F * s.xPred + lambda * (s.gain * (y - model.H * s.xPred));
  return n;
}

ChandrasekharFilterState alg2_step(const ChandrasekharFilterState& s,
                                   const Mat& y, const LtiModel& model,
                                   double lambda) {
  const Mat lm = s.L * s.M;
  const Mat hl = model.H * s.L;
  const Mat lmlH = lm * hl.transpose();
  ChandrasekharFilterState n;
  n.variant = s.variant;
  n.alpha = s.alpha;
  n.k = s.k + 1;
  n.re = symmetrize(s.re + lambda * (model.H * lmlH));
  SpdFactor reF(n.re);  // the step's one m x m inversion (used twice)
  n.gain = reF.solve((s.gain * s.re + model.F * lmlH).transpose()).transpose();
  n.L = (model.F - lambda * (s.gain * model.H)) * s.L;  // prior gain
  const Mat rhl = reF.solve(hl);                        // current R^-1 H L
  n.M = symmetrize(s.M - lambda * (s.M * hl.transpose() * rhl * s.M));
  n.xPred = model.F * s.xPred + lambda * (s.gain * (y - model.H * s.xPred));
  return n;
}

ChandrasekharFilterState alg3_step(const ChandrasekharFilterState& s,
                                   const Mat& y, const LtiModel& model,
                                   double lambda) {
  const Mat hl = model.H * s.L;            // m x alpha
  const Mat rihl = s.reInv * hl;           // [R^l_e]^-1 H L
  ChandrasekharFilterState n;
  n.variant = s.variant;
  n.alpha = s.alpha;
  n.k = s.k + 1;
  n.L = (model.F - lambda * (s.gain * (s.reInv * model.H))) * s.L;
  n.Minv = symmetrize(s.Minv + lambda * (hl.transpose() * rihl));
  n.M = symInverse(n.Minv, s.k, "M update");  // the alpha x alpha inversion
  n.reInv = symmetrize(
      s.reInv - lambda * (rihl * n.M * rihl.transpose()));
  n.gain = s.gain + model.F * (s.L * s.M) * hl.transpose();
  n.xPred = model.F * s.xPred +
            lambda * (s.gain * (s.reInv * (y - model.H * s.xPred)));
  return n;
}

ChandrasekharFilterState alg4_step(const ChandrasekharFilterState& s,
                                   const Mat& y, const LtiModel& model,
                                   double lambda) {
  const Mat lm = s.L * s.M;
  const Mat hl = model.H * s.L;
  const Mat lmlH = lm * hl.transpose();
  ChandrasekharFilterState n;
  n.variant = s.variant;
  n.alpha = s.alpha;
  n.k = s.k + 1;
  n.re = symmetrize(s.re + lambda * (model.H * lmlH));
  SpdFactor reF(n.re);
  n.reInv = reF.inverse();  // the m x m inversion, cached for the next step
  n.gain = (s.gain * s.re + model.F * lmlH) * n.reInv;
  n.L = (model.F - lambda * (s.gain * model.H)) * s.L;  // prior gain
  n.Minv = symmetrize(s.Minv + lambda * (hl.transpose() * s.reInv * hl));
  n.M = symInverse(n.Minv, s.k, "M update");  // the alpha x alpha inversion
  n.xPred = model.F * s.xPred + lambda * (s.gain * (y - model.H * s.xPred));
  return n;
}

}  // namespace

ChandrasekharFilterState chandrasekhar_step(const ChandrasekharFilterState& state,
                                            const Mat& y, const LtiModel& model,
                                            double lambda) {
  checkStep(state, y, model, lambda);
  switch (state.variant) {
    case ChandraVariant::Alg1: return alg1_step(state, y, model, lambda);
    case ChandraVariant::Alg2: return alg2_step(state, y, model, lambda);
    case ChandraVariant::Alg3: return alg3_step(state, y, model, lambda);
    case ChandraVariant::Alg4: return alg4_step(state, y, model, lambda);
  }
  throw ConfigError("chandrasekhar_step: unknown variant");
}

Mat reconstruct_covariance(const std::vector<LowRankFactors>& history,
                           const Mat& Pi0) {
  Mat p = 0.5 * (Pi0 + Pi0.transpose());
  for (const LowRankFactors& f : history)
    if (f.alpha > 0) p += f.L * f.M * f.L.transpose();
  return 0.5 * (p + p.transpose());
}

double lemma1_residual(const ChandrasekharFilterState& current,
                       const ChandrasekharFilterState& previous,
                       const LtiModel& model, double lambda) {
  const Mat dPrev = previous.deltaP();
  const Mat dNew = current.deltaP();
  const Mat kpNew = current.kpMatrix();
  const Mat kpPrev = previous.kpMatrix();
  const Mat riPrev = previous.reInvMatrix();
  const Mat riNew = current.reInvMatrix();
  const Mat ht = model.H.transpose();

  const Mat closedNew = model.F - lambda * (kpNew * model.H);
  const Mat inner1 = dPrev + lambda * (dPrev * ht * riPrev * model.H * dPrev);
  const Mat rhs1 = closedNew * inner1 * closedNew.transpose();

  const Mat closedPrev = model.F - lambda * (kpPrev * model.H);
  const Mat inner2 = dPrev - lambda * (dPrev * ht * riNew * model.H * dPrev);
  const Mat rhs2 = closedPrev * inner2 * closedPrev.transpose();

  return std::max((rhs1 - dNew).norm(), (rhs2 - dNew).norm());
}

}  // namespace mcckf
