#pragma once

// Discrete-time LTI state-space model
//   x_{k+1} = F x_k + G w_k,   y_k = H x_k + v_k,
// with w_k ~ N(0,Q), v_k ~ N(0,R), E[x_0] = x0Mean, Cov[x_0] = Pi0.

#include <nlohmann/json_fwd.hpp>

#include "mcckf/matrix.hpp"

namespace mcckf {

struct LtiModel {
  Mat F;       // n x n
  Mat G;       // n x q
  Mat H;       // m x n
  Mat Q;       // q x q, symmetric PSD
  Mat R;       // m x m, symmetric PD
  Mat x0Mean;  // n x 1
  Mat Pi0;     // n x n, symmetric PSD

  long n() const { return F.rows(); }
  long q() const { return G.cols(); }
  long m() const { return H.rows(); }

  // Checks dimension coherence, symmetry of Q/R/Pi0, PSD of Q/Pi0 and PD
  // of R; throws ShapeError / AsymmetryError / DefinitenessError.
  void validate() const;
};

// The 4-state in-track satellite-motion benchmark model:
// F = [1 1 .5 .5; 0 1 1 1; 0 0 1 0; 0 0 0 .606], G = I, H = [1 0 0 0],
// Q = diag(0,0,0,q4), R = [1], x0Mean = 0, Pi0 = diag(1,1,1,1e-2).
LtiModel satellite_model(double q4);

// JSON object with keys "F","G","H","Q","R","x0_mean","Pi0", each a matrix
// in the {"rows","cols","data"} form.
nlohmann::json model_to_json(const LtiModel& model);
LtiModel model_from_json(const nlohmann::json& j);

}  // namespace mcckf
