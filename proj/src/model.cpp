#include "mcckf/model.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "mcckf/errors.hpp"
#include "mcckf/spd.hpp"

namespace mcckf {

namespace {

void requirePsd(const Mat& a, const char* what) {
  const Mat s = require_symmetric(a, 1e-8, what);
  if (s.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  const double minEig = es.eigenvalues().minCoeff();
  const double scale = std::max(1.0, std::abs(es.eigenvalues().maxCoeff()));
  if (minEig < -1e-10 * scale)
    throw DefinitenessError(std::string(what) + " is not positive semidefinite",
                            0);
}

}  // namespace

void LtiModel::validate() const {
  const long nn = n(), qq = q(), mm = m();
  auto shape = [](const Mat& a, long r, long c, const char* what) {
    if (a.rows() != r || a.cols() != c)
      throw ShapeError(std::string(what) + " must be " + std::to_string(r) +
                       "x" + std::to_string(c) + ", got " +
                       std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  };
  shape(F, nn, nn, "F");
  shape(G, nn, qq, "G");
  shape(H, mm, nn, "H");
  shape(Q, qq, qq, "Q");
  shape(R, mm, mm, "R");
  shape(x0Mean, nn, 1, "x0_mean");
  shape(Pi0, nn, nn, "Pi0");
  for (const Mat* a : {&F, &G, &H, &Q, &R, &x0Mean, &Pi0})
    if (!is_finite(*a)) throw ShapeError("model matrices must be finite");
  requirePsd(Q, "Q");
  requirePsd(Pi0, "Pi0");
  SpdFactor rCheck(R);  // throws DefinitenessError unless R is SPD
}

LtiModel satellite_model(double q4) {
  if (!(q4 > 0.0)) throw ConfigError("satellite_model: q4 must be > 0");
  LtiModel model;
  model.F.resize(4, 4);
  model.F << 1, 1, 0.5, 0.5,
             0, 1, 1, 1,
             0, 0, 1, 0,
             0, 0, 0, 0.606;
  model.G = Mat::Identity(4, 4);
  model.H.resize(1, 4);
  model.H << 1, 0, 0, 0;
  model.Q = Mat::Zero(4, 4);
  model.Q(3, 3) = q4;
  model.R = Mat::Constant(1, 1, 1.0);
  model.x0Mean = Mat::Zero(4, 1);
  model.Pi0 = Mat::Zero(4, 4);
  model.Pi0.diagonal() << 1.0, 1.0, 1.0, 1e-2;
  return model;
}

nlohmann::json model_to_json(const LtiModel& model) {
  nlohmann::json j;
  j["F"] = mat_to_json(model.F);
  j["G"] = mat_to_json(model.G);
  j["H"] = mat_to_json(model.H);
  j["Q"] = mat_to_json(model.Q);
  j["R"] = mat_to_json(model.R);
  j["x0_mean"] = mat_to_json(model.x0Mean);
  j["Pi0"] = mat_to_json(model.Pi0);
  return j;
}

LtiModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("model JSON must be an object");
  for (const char* key : {"F", "G", "H", "Q", "R", "x0_mean", "Pi0"})
    if (!j.contains(key))
      throw SchemaError(std::string("model JSON missing key \"") + key + "\"");
  LtiModel model;
  model.F = mat_from_json(j["F"]);
  model.G = mat_from_json(j["G"]);
  model.H = mat_from_json(j["H"]);
  model.Q = mat_from_json(j["Q"]);
  model.R = mat_from_json(j["R"]);
  model.x0Mean = mat_from_json(j["x0_mean"]);
  model.Pi0 = mat_from_json(j["Pi0"]);
  model.validate();
  return model;
}

}  // namespace mcckf
