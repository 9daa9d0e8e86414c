#pragma once

// Dense matrix substrate. Mat is Eigen's dynamic double matrix; this header
// adds the JSON (de)serialization used by model/trajectory files and the
// small symmetry/finiteness helpers the factorizations rely on.

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "mcckf/errors.hpp"

namespace mcckf {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// ---- JSON form: {"rows": n, "cols": m, "data": [row-major numbers]} ----
nlohmann::json mat_to_json(const Mat& a);
Mat mat_from_json(const nlohmann::json& j);

// True when every entry is finite (no NaN/Inf).
bool is_finite(const Mat& a);

// Max |A - A^T| entry, 0 for empty matrices.
double asymmetry(const Mat& a);

// Throws AsymmetryError when asymmetry(a) > tol * (1 + ||a||_F);
// returns the symmetrized (A + A^T)/2.
Mat require_symmetric(const Mat& a, double tol = 1e-8,
                      const char* what = "matrix");

// Relative difference ||a-b||_F / (1 + ||b||_F).
double rel_diff(const Mat& a, const Mat& b);

}  // namespace mcckf
