#include "mcckf/matrix.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace mcckf {

nlohmann::json mat_to_json(const Mat& a) {
  nlohmann::json j;
  j["rows"] = a.rows();
  j["cols"] = a.cols();
  std::vector<double> data;
  data.reserve(static_cast<size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) data.push_back(a(i, k));
  j["data"] = data;
  return j;
}

Mat mat_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("data"))
    throw SchemaError("matrix JSON must be {\"rows\",\"cols\",\"data\"}");
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
    throw SchemaError("matrix rows/cols must be integers");
  const auto rows = j["rows"].get<long>();
  const auto cols = j["cols"].get<long>();
  if (rows < 0 || cols < 0) throw SchemaError("matrix rows/cols must be >= 0");
  if (!j["data"].is_array())
    throw SchemaError("matrix data must be an array of numbers");
  const auto& data = j["data"];
  if (static_cast<long>(data.size()) != rows * cols)
    throw SchemaError("matrix data length " + std::to_string(data.size()) +
                      " does not match rows*cols = " +
                      std::to_string(rows * cols));
  Mat a(rows, cols);
  long idx = 0;
  for (long i = 0; i < rows; ++i)
    for (long k = 0; k < cols; ++k) {
      if (!data[idx].is_number())
        throw SchemaError("matrix data entry " + std::to_string(idx) +
                          " is not a number");
      a(i, k) = data[idx].get<double>();
      ++idx;
    }
  if (!is_finite(a)) throw SchemaError("matrix contains NaN/Inf");
  return a;
}

bool is_finite(const Mat& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (!std::isfinite(a.data()[i])) return false;
  return true;
}

double asymmetry(const Mat& a) {
  if (a.rows() != a.cols())
    throw ShapeError("asymmetry: matrix must be square, got " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  if (a.size() == 0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

Mat require_symmetric(const Mat& a, double tol, const char* what) {
  const double dev = asymmetry(a);
  if (dev > tol * (1.0 + a.norm()))
    throw AsymmetryError(std::string(what) + " is not symmetric: max |A-A^T| = " +
                         std::to_string(dev));
  return 0.5 * (a + a.transpose());
}

double rel_diff(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("rel_diff: shape mismatch");
  return (a - b).norm() / (1.0 + b.norm());
}

}  // namespace mcckf
