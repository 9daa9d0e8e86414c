#include <limits>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "helpers.hpp"
#include "mcckf/matrix.hpp"

using namespace mcckf;
using mcckf::testutil::exactlyEqual;
using nlohmann::json;

TEST_CASE("basic arithmetic on small hand-checked cases") {
  Mat a(2, 2);
  a << 1.0, 1.0, 0.0, 1.0;
  Mat v(2, 1);
  v << 1.0, 2.0;

  Mat prod = a * v;
  CHECK(prod(0, 0) == 3.0);
  CHECK(prod(1, 0) == 2.0);

  Mat eye = Mat::Identity(2, 2);
  CHECK(exactlyEqual(eye * a, a));
  CHECK((a - a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("JSON round-trip preserves shape and every entry") {
  GaussianRng rng(11);
  Mat a = testutil::randomMat(rng, 3, 5);
  a(1, 2) = 0.1 + 0.2;  // not exactly representable; must survive round-trip
  Mat b = mat_from_json(mat_to_json(a));
  CHECK(exactlyEqual(a, b));

  Mat empty(0, 0);
  CHECK(exactlyEqual(empty, mat_from_json(mat_to_json(empty))));

  Mat wide(0, 3);
  Mat wideBack = mat_from_json(mat_to_json(wide));
  CHECK(wideBack.rows() == 0);
  CHECK(wideBack.cols() == 3);
}

TEST_CASE("JSON schema violations are rejected") {
  CHECK_THROWS_AS(mat_from_json(json::array()), SchemaError);
  CHECK_THROWS_AS(mat_from_json(json{{"rows", 2}, {"cols", 2}}), SchemaError);
  CHECK_THROWS_AS(
      mat_from_json(json{{"rows", 2}, {"cols", 2}, {"data", {1, 2, 3}}}),
      SchemaError);
  CHECK_THROWS_AS(
      mat_from_json(json{{"rows", 1}, {"cols", 1}, {"data", {"x"}}}),
      SchemaError);
  CHECK_THROWS_AS(
      mat_from_json(json{{"rows", -1}, {"cols", 1}, {"data", json::array()}}),
      SchemaError);
  CHECK_THROWS_AS(
      mat_from_json(json{{"rows", 1.5}, {"cols", 1}, {"data", {1.0}}}),
      SchemaError);

  json withNan = {{"rows", 1}, {"cols", 1}, {"data", {1.0}}};
  withNan["data"][0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(mat_from_json(withNan), SchemaError);
}

TEST_CASE("is_finite flags NaN and Inf") {
  Mat a = Mat::Ones(2, 2);
  CHECK(is_finite(a));
  a(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_FALSE(is_finite(a));
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(is_finite(a));
  CHECK(is_finite(Mat(0, 0)));
}

TEST_CASE("asymmetry measures the max deviation from the transpose") {
  Mat a(2, 2);
  a << 0.0, 1.0, 2.0, 0.0;
  CHECK(asymmetry(a) == 1.0);
  CHECK(asymmetry(Mat::Identity(3, 3)) == 0.0);
  CHECK(asymmetry(Mat(0, 0)) == 0.0);
  CHECK_THROWS_AS(asymmetry(Mat::Ones(2, 3)), ShapeError);
}

TEST_CASE("require_symmetric symmetrizes near-symmetric input and rejects the rest") {
  Mat a(2, 2);
  a << 1.0, 1.0 + 2e-9, 1.0, 1.0;
  Mat s = require_symmetric(a);
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s(0, 1) == doctest::Approx(1.0 + 1e-9).epsilon(1e-15));

  Mat bad(2, 2);
  bad << 0.0, 1.0, 2.0, 0.0;
  CHECK_THROWS_AS(require_symmetric(bad), AsymmetryError);

  // Tolerance scales with the Frobenius norm of the input.
  Mat big = 1e9 * Mat::Identity(2, 2);
  big(0, 1) = 0.5;  // absolute deviation 0.5, relative ~3e-10
  CHECK_NOTHROW(require_symmetric(big));
}

TEST_CASE("rel_diff") {
  Mat a(1, 1), b(1, 1);
  a << 2.0;
  b << 1.0;
  CHECK(rel_diff(a, a) == 0.0);
  CHECK(rel_diff(a, b) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(rel_diff(Mat::Ones(1, 2), Mat::Ones(2, 1)), ShapeError);
}
