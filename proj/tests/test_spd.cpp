#include <string>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "helpers.hpp"
#include "mcckf/spd.hpp"

using namespace mcckf;
using namespace mcckf::testutil;

TEST_CASE("identity and scaled identity solve exactly") {
  Mat b = Mat::Ones(3, 2);
  CHECK(maxAbsDiff(spd_solve(Mat::Identity(3, 3), b), b) == 0.0);
  // The factor of 2I is sqrt(2)I; two substitutions round once each.
  CHECK(maxAbsDiff(spd_solve(2.0 * Mat::Identity(2, 2), Mat::Identity(2, 2)),
                   0.5 * Mat::Identity(2, 2)) <= 1e-15);
}

TEST_CASE("hand-checked 2x2 solve") {
  Mat a(2, 2);
  a << 2.0, 1.0, 1.0, 2.0;
  Mat b(2, 1);
  b << 1.0, 1.0;
  Mat x = spd_solve(a, b);
  CHECK(x(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(x(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("residual bound on random SPD systems") {
  GaussianRng rng(505);
  for (int t = 0; t < 50; ++t) {
    const long n = 1 + (t % 10);
    Mat a = randomSpd(rng, n, 0.05);
    Mat b = randomMat(rng, n, 3);
    Mat x = spd_solve(a, b);

    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    const double kappa =
        es.eigenvalues()(n - 1) / es.eigenvalues()(0);  // ascending order
    CHECK((a * x - b).norm() <= 1e-8 * kappa * b.norm());
  }
}

TEST_CASE("inverse multiplies back to the identity") {
  GaussianRng rng(606);
  Mat a = randomSpd(rng, 5);
  SpdFactor f(a);
  CHECK((a * f.inverse() - Mat::Identity(5, 5)).norm() <= 1e-10);
  CHECK(f.n() == 5);
}

TEST_CASE("indefinite input reports the failing pivot index") {
  Mat a(2, 2);
  a << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
  bool threw = false;
  try {
    SpdFactor f(a);
  } catch (const DefinitenessError& e) {
    threw = true;
    CHECK(e.pivot() == 1);
    CHECK(std::string(e.what()).find("pivot index 1") != std::string::npos);
  }
  CHECK(threw);

  // PSD-but-singular also fails: strict positivity is required.
  CHECK_THROWS_AS(SpdFactor{Mat::Zero(2, 2)}, DefinitenessError);
}

TEST_CASE("asymmetric input is rejected") {
  Mat a(2, 2);
  a << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(SpdFactor{a}, AsymmetryError);
}

TEST_CASE("shape mismatch between A and B is rejected") {
  CHECK_THROWS_AS(spd_solve(Mat::Identity(3, 3), Mat::Ones(2, 1)), ShapeError);
}
