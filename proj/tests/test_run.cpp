#include <cmath>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "helpers.hpp"
#include "mcckf/run.hpp"

using namespace mcckf;
using namespace mcckf::testutil;
using nlohmann::json;

namespace {

Trajectory benchmarkTrajectory(long N, std::uint64_t seed) {
  LtiModel model = satellite_model(0.0063);
  SimulateOptions opts;
  opts.sampleInitialState = false;
  // The default impulse window starts at instant 21; short trajectories are
  // generated with Gaussian noise only.
  std::optional<ShotNoiseSpec> shot;
  if (N >= 50) {
    shot.emplace();
    shot->magnitudes = {1.0, 2.0, 3.0};
  }
  return simulate(model, N, shot, seed, opts);
}

}  // namespace

TEST_CASE("filter names round-trip") {
  for (const std::string& name : filter_names()) {
    CHECK(filter_kind_name(filter_kind_from_name(name)) == name);
  }
  CHECK(filter_names().size() == 6);
  CHECK_THROWS_AS(filter_kind_from_name("alg9"), ConfigError);
  CHECK_THROWS_AS(filter_kind_from_name(""), ConfigError);
}

TEST_CASE("spec validation rejects fixed-sigma with low-rank variants") {
  FilterSpec ok{FilterKind::ImccRiccati, KernelStrategy::fixedSigma(2.0)};
  CHECK_NOTHROW(ok.validate());

  for (FilterKind kind :
       {FilterKind::Alg1, FilterKind::Alg2, FilterKind::Alg3, FilterKind::Alg4}) {
    FilterSpec bad{kind, KernelStrategy::fixedSigma(2.0)};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    LtiModel model = satellite_model(0.0063);
    Trajectory traj = benchmarkTrajectory(5, 1);
    CHECK_THROWS_AS(run_filter(model, traj, bad), ConfigError);
  }
}

TEST_CASE("a trajectory with N = 0 produces a single record") {
  LtiModel model = satellite_model(0.0063);
  Trajectory t;
  t.seed = 0;
  t.N = 0;
  t.states = {Mat::Zero(4, 1)};
  t.measurements = {Mat::Ones(1, 1)};

  FilterSpec spec{FilterKind::ClassicalKf, KernelStrategy::adaptive()};
  FilterOutput out = run_filter(model, t, spec);
  REQUIRE(out.xPredSeq.size() == 1);
  REQUIRE(out.innovations.size() == 1);
  REQUIRE(out.lambdaSeq.size() == 1);
  // Record 0 is the initial prediction x_hat_{0|-1} = x0Mean.
  CHECK(maxAbsDiff(out.xPredSeq[0], model.x0Mean) == 0.0);
  CHECK(maxAbsDiff(out.innovations[0],
                   t.measurements[0] - model.H * model.x0Mean) == 0.0);
  // The post-loop prediction is one step ahead.
  CHECK(out.xPredNext.rows() == 4);
}

TEST_CASE("classical and lambda-1 weighted runs coincide") {
  LtiModel model = satellite_model(0.0063);
  Trajectory traj = benchmarkTrajectory(100, 4);

  FilterSpec kf{FilterKind::ClassicalKf, KernelStrategy::adaptive()};
  FilterSpec imcc1{FilterKind::ImccRiccati, KernelStrategy::constant(1.0)};
  FilterOutput a = run_filter(model, traj, kf);
  FilterOutput b = run_filter(model, traj, imcc1);
  REQUIRE(a.xPredSeq.size() == b.xPredSeq.size());
  for (size_t k = 0; k < a.xPredSeq.size(); ++k)
    CHECK(maxAbsDiff(a.xPredSeq[k], b.xPredSeq[k]) <= 1e-12);
  // The classical filter records lambda = 1 at every step.
  for (double lam : a.lambdaSeq) CHECK(lam == 1.0);
}

TEST_CASE("low-rank runs agree with the Riccati run and report alpha") {
  LtiModel model = satellite_model(0.0063);
  model.Pi0 = Mat::Zero(4, 4);
  Trajectory traj = benchmarkTrajectory(300, 2);

  FilterSpec imcc{FilterKind::ImccRiccati, KernelStrategy::adaptive()};
  FilterOutput ref = run_filter(model, traj, imcc);
  CHECK_FALSE(ref.alpha.has_value());
  CHECK(ref.lambdaDesc == "adaptive");
  // Nonzero innovations: the adaptive weight is exp(-1/2) at every step.
  for (double lam : ref.lambdaSeq) CHECK(lam == std::exp(-0.5));

  for (FilterKind kind :
       {FilterKind::Alg1, FilterKind::Alg2, FilterKind::Alg3, FilterKind::Alg4}) {
    FilterSpec spec{kind, KernelStrategy::adaptive()};
    FilterOutput out = run_filter(model, traj, spec);
    REQUIRE(out.alpha.has_value());
    CHECK(*out.alpha == 1);
    REQUIRE(out.xPredSeq.size() == ref.xPredSeq.size());
    for (size_t k = 0; k < out.xPredSeq.size(); ++k)
      CHECK(rel_diff(out.xPredSeq[k], ref.xPredSeq[k]) <= 1e-8);
    CHECK(rel_diff(out.xPredNext, ref.xPredNext) <= 1e-8);
  }
}

TEST_CASE("timed runs reproduce the recorded prediction") {
  LtiModel model = satellite_model(0.0063);
  Trajectory traj = benchmarkTrajectory(50, 6);
  for (const std::string& name : filter_names()) {
    FilterSpec spec{filter_kind_from_name(name), KernelStrategy::adaptive()};
    FilterOutput full = run_filter(model, traj, spec);
    TimedRun timed = run_filter_timed(model, traj, spec);
    CHECK(maxAbsDiff(full.xPredNext, timed.xPredNext) == 0.0);
    CHECK(full.elapsedNs >= 0);
    CHECK(full.initNs >= 0);
    CHECK(timed.elapsedNs >= 0);
  }
}

TEST_CASE("output JSON has the documented shape") {
  LtiModel model = satellite_model(0.0063);
  Trajectory traj = benchmarkTrajectory(10, 9);

  FilterSpec spec{FilterKind::Alg2, KernelStrategy::constant(0.5)};
  json j = filter_output_to_json(run_filter(model, traj, spec));
  REQUIRE(j.is_object());
  CHECK(j.size() == 6);
  for (const char* key :
       {"filter", "lambda", "alpha", "x_pred", "innovations", "elapsed_ns"})
    CHECK(j.contains(key));
  CHECK(j["filter"] == "alg2");
  CHECK(j["lambda"].is_number());
  CHECK(j["lambda"].get<double>() == 0.5);
  CHECK(j["alpha"].is_number_integer());
  REQUIRE(j["x_pred"].is_array());
  CHECK(j["x_pred"].size() == 11);
  CHECK(j["x_pred"][0].size() == 4);
  CHECK(j["innovations"].size() == 11);
  CHECK(j["elapsed_ns"].is_number());

  FilterSpec kf{FilterKind::ClassicalKf, KernelStrategy::adaptive()};
  json jk = filter_output_to_json(run_filter(model, traj, kf));
  CHECK(jk["alpha"].is_null());
  CHECK(jk["lambda"].get<double>() == 1.0);

  FilterSpec ad{FilterKind::ImccRiccati, KernelStrategy::adaptive()};
  json ja = filter_output_to_json(run_filter(model, traj, ad));
  CHECK(ja["lambda"] == "adaptive");

  FilterSpec fs{FilterKind::ImccRiccati, KernelStrategy::fixedSigma(2.0)};
  json jf = filter_output_to_json(run_filter(model, traj, fs));
  CHECK(jf["lambda"].is_string());
  CHECK(jf["lambda"].get<std::string>().rfind("sigma=", 0) == 0);
}

TEST_CASE("dimension mismatches are rejected") {
  LtiModel model = satellite_model(0.0063);
  Trajectory traj = benchmarkTrajectory(10, 3);
  FilterSpec spec{FilterKind::ImccRiccati, KernelStrategy::adaptive()};

  LtiModel scalar;
  scalar.F = scalar.G = scalar.H = Mat::Identity(1, 1);
  scalar.Q = scalar.R = Mat::Identity(1, 1);
  scalar.x0Mean = Mat::Zero(1, 1);
  scalar.Pi0 = Mat::Identity(1, 1);
  CHECK_THROWS_AS(run_filter(scalar, traj, spec), ShapeError);

  Trajectory broken = traj;
  broken.measurements.pop_back();
  CHECK_THROWS_AS(run_filter(model, broken, spec), ShapeError);

  Trajectory badDim = traj;
  badDim.measurements[3] = Mat::Ones(2, 1);
  CHECK_THROWS_AS(run_filter(model, badDim, spec), ShapeError);
}
