#pragma once

// Trajectory generation under Gaussian + shot (impulsive) noise.
//
// Draw order per trajectory (fixed, part of the reproducibility contract):
//   1. x0: n standard normals through a semidefinite Cholesky factor of Pi0
//      (skipped entirely, consuming no draws, when sampleInitialState is
//      false — then x0 = x0Mean exactly).
//   2. Corrupted instants: partial Fisher-Yates over [windowStart, windowEnd].
//   3. For k = 0..N: v_k normals (m), then one magnitude draw per corrupted
//      measurement channel; then for k < N: w_k normals (q), then one
//      magnitude draw per corrupted process channel (ascending index).
// Impulse magnitudes are drawn uniformly from ShotNoiseSpec::magnitudes and
// added (positive sign) to the Gaussian noise of the targeted channel.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcckf/matrix.hpp"
#include "mcckf/model.hpp"

namespace mcckf {

struct ShotNoiseTargets {
  bool measurement = true;     // impulses on every measurement-noise channel
  bool processActiveQ = true;  // impulses on process channels with Q_jj > 0
  std::vector<int> processExplicit;  // extra process channels (0-based)
};

struct ShotNoiseSpec {
  double corruptFraction = 0.10;
  long windowStart = 21;
  long windowEnd = -1;  // -1 resolves to N-1
  std::vector<double> magnitudes = {0.0, 1.0, 2.0, 3.0};
  ShotNoiseTargets targets;

  long resolvedWindowEnd(long N) const { return windowEnd < 0 ? N - 1 : windowEnd; }
  // round(corruptFraction * window length)
  long corruptCount(long N) const;
};

struct Trajectory {
  std::uint64_t seed = 0;
  long N = 0;
  std::vector<Mat> states;        // length N+1, each n x 1
  std::vector<Mat> measurements;  // length N+1, each m x 1

  // In-memory extras kept for tests/verification; not serialized.
  std::vector<Mat> processNoise;       // length N, each q x 1 (impulses included)
  std::vector<Mat> measurementNoise;   // length N+1, each m x 1 (impulses included)
  std::vector<long> corruptedInstants; // ascending
};

struct SimulateOptions {
  bool sampleInitialState = true;
};

// Generates x_{k+1} = F x_k + G w_k, y_k = H x_k + v_k for k = 0..N
// (N+1 states and N+1 measurements). Pass shot = nullopt for pure Gaussian
// noise. Identical (model, N, shot, seed, options) reproduce the trajectory
// bit for bit.
Trajectory simulate(const LtiModel& model, long N,
                    const std::optional<ShotNoiseSpec>& shot,
                    std::uint64_t seed, const SimulateOptions& options = {});

// JSON file {"seed","N","states","measurements"}; doubles round-trip exactly.
void save_trajectory(const Trajectory& t, const std::string& path);
Trajectory load_trajectory(const std::string& path);

// Lower-triangular C with C*C^T = S for symmetric PSD S; zero-variance
// directions get exactly zero columns (pivot tolerance 1e-12 relative to
// the largest diagonal entry).
Mat semidefinite_cholesky(const Mat& s);

}  // namespace mcckf
