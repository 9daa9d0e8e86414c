#pragma once

// Uniform driver: runs one named filter over a trajectory, recording the
// a priori estimate sequence, innovations, per-step lambda, and the CPU
// time of the recursion loop (thread CPU clock; initialization timed
// separately).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mcckf/chandrasekhar.hpp"
#include "mcckf/kernel.hpp"
#include "mcckf/model.hpp"
#include "mcckf/riccati.hpp"
#include "mcckf/simulate.hpp"

namespace mcckf {

enum class FilterKind { ClassicalKf, ImccRiccati, Alg1, Alg2, Alg3, Alg4 };

struct FilterSpec {
  FilterKind kind = FilterKind::ClassicalKf;
  KernelStrategy strategy = KernelStrategy::adaptive();

  bool isChandrasekhar() const;
  ChandraVariant chandraVariant() const;
  // Throws ConfigError for inadmissible combinations (FixedSigma with a
  // Chandrasekhar variant).
  void validate() const;
};

// "kf", "imcc", "alg1", "alg2", "alg3", "alg4"
const char* filter_kind_name(FilterKind kind);
FilterKind filter_kind_from_name(const std::string& name);
std::vector<std::string> filter_names();

struct FilterOutput {
  std::string filter;
  std::string lambdaDesc;        // formatted constant, "adaptive", or "sigma=..."
  std::optional<int> alpha;      // Chandrasekhar variants only
  std::vector<Mat> xPredSeq;     // N+1 records; record k is x_hat_{k|k-1}
  std::vector<Mat> innovations;  // N+1 records; e_k = y_k - H x_hat_{k|k-1}
  std::vector<double> lambdaSeq; // N+1 records
  Mat xPredNext;                 // x_hat_{N+1|N}, the post-loop prediction
  std::int64_t elapsedNs = 0;    // recursion loop only
  std::int64_t initNs = 0;       // initialization (factorization included)
};

// JSON {"filter","lambda","alpha","x_pred","innovations","elapsed_ns"};
// alpha is null for Riccati-form filters.
nlohmann::json filter_output_to_json(const FilterOutput& out);

FilterOutput run_filter(const LtiModel& model, const Trajectory& trajectory,
                        const FilterSpec& spec);

// Lean variant for CPU-time benchmarking: same recursion, no recording.
// Returns the final prediction x_hat_{N+1|N} and the loop time.
struct TimedRun {
  Mat xPredNext;
  std::int64_t elapsedNs = 0;
};
TimedRun run_filter_timed(const LtiModel& model, const Trajectory& trajectory,
                          const FilterSpec& spec);

}  // namespace mcckf
