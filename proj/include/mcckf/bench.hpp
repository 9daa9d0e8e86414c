#pragma once

// Monte-Carlo experiment runner: per-state RMSE over M seeded runs, mean
// recursion CPU time, and the Chandrasekhar-vs-Riccati runtime benefit,
// rendered as a table, CSV, or JSON.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mcckf/model.hpp"
#include "mcckf/run.hpp"
#include "mcckf/simulate.hpp"

namespace mcckf {

struct ExperimentConfig {
  LtiModel model;
  std::optional<ShotNoiseSpec> shot;
  long N = 300;
  long runs = 500;
  std::uint64_t baseSeed = 1;  // run i simulates with seed baseSeed + i
  std::vector<FilterSpec> filters;
  long timingRepeats = 1;
  long warmupRepeats = 1;
  bool sampleInitialState = false;
  int parallel = 1;  // worker threads for the RMSE phase; timing is serial

  void validate() const;
};

// The satellite tracking benchmark: N = 300, M = 500 runs, shot noise on
// 10% of the instants in [21, N-1] with magnitudes {1,2,3}, and all six
// filters (kf, imcc, alg1..alg4) under the adaptive weight strategy.
// pi0Zero selects the zero initial covariance variant (alpha = 1).
ExperimentConfig default_experiment_config(double q4, bool pi0Zero);

// JSON keys: "model" (inline object or a path string), "shot", "N", "runs",
// "base_seed", "filters" (list of {"name","strategy","lambda","sigma"}),
// "timing_repeats"; optional "warmup_repeats", "sample_initial_state",
// "parallel". Unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

struct FilterReport {
  std::string filter;
  std::string lambdaDesc;
  std::optional<int> alpha;
  std::vector<double> rmsePerState;
  double rmseAggregate = 0.0;  // 2-norm of rmsePerState
  double meanCpuSeconds = 0.0;
  std::optional<double> benefitPct;  // Chandrasekhar rows only
};

struct McReport {
  long runs = 0;
  long N = 0;
  std::vector<FilterReport> filters;
};

// Phase 1 accumulates squared a priori errors over all runs and steps
// (deterministic: parallel workers write per-run partials that are reduced
// in run-index order). Phase 2 times the recursion loops serially.
McReport run_experiment(const ExperimentConfig& cfg);

// (1 - cpuChandra/cpuRiccati) * 100; positive means the Chandrasekhar
// implementation is faster. Both inputs must be positive.
double runtime_benefit(double cpuChandra, double cpuRiccati);

enum class ReportFormat { Table, Csv, Json };
ReportFormat report_format_from_name(const std::string& name);

std::string render_report(const McReport& r, ReportFormat format);
nlohmann::json mcreport_to_json(const McReport& r);
McReport mcreport_from_json(const nlohmann::json& j);
bool reports_equal(const McReport& a, const McReport& b);

}  // namespace mcckf
