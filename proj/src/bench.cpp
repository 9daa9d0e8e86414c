#include "mcckf/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "mcckf/errors.hpp"

namespace mcckf {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::uint64_t fnv1a_trajectory(const Trajectory& t) {
  std::uint64_t h = 1469598103934665603ULL;
  auto eat = [&h](const double* data, std::size_t count) {
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < count * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const Mat& y : t.measurements) {
    eat(y.data(), static_cast<std::size_t>(y.size()));
  }
  for (const Mat& x : t.states) {
    eat(x.data(), static_cast<std::size_t>(x.size()));
  }
  return h;
}

KernelStrategy strategy_from_json(const nlohmann::json& jf) {
  const bool hasLambda = jf.contains("lambda");
  const bool hasSigma = jf.contains("sigma");
  std::string strategy;
  if (jf.contains("strategy")) {
    if (!jf.at("strategy").is_string()) {
      throw SchemaError("filter \"strategy\" must be a string");
    }
    strategy = jf.at("strategy").get<std::string>();
  } else {
    strategy = hasLambda ? "constant" : "adaptive";
  }
  if (strategy == "adaptive") {
    if (hasLambda || hasSigma) {
      throw SchemaError("adaptive strategy takes no \"lambda\" or \"sigma\"");
    }
    return KernelStrategy::adaptive();
  }
  if (strategy == "constant") {
    if (!hasLambda || !jf.at("lambda").is_number()) {
      throw SchemaError("constant strategy requires a numeric \"lambda\"");
    }
    return KernelStrategy::constant(jf.at("lambda").get<double>());
  }
  if (strategy == "fixed-sigma") {
    if (!hasSigma || !jf.at("sigma").is_number()) {
      throw SchemaError("fixed-sigma strategy requires a numeric \"sigma\"");
    }
    return KernelStrategy::fixedSigma(jf.at("sigma").get<double>());
  }
  throw SchemaError("unknown strategy \"" + strategy +
                    "\" (expected constant, adaptive, or fixed-sigma)");
}

nlohmann::json strategy_to_json(const FilterSpec& spec, nlohmann::json& jf) {
  switch (spec.strategy.kind()) {
    case KernelStrategy::Kind::ConstantLambda:
      jf["strategy"] = "constant";
      jf["lambda"] = spec.strategy.value();
      break;
    case KernelStrategy::Kind::AdaptiveSigma:
      jf["strategy"] = "adaptive";
      break;
    case KernelStrategy::Kind::FixedSigma:
      jf["strategy"] = "fixed-sigma";
      jf["sigma"] = spec.strategy.value();
      break;
  }
  return jf;
}

void reject_unknown_keys(const nlohmann::json& j,
                         const std::vector<std::string>& known,
                         const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw SchemaError(std::string("unknown key \"") + it.key() + "\" in " +
                        where);
    }
  }
}

ShotNoiseSpec shot_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("\"shot\" must be an object or null");
  reject_unknown_keys(j,
                      {"corrupt_fraction", "window_start", "window_end",
                       "magnitudes", "targets"},
                      "shot spec");
  ShotNoiseSpec shot;
  if (j.contains("corrupt_fraction")) {
    shot.corruptFraction = j.at("corrupt_fraction").get<double>();
  }
  if (j.contains("window_start")) {
    shot.windowStart = j.at("window_start").get<long>();
  }
  if (j.contains("window_end")) {
    shot.windowEnd = j.at("window_end").get<long>();
  }
  if (j.contains("magnitudes")) {
    shot.magnitudes = j.at("magnitudes").get<std::vector<double>>();
  }
  if (j.contains("targets")) {
    const auto& jt = j.at("targets");
    reject_unknown_keys(
        jt, {"measurement", "process_active_q", "process_explicit"},
        "shot targets");
    if (jt.contains("measurement")) {
      shot.targets.measurement = jt.at("measurement").get<bool>();
    }
    if (jt.contains("process_active_q")) {
      shot.targets.processActiveQ = jt.at("process_active_q").get<bool>();
    }
    if (jt.contains("process_explicit")) {
      shot.targets.processExplicit =
          jt.at("process_explicit").get<std::vector<int>>();
    }
  }
  return shot;
}

nlohmann::json shot_to_json(const ShotNoiseSpec& shot) {
  nlohmann::json j;
  j["corrupt_fraction"] = shot.corruptFraction;
  j["window_start"] = shot.windowStart;
  j["window_end"] = shot.windowEnd;
  j["magnitudes"] = shot.magnitudes;
  j["targets"] = {{"measurement", shot.targets.measurement},
                  {"process_active_q", shot.targets.processActiveQ},
                  {"process_explicit", shot.targets.processExplicit}};
  return j;
}

struct RunOutcome {
  std::vector<double> sqSums;  // filters * n, run-local squared error sums
};

}  // namespace

void ExperimentConfig::validate() const {
  model.validate();
  if (N < 1) throw ConfigError("N must be >= 1");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (filters.empty()) throw ConfigError("at least one filter is required");
  if (timingRepeats < 1) throw ConfigError("timing_repeats must be >= 1");
  if (warmupRepeats < 0) throw ConfigError("warmup_repeats must be >= 0");
  if (parallel < 1) throw ConfigError("parallel must be >= 1");
  for (const FilterSpec& spec : filters) spec.validate();
}

ExperimentConfig default_experiment_config(double q4, bool pi0Zero) {
  ExperimentConfig cfg;
  cfg.model = satellite_model(q4);
  if (pi0Zero) cfg.model.Pi0.setZero();
  ShotNoiseSpec shot;
  shot.magnitudes = {1.0, 2.0, 3.0};
  cfg.shot = shot;
  cfg.N = 300;
  cfg.runs = 500;
  cfg.baseSeed = 1;
  for (const std::string& name : filter_names()) {
    FilterSpec spec;
    spec.kind = filter_kind_from_name(name);
    spec.strategy = KernelStrategy::adaptive();
    cfg.filters.push_back(spec);
  }
  return cfg;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("experiment config must be an object");
  reject_unknown_keys(j,
                      {"model", "shot", "N", "runs", "base_seed", "filters",
                       "timing_repeats", "warmup_repeats",
                       "sample_initial_state", "parallel"},
                      "experiment config");
  if (!j.contains("model")) throw SchemaError("experiment config needs \"model\"");
  ExperimentConfig cfg;
  if (j.at("model").is_string()) {
    const std::string path = j.at("model").get<std::string>();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file \"" + path + "\"");
    nlohmann::json jm;
    try {
      in >> jm;
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("model file \"" + path + "\": " + e.what());
    }
    cfg.model = model_from_json(jm);
  } else {
    cfg.model = model_from_json(j.at("model"));
  }
  if (j.contains("shot") && !j.at("shot").is_null()) {
    cfg.shot = shot_from_json(j.at("shot"));
  }
  if (j.contains("N")) cfg.N = j.at("N").get<long>();
  if (j.contains("runs")) cfg.runs = j.at("runs").get<long>();
  if (j.contains("base_seed")) cfg.baseSeed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("timing_repeats")) {
    cfg.timingRepeats = j.at("timing_repeats").get<long>();
  }
  if (j.contains("warmup_repeats")) {
    cfg.warmupRepeats = j.at("warmup_repeats").get<long>();
  }
  if (j.contains("sample_initial_state")) {
    cfg.sampleInitialState = j.at("sample_initial_state").get<bool>();
  }
  if (j.contains("parallel")) cfg.parallel = j.at("parallel").get<int>();
  if (!j.contains("filters")) {
    // Default roster: all six filters under the adaptive strategy.
    for (const std::string& name : filter_names()) {
      FilterSpec spec;
      spec.kind = filter_kind_from_name(name);
      cfg.filters.push_back(spec);
    }
    cfg.validate();
    return cfg;
  }
  const auto& jfilters = j.at("filters");
  if (!jfilters.is_array()) throw SchemaError("\"filters\" must be an array");
  for (const auto& jf : jfilters) {
    if (!jf.is_object() || !jf.contains("name") || !jf.at("name").is_string()) {
      throw SchemaError("each filter entry needs a string \"name\"");
    }
    reject_unknown_keys(jf, {"name", "strategy", "lambda", "sigma"},
                        "filter entry");
    FilterSpec spec;
    spec.kind = filter_kind_from_name(jf.at("name").get<std::string>());
    spec.strategy = strategy_from_json(jf);
    cfg.filters.push_back(spec);
  }
  cfg.validate();
  return cfg;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["model"] = model_to_json(cfg.model);
  j["shot"] = cfg.shot.has_value() ? shot_to_json(*cfg.shot)
                                   : nlohmann::json(nullptr);
  j["N"] = cfg.N;
  j["runs"] = cfg.runs;
  j["base_seed"] = cfg.baseSeed;
  j["timing_repeats"] = cfg.timingRepeats;
  j["warmup_repeats"] = cfg.warmupRepeats;
  j["sample_initial_state"] = cfg.sampleInitialState;
  j["parallel"] = cfg.parallel;
  nlohmann::json jfilters = nlohmann::json::array();
  for (const FilterSpec& spec : cfg.filters) {
    nlohmann::json jf;
    jf["name"] = filter_kind_name(spec.kind);
    strategy_to_json(spec, jf);
    jfilters.push_back(std::move(jf));
  }
  j["filters"] = std::move(jfilters);
  return j;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("config file \"" + path + "\": " + e.what());
  }
  return experiment_config_from_json(j);
}

McReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const long runs = cfg.runs;
  const long n = cfg.model.n();
  const std::size_t nf = cfg.filters.size();
  const SimulateOptions simOpts{cfg.sampleInitialState};

  std::vector<Trajectory> trajs(static_cast<std::size_t>(runs));
  std::vector<RunOutcome> outcomes(static_cast<std::size_t>(runs));
  std::vector<std::string> lambdaDescs(nf);
  std::vector<std::optional<int>> alphas(nf);

  auto processRun = [&](long i) {
    Trajectory traj = simulate(cfg.model, cfg.N, cfg.shot,
                               cfg.baseSeed + static_cast<std::uint64_t>(i),
                               simOpts);
    const std::uint64_t before = fnv1a_trajectory(traj);
    RunOutcome outcome;
    outcome.sqSums.assign(nf * static_cast<std::size_t>(n), 0.0);
    for (std::size_t f = 0; f < nf; ++f) {
      FilterOutput out;
      try {
        out = run_filter(cfg.model, traj, cfg.filters[f]);
      } catch (const std::exception& e) {
        throw Error("filter " +
                    std::string(filter_kind_name(cfg.filters[f].kind)) +
                    " failed on run " + std::to_string(i) + ": " + e.what());
      }
      if (i == 0) {
        lambdaDescs[f] = out.lambdaDesc;
        alphas[f] = out.alpha;
      }
      // A priori error pairs: prediction record j against the state the
      // filter was tracking when it was formed, j = 1 .. N+1.
      double* sums = outcome.sqSums.data() + f * static_cast<std::size_t>(n);
      for (long j = 1; j <= cfg.N; ++j) {
        const Mat& pred = out.xPredSeq[static_cast<std::size_t>(j)];
        const Mat& truth = traj.states[static_cast<std::size_t>(j - 1)];
        for (long s = 0; s < n; ++s) {
          const double d = pred(s, 0) - truth(s, 0);
          sums[s] += d * d;
        }
      }
      const Mat& truthLast = traj.states[static_cast<std::size_t>(cfg.N)];
      for (long s = 0; s < n; ++s) {
        const double d = out.xPredNext(s, 0) - truthLast(s, 0);
        sums[s] += d * d;
      }
    }
    if (fnv1a_trajectory(traj) != before) {
      throw Error("trajectory hash changed during run " + std::to_string(i) +
                  "; filters must consume identical data");
    }
    trajs[static_cast<std::size_t>(i)] = std::move(traj);
    outcomes[static_cast<std::size_t>(i)] = std::move(outcome);
  };

  const long workers =
      std::max(1L, std::min(static_cast<long>(cfg.parallel), runs));
  if (workers == 1) {
    for (long i = 0; i < runs; ++i) processRun(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (long w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (long i = w; i < runs; i += workers) processRun(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  // Deterministic reduction in run-index order.
  std::vector<double> totals(nf * static_cast<std::size_t>(n), 0.0);
  for (long i = 0; i < runs; ++i) {
    const auto& sums = outcomes[static_cast<std::size_t>(i)].sqSums;
    for (std::size_t t = 0; t < totals.size(); ++t) totals[t] += sums[t];
  }

  McReport report;
  report.runs = runs;
  report.N = cfg.N;
  const double denom = static_cast<double>(runs) * static_cast<double>(cfg.N + 1);
  for (std::size_t f = 0; f < nf; ++f) {
    FilterReport row;
    row.filter = filter_kind_name(cfg.filters[f].kind);
    row.lambdaDesc = lambdaDescs[f];
    row.alpha = alphas[f];
    double aggSq = 0.0;
    for (long s = 0; s < n; ++s) {
      const double meanSq = totals[f * static_cast<std::size_t>(n) +
                                   static_cast<std::size_t>(s)] /
                            denom;
      row.rmsePerState.push_back(std::sqrt(meanSq));
      aggSq += meanSq;
    }
    row.rmseAggregate = std::sqrt(aggSq);
    report.filters.push_back(std::move(row));
  }

  // Serial timing phase over the cached trajectories.
  for (std::size_t f = 0; f < nf; ++f) {
    for (long w = 0; w < cfg.warmupRepeats; ++w) {
      run_filter_timed(cfg.model, trajs.front(), cfg.filters[f]);
    }
    std::int64_t totalNs = 0;
    for (long rep = 0; rep < cfg.timingRepeats; ++rep) {
      for (long i = 0; i < runs; ++i) {
        totalNs += run_filter_timed(cfg.model, trajs[static_cast<std::size_t>(i)],
                                    cfg.filters[f])
                       .elapsedNs;
      }
    }
    report.filters[f].meanCpuSeconds =
        static_cast<double>(totalNs) * 1e-9 /
        (static_cast<double>(runs) * static_cast<double>(cfg.timingRepeats));
  }

  // Benefit relative to the first Riccati IMCC-KF entry, if present.
  std::optional<std::size_t> baseline;
  for (std::size_t f = 0; f < nf; ++f) {
    if (cfg.filters[f].kind == FilterKind::ImccRiccati) {
      baseline = f;
      break;
    }
  }
  if (baseline.has_value()) {
    const double cpuRiccati = report.filters[*baseline].meanCpuSeconds;
    for (std::size_t f = 0; f < nf; ++f) {
      if (cfg.filters[f].isChandrasekhar() && cpuRiccati > 0.0 &&
          report.filters[f].meanCpuSeconds > 0.0) {
        report.filters[f].benefitPct =
            runtime_benefit(report.filters[f].meanCpuSeconds, cpuRiccati);
      }
    }
  }
  return report;
}

double runtime_benefit(double cpuChandra, double cpuRiccati) {
  if (!(cpuChandra > 0.0) || !(cpuRiccati > 0.0)) {
    throw ConfigError("runtime_benefit requires positive CPU times");
  }
  return (1.0 - cpuChandra / cpuRiccati) * 100.0;
}

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "table") return ReportFormat::Table;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  throw ConfigError("unknown format \"" + name +
                    "\" (expected table, csv, or json)");
}

namespace {

std::string render_table(const McReport& r) {
  const std::size_t n =
      r.filters.empty() ? 0 : r.filters.front().rmsePerState.size();
  std::vector<std::string> headers = {"filter", "lambda", "alpha"};
  for (std::size_t s = 0; s < n; ++s) {
    headers.push_back("rmse_x" + std::to_string(s + 1));
  }
  headers.push_back("rmse_2norm");
  headers.push_back("cpu_s");
  headers.push_back("benefit_pct");

  std::vector<std::vector<std::string>> rows;
  for (const FilterReport& fr : r.filters) {
    std::vector<std::string> row = {fr.filter, fr.lambdaDesc,
                                    fr.alpha ? std::to_string(*fr.alpha) : "-"};
    char buf[64];
    for (double v : fr.rmsePerState) {
      std::snprintf(buf, sizeof(buf), "%.4f", v);
      row.push_back(buf);
    }
    std::snprintf(buf, sizeof(buf), "%.4f", fr.rmseAggregate);
    row.push_back(buf);
    std::snprintf(buf, sizeof(buf), "%.6f", fr.meanCpuSeconds);
    row.push_back(buf);
    if (fr.benefitPct) {
      std::snprintf(buf, sizeof(buf), "%.1f", *fr.benefitPct);
      row.push_back(buf);
    } else {
      row.push_back("-");
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> width(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    width[c] = headers[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  os << "runs=" << r.runs << " N=" << r.N << "\n";
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) os << "  ";
      os << row[c];
      for (std::size_t p = row[c].size(); p < width[c]; ++p) os << ' ';
    }
    os << "\n";
  };
  emit(headers);
  for (const auto& row : rows) emit(row);
  return os.str();
}

std::string render_csv(const McReport& r) {
  const std::size_t n =
      r.filters.empty() ? 0 : r.filters.front().rmsePerState.size();
  std::ostringstream os;
  os << "filter,lambda,alpha";
  for (std::size_t s = 0; s < n; ++s) os << ",rmse_x" << (s + 1);
  os << ",rmse_2norm,cpu_s,benefit_pct\n";
  for (const FilterReport& fr : r.filters) {
    os << fr.filter;
    os << ',' << fr.lambdaDesc;
    os << ',' << (fr.alpha ? std::to_string(*fr.alpha) : "NA");
    for (double v : fr.rmsePerState) os << ',' << format_double(v);
    os << ',' << format_double(fr.rmseAggregate);
    os << ',' << format_double(fr.meanCpuSeconds);
    os << ',' << (fr.benefitPct ? format_double(*fr.benefitPct) : "NA");
    os << "\n";
  }
  return os.str();
}

}  // namespace

std::string render_report(const McReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::Table:
      return render_table(r);
    case ReportFormat::Csv:
      return render_csv(r);
    case ReportFormat::Json:
      return mcreport_to_json(r).dump(2) + "\n";
  }
  throw ConfigError("unknown report format");
}

nlohmann::json mcreport_to_json(const McReport& r) {
  nlohmann::json j;
  j["runs"] = r.runs;
  j["N"] = r.N;
  nlohmann::json rows = nlohmann::json::array();
  for (const FilterReport& fr : r.filters) {
    nlohmann::json row;
    row["filter"] = fr.filter;
    row["lambda"] = fr.lambdaDesc;
    row["alpha"] = fr.alpha ? nlohmann::json(*fr.alpha) : nlohmann::json(nullptr);
    row["rmse_per_state"] = fr.rmsePerState;
    row["rmse_2norm"] = fr.rmseAggregate;
    row["cpu_s"] = fr.meanCpuSeconds;
    row["benefit_pct"] =
        fr.benefitPct ? nlohmann::json(*fr.benefitPct) : nlohmann::json(nullptr);
    rows.push_back(std::move(row));
  }
  j["filters"] = std::move(rows);
  return j;
}

McReport mcreport_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("runs") || !j.contains("N") ||
      !j.contains("filters") || !j.at("filters").is_array()) {
    throw SchemaError("report JSON needs \"runs\", \"N\", and \"filters\"");
  }
  McReport r;
  r.runs = j.at("runs").get<long>();
  r.N = j.at("N").get<long>();
  for (const auto& row : j.at("filters")) {
    FilterReport fr;
    fr.filter = row.at("filter").get<std::string>();
    fr.lambdaDesc = row.at("lambda").get<std::string>();
    if (!row.at("alpha").is_null()) fr.alpha = row.at("alpha").get<int>();
    fr.rmsePerState = row.at("rmse_per_state").get<std::vector<double>>();
    fr.rmseAggregate = row.at("rmse_2norm").get<double>();
    fr.meanCpuSeconds = row.at("cpu_s").get<double>();
    if (!row.at("benefit_pct").is_null()) {
      fr.benefitPct = row.at("benefit_pct").get<double>();
    }
    r.filters.push_back(std::move(fr));
  }
  return r;
}

bool reports_equal(const McReport& a, const McReport& b) {
  if (a.runs != b.runs || a.N != b.N || a.filters.size() != b.filters.size()) {
    return false;
  }
  for (std::size_t f = 0; f < a.filters.size(); ++f) {
    const FilterReport& x = a.filters[f];
    const FilterReport& y = b.filters[f];
    if (x.filter != y.filter || x.lambdaDesc != y.lambdaDesc ||
        x.alpha != y.alpha || x.rmsePerState != y.rmsePerState ||
        x.rmseAggregate != y.rmseAggregate ||
        x.meanCpuSeconds != y.meanCpuSeconds || x.benefitPct != y.benefitPct) {
      return false;
    }
  }
  return true;
}

}  // namespace mcckf
