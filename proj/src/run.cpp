#include "mcckf/run.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>

#include <nlohmann/json.hpp>

#include "mcckf/errors.hpp"
#include "mcckf/spd.hpp"

namespace mcckf {

namespace {

std::int64_t thread_cpu_ns() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<std::int64_t>(ts.tv_sec) * 1000000000LL + ts.tv_nsec;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string lambda_desc(const KernelStrategy& strategy) {
  switch (strategy.kind()) {
    case KernelStrategy::Kind::ConstantLambda:
      return format_number(strategy.value());
    case KernelStrategy::Kind::AdaptiveSigma:
      return "adaptive";
    case KernelStrategy::Kind::FixedSigma:
      return "sigma=" + format_number(strategy.value());
  }
  throw ConfigError("unknown kernel strategy");
}

void check_dimensions(const LtiModel& model, const Trajectory& trajectory) {
  if (trajectory.measurements.empty()) {
    throw ShapeError("trajectory has no measurements");
  }
  const long expected = trajectory.N + 1;
  if (static_cast<long>(trajectory.measurements.size()) != expected) {
    throw ShapeError("trajectory measurement count " +
                     std::to_string(trajectory.measurements.size()) +
                     " does not match N+1 = " + std::to_string(expected));
  }
  const auto& y0 = trajectory.measurements.front();
  if (y0.rows() != model.m() || y0.cols() != 1) {
    throw ShapeError("measurement dimension " + std::to_string(y0.rows()) +
                     "x" + std::to_string(y0.cols()) + " does not match model m=" +
                     std::to_string(model.m()));
  }
  if (!trajectory.states.empty() && trajectory.states.front().rows() != model.n()) {
    throw ShapeError("state dimension " +
                     std::to_string(trajectory.states.front().rows()) +
                     " does not match model n=" + std::to_string(model.n()));
  }
}

// Shared recursion driver. Recorder is called before each step with the
// current prediction, innovation, and weight; the timed path passes a no-op
// recorder so the loop carries no bookkeeping cost.
template <typename Recorder>
std::int64_t drive(const LtiModel& model, const Trajectory& trajectory,
                   const FilterSpec& spec, Recorder&& record, Mat* xPredNext,
                   std::optional<int>* alphaOut, std::int64_t* initNs) {
  const long steps = trajectory.N + 1;

  if (spec.isChandrasekhar()) {
    const double lambda = spec.strategy.constantLambda();
    const std::int64_t i0 = thread_cpu_ns();
    ChandrasekharFilterState state =
        chandrasekhar_init(model, lambda, spec.chandraVariant());
    const std::int64_t i1 = thread_cpu_ns();
    if (initNs != nullptr) *initNs = i1 - i0;
    if (alphaOut != nullptr) *alphaOut = state.alpha;

    const std::int64_t t0 = thread_cpu_ns();
    for (long k = 0; k < steps; ++k) {
      const Mat& y = trajectory.measurements[static_cast<std::size_t>(k)];
      record(state.xPred, y, lambda);
      state = chandrasekhar_step(state, y, model, lambda);
    }
    const std::int64_t t1 = thread_cpu_ns();
    if (xPredNext != nullptr) *xPredNext = state.xPred;
    return t1 - t0;
  }

  // Riccati-form paths.  R^-1 is fixed over time, so the weight strategy's
  // normalization matrix is factored once up front.
  const std::int64_t i0 = thread_cpu_ns();
  RiccatiFilterState state = riccati_init(model);
  const Mat rInv = SpdFactor(model.R).inverse();
  const std::int64_t i1 = thread_cpu_ns();
  if (initNs != nullptr) *initNs = i1 - i0;
  if (alphaOut != nullptr) alphaOut->reset();

  const bool classical = spec.kind == FilterKind::ClassicalKf;
  const std::int64_t t0 = thread_cpu_ns();
  for (long k = 0; k < steps; ++k) {
    const Mat& y = trajectory.measurements[static_cast<std::size_t>(k)];
    if (classical) {
      record(state.xPred, y, 1.0);
      state = kf_step(state, y, model);
    } else {
      const Mat e = y - model.H * state.xPred;
      const double lambda = lambda_weight(e, rInv, spec.strategy);
      record(state.xPred, y, lambda);
      state = imcc_riccati_step_lambda(state, y, model, lambda);
    }
  }
  const std::int64_t t1 = thread_cpu_ns();
  if (xPredNext != nullptr) *xPredNext = state.xPred;
  return t1 - t0;
}

}  // namespace

bool FilterSpec::isChandrasekhar() const {
  switch (kind) {
    case FilterKind::Alg1:
    case FilterKind::Alg2:
    case FilterKind::Alg3:
    case FilterKind::Alg4:
      return true;
    default:
      return false;
  }
}

ChandraVariant FilterSpec::chandraVariant() const {
  switch (kind) {
    case FilterKind::Alg1: return ChandraVariant::Alg1;
    case FilterKind::Alg2: return ChandraVariant::Alg2;
    case FilterKind::Alg3: return ChandraVariant::Alg3;
    case FilterKind::Alg4: return ChandraVariant::Alg4;
    default:
      throw ConfigError("filter is not a Chandrasekhar variant");
  }
}

void FilterSpec::validate() const {
  if (isChandrasekhar() && !strategy.chandrasekharAdmissible()) {
    throw ConfigError(
        "fixed-sigma weighting is not admissible for Chandrasekhar variants "
        "(the recursion requires a constant lambda)");
  }
}

const char* filter_kind_name(FilterKind kind) {
  switch (kind) {
    case FilterKind::ClassicalKf: return "kf";
    case FilterKind::ImccRiccati: return "imcc";
    case FilterKind::Alg1: return "alg1";
    case FilterKind::Alg2: return "alg2";
    case FilterKind::Alg3: return "alg3";
    case FilterKind::Alg4: return "alg4";
  }
  throw ConfigError("unknown filter kind");
}

FilterKind filter_kind_from_name(const std::string& name) {
  for (FilterKind kind : {FilterKind::ClassicalKf, FilterKind::ImccRiccati,
                          FilterKind::Alg1, FilterKind::Alg2, FilterKind::Alg3,
                          FilterKind::Alg4}) {
    if (name == filter_kind_name(kind)) return kind;
  }
  throw ConfigError("unknown filter name \"" + name +
                    "\" (expected one of: kf, imcc, alg1, alg2, alg3, alg4)");
}

std::vector<std::string> filter_names() {
  return {"kf", "imcc", "alg1", "alg2", "alg3", "alg4"};
}

FilterOutput run_filter(const LtiModel& model, const Trajectory& trajectory,
                        const FilterSpec& spec) {
  spec.validate();
  model.validate();
  check_dimensions(model, trajectory);

  FilterOutput out;
  out.filter = filter_kind_name(spec.kind);
  out.lambdaDesc = spec.kind == FilterKind::ClassicalKf
                       ? format_number(1.0)
                       : lambda_desc(spec.strategy);
  const std::size_t steps = static_cast<std::size_t>(trajectory.N) + 1;
  out.xPredSeq.reserve(steps);
  out.innovations.reserve(steps);
  out.lambdaSeq.reserve(steps);

  auto record = [&](const Mat& xPred, const Mat& y, double lambda) {
    out.xPredSeq.push_back(xPred);
    out.innovations.push_back(y - model.H * xPred);
    out.lambdaSeq.push_back(lambda);
  };
  out.elapsedNs = drive(model, trajectory, spec, record, &out.xPredNext,
                        &out.alpha, &out.initNs);
  return out;
}

TimedRun run_filter_timed(const LtiModel& model, const Trajectory& trajectory,
                          const FilterSpec& spec) {
  spec.validate();
  check_dimensions(model, trajectory);
  TimedRun result;
  auto noop = [](const Mat&, const Mat&, double) {};
  result.elapsedNs =
      drive(model, trajectory, spec, noop, &result.xPredNext, nullptr, nullptr);
  return result;
}

nlohmann::json filter_output_to_json(const FilterOutput& out) {
  nlohmann::json j;
  j["filter"] = out.filter;
  if (out.lambdaDesc == "adaptive" || out.lambdaDesc.rfind("sigma=", 0) == 0) {
    j["lambda"] = out.lambdaDesc;
  } else {
    j["lambda"] = std::stod(out.lambdaDesc);
  }
  if (out.alpha.has_value()) {
    j["alpha"] = *out.alpha;
  } else {
    j["alpha"] = nullptr;
  }
  auto seq_to_json = [](const std::vector<Mat>& seq) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Mat& v : seq) {
      nlohmann::json rec = nlohmann::json::array();
      for (Eigen::Index i = 0; i < v.rows(); ++i) rec.push_back(v(i, 0));
      arr.push_back(std::move(rec));
    }
    return arr;
  };
  j["x_pred"] = seq_to_json(out.xPredSeq);
  j["innovations"] = seq_to_json(out.innovations);
  j["elapsed_ns"] = out.elapsedNs;
  return j;
}

}  // namespace mcckf
