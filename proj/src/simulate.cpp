#include "mcckf/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mcckf/errors.hpp"
#include "mcckf/rng.hpp"

namespace mcckf {

long ShotNoiseSpec::corruptCount(long N) const {
  const long end = resolvedWindowEnd(N);
  return std::lround(corruptFraction * static_cast<double>(end - windowStart + 1));
}

Mat semidefinite_cholesky(const Mat& s) {
  const Mat sym = require_symmetric(s, 1e-8, "covariance");
  const long n = sym.rows();
  Mat c = Mat::Zero(n, n);
  const double scale = (n == 0) ? 1.0 : std::max(1.0, sym.diagonal().maxCoeff());
  for (long j = 0; j < n; ++j) {
    double d = sym(j, j);
    for (long k = 0; k < j; ++k) d -= c(j, k) * c(j, k);
    if (d <= 1e-12 * scale) continue;  // zero column: exactly no noise here
    c(j, j) = std::sqrt(d);
    for (long i = j + 1; i < n; ++i) {
      double v = sym(i, j);
      for (long k = 0; k < j; ++k) v -= c(i, k) * c(j, k);
      c(i, j) = v / c(j, j);
    }
  }
  return c;
}

namespace {

std::vector<int> resolveProcessTargets(const ShotNoiseSpec& shot,
                                       const LtiModel& model) {
  std::vector<int> channels;
  if (shot.targets.processActiveQ) {
    for (long j = 0; j < model.q(); ++j)
      if (model.Q(j, j) > 0.0) channels.push_back(static_cast<int>(j));
  }
  for (int j : shot.targets.processExplicit) {
    if (j < 0 || j >= model.q())
      throw ConfigError("shot target process channel out of range: " +
                        std::to_string(j));
    channels.push_back(j);
  }
  std::sort(channels.begin(), channels.end());
  channels.erase(std::unique(channels.begin(), channels.end()), channels.end());
  return channels;
}

double drawMagnitude(GaussianRng& rng, const std::vector<double>& mags) {
  return mags[static_cast<size_t>(
      rng.uniformInt(0, static_cast<long>(mags.size()) - 1))];
}

}  // namespace

Trajectory simulate(const LtiModel& model, long N,
                    const std::optional<ShotNoiseSpec>& shot,
                    std::uint64_t seed, const SimulateOptions& options) {
  if (N < 1) throw ConfigError("simulate: N must be >= 1");
  model.validate();  // includes "R must be SPD", required for sampling

  std::vector<int> processTargets;
  long corruptCount = 0;
  if (shot) {
    if (shot->corruptFraction < 0.0 || shot->corruptFraction > 1.0)
      throw ConfigError("simulate: corruptFraction must be in [0,1]");
    const long end = shot->resolvedWindowEnd(N);
    if (shot->windowStart < 0 || end > N - 1 || shot->windowStart > end)
      throw ConfigError("simulate: shot window outside [0, N-1]");
    if (shot->magnitudes.empty())
      throw ConfigError("simulate: shot magnitude set is empty");
    processTargets = resolveProcessTargets(*shot, model);
    corruptCount = shot->corruptCount(N);
  }

  const Mat cholPi0 = semidefinite_cholesky(model.Pi0);
  const Mat cholQ = semidefinite_cholesky(model.Q);
  const Mat rChol = semidefinite_cholesky(model.R);

  GaussianRng rng(seed);
  const long n = model.n(), q = model.q(), m = model.m();

  Trajectory t;
  t.seed = seed;
  t.N = N;
  t.states.reserve(static_cast<size_t>(N + 1));
  t.measurements.reserve(static_cast<size_t>(N + 1));
  t.processNoise.reserve(static_cast<size_t>(N));
  t.measurementNoise.reserve(static_cast<size_t>(N + 1));

  Mat x = model.x0Mean;
  if (options.sampleInitialState) {
    Mat z(n, 1);
    for (long i = 0; i < n; ++i) z(i, 0) = rng.normal();
    x += cholPi0 * z;
  }

  std::vector<bool> corrupted(static_cast<size_t>(N + 1), false);
  if (shot && corruptCount > 0) {
    auto instants =
        rng.distinctInts(corruptCount, shot->windowStart, shot->resolvedWindowEnd(N));
    for (long k : instants) {
      corrupted[static_cast<size_t>(k)] = true;
      t.corruptedInstants.push_back(k);
    }
    std::sort(t.corruptedInstants.begin(), t.corruptedInstants.end());
  }

  for (long k = 0; k <= N; ++k) {
    Mat zv(m, 1);
    for (long i = 0; i < m; ++i) zv(i, 0) = rng.normal();
    Mat v = rChol * zv;
    if (corrupted[static_cast<size_t>(k)] && shot->targets.measurement)
      for (long i = 0; i < m; ++i) v(i, 0) += drawMagnitude(rng, shot->magnitudes);

    t.states.push_back(x);
    t.measurements.push_back(model.H * x + v);
    t.measurementNoise.push_back(v);

    if (k < N) {
      Mat zw(q, 1);
      for (long i = 0; i < q; ++i) zw(i, 0) = rng.normal();
      Mat w = cholQ * zw;
      if (corrupted[static_cast<size_t>(k)])
        for (int j : processTargets)
          w(j, 0) += drawMagnitude(rng, shot->magnitudes);
      t.processNoise.push_back(w);
      x = model.F * x + model.G * w;
    }
  }
  return t;
}

void save_trajectory(const Trajectory& t, const std::string& path) {
  nlohmann::json j;
  j["seed"] = t.seed;
  j["N"] = t.N;
  auto column = [](const Mat& v) {
    std::vector<double> out(static_cast<size_t>(v.rows()));
    for (long i = 0; i < v.rows(); ++i) out[static_cast<size_t>(i)] = v(i, 0);
    return out;
  };
  auto& js = j["states"] = nlohmann::json::array();
  for (const Mat& s : t.states) js.push_back(column(s));
  auto& jm = j["measurements"] = nlohmann::json::array();
  for (const Mat& y : t.measurements) jm.push_back(column(y));
  std::ofstream out(path);
  if (!out) throw SchemaError("save_trajectory: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw SchemaError("save_trajectory: write failure on " + path);
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("load_trajectory: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("load_trajectory: invalid JSON in " + path + ": " +
                      e.what());
  }
  for (const char* key : {"seed", "N", "states", "measurements"})
    if (!j.contains(key))
      throw SchemaError(std::string("trajectory JSON missing key \"") + key +
                        "\"");
  Trajectory t;
  if (!j["seed"].is_number() || !j["N"].is_number_integer())
    throw SchemaError("trajectory seed/N must be numbers");
  t.seed = j["seed"].get<std::uint64_t>();
  t.N = j["N"].get<long>();
  auto readColumns = [&](const nlohmann::json& arr, const char* what,
                         long expectedCount) {
    if (!arr.is_array() || static_cast<long>(arr.size()) != expectedCount)
      throw SchemaError(std::string("trajectory ") + what + " must hold " +
                        std::to_string(expectedCount) + " vectors");
    std::vector<Mat> out;
    out.reserve(arr.size());
    long dim = -1;
    for (const auto& row : arr) {
      if (!row.is_array() || row.empty())
        throw SchemaError(std::string("trajectory ") + what +
                          " entries must be non-empty arrays");
      if (dim < 0) dim = static_cast<long>(row.size());
      if (static_cast<long>(row.size()) != dim)
        throw SchemaError(std::string("trajectory ") + what +
                          " entries have inconsistent lengths");
      Mat v(dim, 1);
      for (long i = 0; i < dim; ++i) {
        if (!row[static_cast<size_t>(i)].is_number())
          throw SchemaError(std::string("trajectory ") + what +
                            " entries must be numbers");
        v(i, 0) = row[static_cast<size_t>(i)].get<double>();
      }
      out.push_back(std::move(v));
    }
    return out;
  };
  if (t.N < 0) throw SchemaError("trajectory N must be >= 0");
  t.states = readColumns(j["states"], "states", t.N + 1);
  t.measurements = readColumns(j["measurements"], "measurements", t.N + 1);
  return t;
}

}  // namespace mcckf
