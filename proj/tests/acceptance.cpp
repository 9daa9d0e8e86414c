// Acceptance gate for the state-estimation library. Each criterion prints a
// single PASS/FAIL line (details indented beneath); the process exits 0 only
// if every criterion holds.
//
// Criteria:
//   1  Low-rank variants reproduce the Riccati-form weighted filter on the
//      tracking benchmark (states and reconstructed covariances, rel 1e-8,
//      under one second per configuration).
//   2  The weighted filter at lambda = 1 degenerates to the classical filter
//      (elementwise 1e-12 over random models).
//   3  Displacement ranks: alpha = 4 (diagonal Pi0) and alpha = 1 (zero Pi0).
//   4  The M = 500 Monte-Carlo experiment reproduces the reference per-state
//      RMSE within +-15% for the classical and weighted filters, and the
//      weighted filter improves the dominant state in every configuration.
//   5  Riccati and low-rank rows of the same experiment agree to at least
//      six significant digits.
//   6  With Pi0 = 0 (alpha = 1) every low-rank variant is at least as fast
//      as the Riccati implementation.
//   7  Structural identities: increment recursion residual, propagated
//      innovation-covariance inverse, and factorization properties.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "mcckf/bench.hpp"
#include "mcckf/chandrasekhar.hpp"
#include "mcckf/ldlt.hpp"
#include "mcckf/riccati.hpp"
#include "mcckf/rng.hpp"
#include "mcckf/run.hpp"
#include "mcckf/simulate.hpp"
#include "mcckf/spd.hpp"

using namespace mcckf;

namespace {

int gFailures = 0;

void report(int criterion, bool pass, const std::string& text) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              text.c_str());
  if (!pass) gFailures++;
}

Mat randomMat(GaussianRng& rng, long r, long c, double scale = 1.0) {
  Mat a(r, c);
  for (long i = 0; i < r; ++i)
    for (long j = 0; j < c; ++j) a(i, j) = scale * rng.normal();
  return a;
}

LtiModel randomStableModel(GaussianRng& rng, long n, long q, long m) {
  LtiModel model;
  model.F = randomMat(rng, n, n);
  const double rho =
      Eigen::EigenSolver<Mat>(model.F).eigenvalues().cwiseAbs().maxCoeff();
  if (rho > 0.95) model.F *= 0.95 / rho;
  model.G = randomMat(rng, n, q, 0.5);
  model.H = randomMat(rng, m, n);
  Mat bq = randomMat(rng, q, q);
  model.Q = bq * bq.transpose() + 0.1 * Mat::Identity(q, q);
  Mat br = randomMat(rng, m, m);
  model.R = br * br.transpose() + 0.5 * Mat::Identity(m, m);
  model.x0Mean = randomMat(rng, n, 1);
  Mat bp = randomMat(rng, n, n);
  model.Pi0 = bp * bp.transpose() + 0.1 * Mat::Identity(n, n);
  model.validate();
  return model;
}

LtiModel benchmarkModel(double q4, bool zeroPi0) {
  LtiModel m = satellite_model(q4);
  if (zeroPi0) m.Pi0 = Mat::Zero(4, 4);
  return m;
}

Trajectory benchmarkTrajectory(const LtiModel& model, std::uint64_t seed) {
  ShotNoiseSpec shot;
  shot.magnitudes = {1.0, 2.0, 3.0};
  SimulateOptions opts;
  opts.sampleInitialState = false;
  return simulate(model, 300, shot, seed, opts);
}

const ChandraVariant kVariants[] = {ChandraVariant::Alg1, ChandraVariant::Alg2,
                                    ChandraVariant::Alg3, ChandraVariant::Alg4};

// ---- criterion 1: equivalence on the tracking benchmark ----
void criterion1() {
  const double lambda = std::exp(-0.5);
  const double tol = 1e-8;
  double worstState = 0.0, worstCov = 0.0, slowest = 0.0;
  bool pass = true;

  for (double q4 : {0.0063, 0.63e-4}) {
    for (bool zeroPi0 : {false, true}) {
      LtiModel model = benchmarkModel(q4, zeroPi0);
      Trajectory traj = benchmarkTrajectory(model, 1);
      const auto t0 = std::chrono::steady_clock::now();

      RiccatiFilterState ref = riccati_init(model);
      std::vector<ChandrasekharFilterState> st;
      std::vector<Mat> pRecon;
      for (ChandraVariant v : kVariants) {
        st.push_back(chandrasekhar_init(model, lambda, v));
        pRecon.push_back(model.Pi0);
      }
      for (long k = 0; k <= 300; ++k) {
        const Mat& y = traj.measurements[static_cast<size_t>(k)];
        ref = imcc_riccati_step_lambda(ref, y, model, lambda);
        for (size_t i = 0; i < 4; ++i) {
          const Mat dP = st[i].deltaP();
          st[i] = chandrasekhar_step(st[i], y, model, lambda);
          pRecon[i] += dP;
          worstState = std::max(worstState, rel_diff(st[i].xPred, ref.xPred));
          worstCov = std::max(worstCov, rel_diff(pRecon[i], ref.pPred));
        }
      }
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      slowest = std::max(slowest, secs);
      if (worstState > tol || worstCov > tol || secs >= 1.0) pass = false;
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "low-rank variants match the Riccati recursion over N=300 "
                "(max state rel %.1e, max covariance rel %.1e, tol 1e-8; "
                "slowest configuration %.3f s < 1 s)",
                worstState, worstCov, slowest);
  report(1, pass, buf);
}

// ---- criterion 2: lambda = 1 degeneracy ----
void criterion2() {
  GaussianRng rng(20240);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const long n = 1 + (t % 5);
    const long q = 1 + (t % n);
    const long m = 1 + ((t / 5) % n);
    LtiModel model = randomStableModel(rng, n, q, m);
    Trajectory traj = simulate(model, 50, std::nullopt, 600 + t);

    RiccatiFilterState kf = riccati_init(model);
    RiccatiFilterState im = riccati_init(model);
    for (long k = 0; k <= 50; ++k) {
      const Mat& y = traj.measurements[static_cast<size_t>(k)];
      kf = kf_step(kf, y, model);
      im = imcc_riccati_step_lambda(im, y, model, 1.0);
      worst = std::max(worst, (kf.xPred - im.xPred).cwiseAbs().maxCoeff());
      worst = std::max(worst, (kf.pPred - im.pPred).cwiseAbs().maxCoeff());
    }
  }
  char buf[192];
  std::snprintf(buf, sizeof buf,
                "lambda = 1 degenerates to the classical filter on 50 random "
                "models (max elementwise deviation %.1e, tol 1e-12)",
                worst);
  report(2, worst <= 1e-12, buf);
}

// ---- criterion 3: displacement ranks ----
void criterion3() {
  const double lambda = std::exp(-0.5);
  bool pass = true;
  for (double q4 : {0.0063, 0.63e-4}) {
    for (ChandraVariant v : kVariants) {
      if (chandrasekhar_init(benchmarkModel(q4, false), lambda, v).alpha != 4)
        pass = false;
      if (chandrasekhar_init(benchmarkModel(q4, true), lambda, v).alpha != 1)
        pass = false;
    }
  }
  report(3, pass,
         "displacement rank alpha = 4 for the diagonal initial covariance and "
         "alpha = 1 for the zero initial covariance (all variants, both "
         "maneuver intensities)");
}

// ---- criteria 4/5/6 share the four M = 500 experiments ----
struct RefCells {
  double kf[4];
  double imcc[4];
};

void criteria456() {
  // Reference per-state RMSE for the tracking benchmark (classical filter
  // and weighted filter rows, both maneuver intensities, both initial
  // covariances).
  const double q4s[2] = {0.0063, 0.63e-4};
  const RefCells refs[2][2] = {
      // q4 = 0.63e-2: {Pi0 diagonal, Pi0 zero}
      {{{80.95, 1.77, 0.42, 0.92}, {80.90, 1.95, 0.42, 0.93}},
       {{78.37, 2.07, 0.00, 0.91}, {77.69, 2.34, 0.00, 0.91}}},
      // q4 = 0.63e-4
      {{{81.77, 4.26, 0.44, 0.93}, {81.32, 3.95, 0.44, 0.93}},
       {{60.75, 5.93, 0.00, 0.92}, {56.54, 6.61, 0.00, 0.92}}}};

  bool bandsPass = true, orderingPass = true, digitsPass = true,
       benefitPass = true;
  double worstDigits = 0.0;
  std::string orderingDetail, benefitDetail;

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  for (int qi = 0; qi < 2; ++qi) {
    for (int zi = 0; zi < 2; ++zi) {
      const bool zeroPi0 = zi == 1;
      ExperimentConfig cfg = default_experiment_config(q4s[qi], zeroPi0);
      cfg.parallel = static_cast<int>(std::min(8u, hw));
      cfg.timingRepeats = 2;
      McReport rep = run_experiment(cfg);
      const FilterReport& kf = rep.filters[0];
      const FilterReport& imcc = rep.filters[1];

      std::printf("  config q4=%g Pi0=%s:\n", q4s[qi],
                  zeroPi0 ? "zero" : "diag");
      const RefCells& rc = refs[qi][zi];
      for (int s = 0; s < 4; ++s) {
        auto cell = [&](const char* name, double got, double ref) {
          bool ok;
          if (ref == 0.0) {
            ok = std::abs(got) <= 0.005;  // reference printed as 0.00
            std::printf("    %s x%d: %8.4f (reference 0.00, require <= 0.005)"
                        " %s\n",
                        name, s + 1, got, ok ? "ok" : "OUT OF BAND");
          } else {
            ok = got >= 0.85 * ref && got <= 1.15 * ref;
            std::printf(
                "    %s x%d: %8.4f (reference %.2f, band %.2f..%.2f) %s\n",
                name, s + 1, got, ref, 0.85 * ref, 1.15 * ref,
                ok ? "ok" : "OUT OF BAND");
          }
          if (!ok) bandsPass = false;
        };
        cell("kf  ", kf.rmsePerState[static_cast<size_t>(s)], rc.kf[s]);
        cell("imcc", imcc.rmsePerState[static_cast<size_t>(s)], rc.imcc[s]);
      }

      const bool orderOk = imcc.rmsePerState[0] <= kf.rmsePerState[0];
      char ob[160];
      std::snprintf(ob, sizeof ob,
                    "    ordering x1: imcc %.4f %s kf %.4f%s\n",
                    imcc.rmsePerState[0], orderOk ? "<=" : ">",
                    kf.rmsePerState[0],
                    orderOk ? "" : "  (improvement not reproduced)");
      std::printf("%s", ob);
      if (!orderOk) {
        orderingPass = false;
        char od[128];
        std::snprintf(od, sizeof od, " [q4=%g Pi0=%s +%.2f%%]", q4s[qi],
                      zeroPi0 ? "zero" : "diag",
                      100.0 * (imcc.rmsePerState[0] / kf.rmsePerState[0] - 1.0));
        orderingDetail += od;
      }

      // criterion 5: every low-rank row vs the Riccati row.
      for (size_t f = 2; f < rep.filters.size(); ++f) {
        for (int s = 0; s < 4; ++s) {
          const double a = imcc.rmsePerState[static_cast<size_t>(s)];
          const double b =
              rep.filters[f].rmsePerState[static_cast<size_t>(s)];
          const double rel = std::abs(a - b) / (1.0 + std::abs(a));
          worstDigits = std::max(worstDigits, rel);
          if (rel > 5e-7) digitsPass = false;
        }
      }

      // criterion 6: runtime benefit in the alpha = 1 configurations.
      if (zeroPi0) {
        for (size_t f = 2; f < rep.filters.size(); ++f) {
          const FilterReport& fr = rep.filters[f];
          char bb[96];
          std::snprintf(bb, sizeof bb, " %s %+.1f%%", fr.filter.c_str(),
                        fr.benefitPct.value_or(-999.0));
          benefitDetail += bb;
          if (!fr.benefitPct.has_value() || *fr.benefitPct < 0.0)
            benefitPass = false;
        }
      }
    }
  }

  {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "M = 500 Monte-Carlo RMSE within +-15%% of the reference "
                  "values %s; weighted filter improves x1 in every "
                  "configuration %s%s",
                  bandsPass ? "(all 32 cells in band)" : "(cells OUT OF BAND)",
                  orderingPass ? "(yes)" : "(violated:",
                  orderingPass ? "" : (orderingDetail + ")").c_str());
    report(4, bandsPass && orderingPass, buf);
  }
  {
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "Riccati and low-rank RMSE rows agree to >= 6 significant "
                  "digits in all four experiments (worst rel %.1e, tol 5e-7)",
                  worstDigits);
    report(5, digitsPass, buf);
  }
  {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "with Pi0 = 0 every low-rank variant runs at least as fast "
                  "as the Riccati implementation (benefits:%s)",
                  benefitDetail.c_str());
    report(6, benefitPass, buf);
  }
}

// ---- criterion 7: structural identities ----
void criterion7() {
  const double lambda = std::exp(-0.5);
  bool pass = true;
  double worstLemma = 0.0, worstWoodbury = 0.0;

  for (bool zeroPi0 : {false, true}) {
    LtiModel model = benchmarkModel(0.0063, zeroPi0);
    Trajectory traj = benchmarkTrajectory(model, 7);
    ChandrasekharFilterState a2 =
        chandrasekhar_init(model, lambda, ChandraVariant::Alg2);
    ChandrasekharFilterState a3 =
        chandrasekhar_init(model, lambda, ChandraVariant::Alg3);
    for (long k = 0; k <= 300; ++k) {
      const Mat& y = traj.measurements[static_cast<size_t>(k)];
      ChandrasekharFilterState next = chandrasekhar_step(a2, y, model, lambda);
      const double res = lemma1_residual(next, a2, model, lambda) /
                         (1.0 + next.deltaP().norm());
      worstLemma = std::max(worstLemma, res);
      if (res > 1e-8) pass = false;
      a2 = next;

      a3 = chandrasekhar_step(a3, y, model, lambda);
      const Mat direct = SpdFactor(a2.re).inverse();
      const double wres =
          (a3.reInv - direct).norm() / (1.0 + direct.norm());
      worstWoodbury = std::max(worstWoodbury, wres);
      if (wres > 1e-8) pass = false;
    }
  }

  // Factorization properties: reconstruction and rank agreement.
  GaussianRng rng(70707);
  double worstRecon = 0.0;
  for (int t = 0; t < 100; ++t) {
    const long n = 1 + (t % 10);
    Mat a = randomMat(rng, n, n);
    Mat sym = 0.5 * (a + a.transpose());
    auto f = ldlt_bunch_kaufman(sym);
    const double res = (sym - f.reconstruct()).norm() / (1.0 + sym.norm());
    worstRecon = std::max(worstRecon, res);
    if ((sym - f.reconstruct()).norm() > 1e-10 * (1.0 + sym.norm()))
      pass = false;
  }
  for (int t = 0; t < 20; ++t) {
    const long n = 5 + (t % 5);
    const long r1 = 1 + (t % 3), r2 = 1 + (t % 2);
    Mat b = randomMat(rng, n, r1), c = randomMat(rng, n, r2);
    Mat a = b * b.transpose() - c * c.transpose();
    if (low_rank_trim(ldlt_bunch_kaufman(a), 1e-10).alpha != r1 + r2)
      pass = false;
  }

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "structural identities hold (increment-recursion residual "
                "%.1e, propagated inverse %.1e, tol 1e-8; factorization "
                "reconstruction %.1e, tol 1e-10; rank agreement 20/20)",
                worstLemma, worstWoodbury, worstRecon);
  report(7, pass, buf);
}

}  // namespace

int main() {
  std::printf("acceptance suite: tracking-benchmark state estimators\n");
  criterion1();
  criterion2();
  criterion3();
  criteria456();
  criterion7();
  if (gFailures == 0) {
    std::printf("SUMMARY: all 7 criteria passed\n");
    return 0;
  }
  std::printf("SUMMARY: %d of 7 criteria failed\n", gFailures);
  return 1;
}
