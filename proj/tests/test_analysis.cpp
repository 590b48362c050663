#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bellkit/analysis.hpp"
#include "bellkit/io.hpp"

using namespace bellkit;

namespace {

PredictionSet giustina_pred(Permutation perm = Permutation::labels) {
  return scenario_predictions(giustina_scenario(3.0, perm));
}

}  // namespace

TEST_CASE("detection-rate estimators recover the synthesis rate") {
  PredictionSet pred = giustina_pred();
  ExperimentRecord rec = synth_experiment(pred, 0.72, 0.72, 1e6);
  rec.validate();
  auto [etaA, etaB] = estimate_etas(rec, pred);
  CHECK(etaA == doctest::Approx(0.72).epsilon(1e-9));
  CHECK(etaB == doctest::Approx(0.72).epsilon(1e-9));

  ExperimentRecord perfect = synth_experiment(pred, 1.0, 1.0, 1e6);
  auto [a1, b1] = estimate_etas(perfect, pred);
  CHECK(a1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b1 == doctest::Approx(1.0).epsilon(1e-12));

  // invariance under uniform count scaling
  ExperimentRecord scaled = rec;
  for (int i = 0; i < 2; ++i) {
    scaled.singlesA[i] *= 7.0;
    scaled.singlesB[i] *= 7.0;
    for (int j = 0; j < 2; ++j) scaled.coincOO[i][j] *= 7.0;
  }
  auto [a2, b2] = estimate_etas(scaled, pred);
  CHECK(a2 == doctest::Approx(etaA).epsilon(1e-13));
  CHECK(b2 == doctest::Approx(etaB).epsilon(1e-13));

  ExperimentRecord empty;
  CHECK_THROWS_AS(estimate_etas(empty, pred), std::domain_error);

  // window construction: spanned by the estimates, bottom edge lowered by the
  // caller-supplied background allowance only
  auto win = eta_window_from_estimates({0.71, 0.705}, 0.02);
  CHECK(win.first == doctest::Approx(0.685).epsilon(1e-15));
  CHECK(win.second == doctest::Approx(0.71).epsilon(1e-15));
  CHECK_THROWS_AS(eta_window_from_estimates({0.7, 0.7}, -0.1), std::invalid_argument);
}

TEST_CASE("gamma bounds and the reported ratio") {
  PredictionSet pred = giustina_pred();
  ExperimentRecord rec = synth_experiment(pred, 0.72, 0.72, 25e6);
  rec.jValue = -127000.0;
  rec.totalTrials = 1e8;
  GammaReport rep = gamma_bounds(rec, pred, {0.68, 0.73});
  CHECK(rep.gammaReport == doctest::Approx(0.00127).epsilon(1e-12));
  CHECK(rep.gammaReport < 0.0013);

  // linearity in J
  ExperimentRecord doubled = rec;
  doubled.jValue *= 2.0;
  GammaReport rep2 = gamma_bounds(doubled, pred, {0.68, 0.73});
  CHECK(rep2.gammaA == doctest::Approx(2.0 * rep.gammaA).epsilon(1e-13));
  CHECK(rep2.windowIJ[1][1].lo == doctest::Approx(2.0 * rep.windowIJ[1][1].lo).epsilon(1e-13));

  ExperimentRecord zeroJ = rec;
  zeroJ.jValue = 0.0;
  GammaReport rep0 = gamma_bounds(zeroJ, pred, {0.68, 0.73});
  CHECK(rep0.gammaA == 0.0);
  CHECK(rep0.gammaB == 0.0);
  CHECK(rep0.gammaIJ[0][1] == 0.0);
}

TEST_CASE("consistency flags isolate a perturbed context") {
  PredictionSet pred = giustina_pred();
  ExperimentRecord rec = synth_experiment(pred, 0.72, 0.72, 25e6);
  GammaReport ok = gamma_bounds(rec, pred, {0.68, 0.73});
  CHECK(consistency_flags(ok).empty());

  ExperimentRecord bad = rec;
  bad.coincOO[1][1] *= 2.0;
  GammaReport offKey = gamma_bounds(bad, pred, {0.68, 0.73});
  auto flags = consistency_flags(offKey);
  CHECK(!flags.empty());
  for (const auto& [a, b] : flags) CHECK((a == "Gamma_22" || b == "Gamma_22"));

  // widening the window can only remove flags
  auto wide = consistency_flags(gamma_bounds(bad, pred, {0.3, 1.0}));
  CHECK(wide.size() <= flags.size());
}

TEST_CASE("christensen ratios") {
  auto [p1, p2] = christensen_ratios(1696.0, 1000000.0, 328873.0);
  CHECK(p1 == doctest::Approx(0.001696).epsilon(1e-12));
  CHECK(p2 == doctest::Approx(0.005157).epsilon(1e-4));
  auto [q1, q2] = christensen_ratios(5.0, 40.0, 40.0);
  CHECK(q1 == q2);
  auto [h1, h2] = christensen_ratios(5.0, 80.0, 40.0);
  CHECK(h1 == doctest::Approx(h2 / 2.0).epsilon(1e-15));
  CHECK_THROWS_AS(christensen_ratios(1.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("unfair-sampling table") {
  // exactly fair model: outcomes and detections drawn independently
  double eta = 0.8;
  Ensemble fair;
  for (int a : {1, -1})
    for (int b : {1, -1})
      for (int detA : {1, 0})
        for (int detB : {1, 0}) {
          LhvState s;
          s.instr = {detA ? a : 0, detA ? a : 0, detB ? b : 0, detB ? b : 0};
          s.pA = detA;
          s.pB = detB;
          double w = 0.25 * (detA ? eta : 1.0 - eta) * (detB ? eta : 1.0 - eta);
          fair.entries.push_back({s, w});
        }
  fair.validate();
  CountTable counts = synth_counts(fair, 100000);
  UnfairSamplingTable t = unfair_sampling_table(counts);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int b = 0; b < 2; ++b) {
        REQUIRE(t.rateA[i][j][b].has_value());
        CHECK(*t.rateA[i][j][b] == doctest::Approx(eta).epsilon(1e-12));
        REQUIRE(t.rateB[j][i][b].has_value());
        CHECK(*t.rateB[j][i][b] == doctest::Approx(eta).epsilon(1e-12));
      }

  // the unfair-sampling entries mirror the event-level conditionals exactly
  Ensemble m = extend_to_M_prime(build_M(2.0 * std::sqrt(2.0)));
  UnfairSamplingTable tm = unfair_sampling_table(synth_counts(m, 4096));
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int b = 0; b < 2; ++b) {
        double direct = eval_conditional(m, Event::A(i, OutcomeReq::detected),
                                         Event::B(j, b == 0 ? OutcomeReq::plus : OutcomeReq::minus));
        REQUIRE(tm.rateA[i - 1][j - 1][b].has_value());
        CHECK(*tm.rateA[i - 1][j - 1][b] == doctest::Approx(direct).epsilon(1e-11));
      }

  // empty subsamples stay undefined
  Ensemble oneSided;
  oneSided.entries.push_back({LhvState{{1, 1, 1, 1}, 1.0, 1.0}, 1.0});
  UnfairSamplingTable ts = unfair_sampling_table(synth_counts(oneSided, 100));
  CHECK_FALSE(ts.rateA[0][0][1].has_value());  // B1 = e never occurs
  CHECK(ts.rateA[0][0][0].has_value());

  // permuting the remote setting labels permutes the table columns identically
  CountTable mCounts = synth_counts(m, 4096);
  CountTable swapped = mCounts;
  for (int i = 1; i <= 2; ++i)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        swapped.count(i, 1, Cat(a), Cat(b)) = mCounts.count(i, 2, Cat(a), Cat(b));
        swapped.count(i, 2, Cat(a), Cat(b)) = mCounts.count(i, 1, Cat(a), Cat(b));
      }
  std::swap(swapped.nInf_B[0], swapped.nInf_B[1]);
  UnfairSamplingTable tOrig = unfair_sampling_table(mCounts);
  UnfairSamplingTable tSwap = unfair_sampling_table(swapped);
  for (int i = 0; i < 2; ++i)
    for (int b = 0; b < 2; ++b) {
      CHECK(tSwap.rateA[i][0][b] == tOrig.rateA[i][1][b]);
      CHECK(tSwap.rateA[i][1][b] == tOrig.rateA[i][0][b]);
    }
}

TEST_CASE("sampled counts stay near their expectation") {
  Ensemble m = extend_to_M_prime(build_M(2.5));
  std::int64_t trials = 20000;
  CountTable sampled = synth_counts_sampled(m, trials, 12345);
  CountTable expected = synth_counts(m, double(trials));
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          double mean = expected.count(i, j, Cat(a), Cat(b));
          double sigma = std::sqrt(std::max(1.0, mean));
          CHECK(std::abs(sampled.count(i, j, Cat(a), Cat(b)) - mean) < 6.0 * sigma);
        }
  // determinism under a fixed seed
  CountTable again = synth_counts_sampled(m, trials, 12345);
  CHECK(again.count(1, 1, Cat::o, Cat::o) == sampled.count(1, 1, Cat::o, Cat::o));
  CHECK(again.nInfInf == sampled.nInfInf);
}

TEST_CASE("record validation") {
  PredictionSet pred = giustina_pred();
  ExperimentRecord rec = synth_experiment(pred, 0.9, 0.9, 1000);
  rec.validate();
  ExperimentRecord broken = rec;
  broken.coincOO[0][0] = broken.singlesA[0] * 2.0;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}
