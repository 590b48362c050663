#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "bellkit/analysis.hpp"
#include "bellkit/io.hpp"

using namespace bellkit;

TEST_CASE("ensemble CSV round trip is bit exact") {
  std::mt19937_64 rng(97);
  std::uniform_int_distribution<int> instr(-1, 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Ensemble m;
  double total = 0.0;
  for (int k = 0; k < 40; ++k) {
    LhvState s;
    for (int c = 0; c < 4; ++c) s.instr[c] = instr(rng);
    s.pA = unif(rng);
    s.pB = unif(rng);
    double w = -std::log(unif(rng));
    total += w;
    m.entries.push_back({s, w});
  }
  for (auto& e : m.entries) e.weight /= total;

  std::ostringstream os;
  write_ensemble_csv(os, m);
  std::istringstream is(os.str());
  Ensemble back = read_ensemble_csv(is);
  REQUIRE(back.entries.size() == m.entries.size());
  for (std::size_t k = 0; k < m.entries.size(); ++k) {
    CHECK(back.entries[k].state == m.entries[k].state);
    CHECK(back.entries[k].weight == m.entries[k].weight);  // bitwise
  }
}

TEST_CASE("count table CSV round trip") {
  Ensemble m = extend_to_M_prime(build_M(2.6));
  CountTable c = synth_counts(m, 5000);
  std::ostringstream os;
  write_count_table_csv(os, c);
  std::istringstream is(os.str());
  CountTable back = read_count_table_csv(is);
  CHECK(back.trialsPerContext == c.trialsPerContext);
  CHECK(back.nInfInf == c.nInfInf);
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          CHECK(back.count(i, j, Cat(a), Cat(b)) == c.count(i, j, Cat(a), Cat(b)));
}

TEST_CASE("experiment CSV round trip") {
  PredictionSet pred = scenario_predictions(giustina_scenario(3.0, Permutation::labels));
  ExperimentRecord rec = synth_experiment(pred, 0.7, 0.7, 123456);
  rec.rParam = 3.0;
  std::ostringstream os;
  write_experiment_csv(os, rec);
  std::istringstream is(os.str());
  ExperimentRecord back = read_experiment_csv(is);
  CHECK(back.jValue == rec.jValue);
  CHECK(back.totalTrials == rec.totalTrials);
  CHECK(back.rParam == rec.rParam);
  for (int i = 0; i < 2; ++i) {
    CHECK(back.singlesA[i] == rec.singlesA[i]);
    CHECK(back.singlesB[i] == rec.singlesB[i]);
    for (int j = 0; j < 2; ++j) CHECK(back.coincOO[i][j] == rec.coincOO[i][j]);
  }
}

TEST_CASE("scenario JSON parsing") {
  std::string text = R"({
    "state": {"kind": "giustina", "params": {"r": 3.0}},
    "angles": {"a1": 1.4939, "a2": 2.0595, "b1": -0.0942, "b2": 0.4520},
    "convention": "polarizer",
    "permutations": "labels"
  })";
  Scenario sc = scenario_from_json(text);
  CHECK(sc.state.kind == "giustina");
  CHECK(sc.state.param == 3.0);
  CHECK(sc.convention == AngleConvention::polarizer);
  CHECK(sc.permutations == Permutation::labels);
  PredictionSet pred = scenario_predictions(sc);
  pred.validate();

  CHECK_THROWS(scenario_from_json("{\"state\": {\"kind\": \"psi1\"}}"));  // missing angles
  CHECK_THROWS_AS(scenario_from_json(R"({"state": {"kind": "nope"},
    "angles": {"a1": 0, "a2": 0, "b1": 0, "b2": 0}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(permutation_from_string("sideways"), std::invalid_argument);
}

TEST_CASE("bundled reference models load as valid ensembles") {
  for (const char* name : {"psi1", "psi2"}) {
    auto cols =
        read_reference_models(std::string(BELLKIT_DATA_DIR "/reference_models_") + name + ".csv");
    REQUIRE(cols.size() == 11);
    for (const auto& col : cols) {
      CHECK(col.model.entries.size() == 81);
      col.model.validate();
      CHECK(col.eta >= 0.8);
      CHECK(col.eta <= 1.0);
    }
  }
}

TEST_CASE("beta report JSON carries the full report") {
  BetaReport r;
  r.value = -0.5;
  r.kind = BetaKind::eberhard_prob;
  r.lower = 0.0;
  r.upper = std::numeric_limits<double>::infinity();
  r.violated = true;
  r.assumptions = {"space-like-separation"};
  std::string j = beta_report_json(r);
  CHECK(j.find("\"value\": -0.5") != std::string::npos);
  CHECK(j.find("eberhard_prob") != std::string::npos);
  CHECK(j.find("space-like-separation") != std::string::npos);
}
