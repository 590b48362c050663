#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bellkit/analysis.hpp"
#include "bellkit/inequalities.hpp"
#include "bellkit/lhv.hpp"
#include "bellkit/quantum.hpp"

namespace bellkit {

enum class Permutation { none, labels, directions, both };

Permutation permutation_from_string(const std::string& s);
std::string to_string(Permutation p);

struct StateSpec {
  std::string kind;    // psi1 | psi2 | giustina | larsson
  double param = 0.0;  // r for giustina, xi for larsson
};

/// A full measurement scenario: state, the four analyzer angles (radians),
/// the angle convention, and optional label/direction permutations.
struct Scenario {
  StateSpec state;
  double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;
  AngleConvention convention = AngleConvention::bloch;
  Permutation permutations = Permutation::none;
};

QuantumState make_state(const StateSpec& spec);
PredictionSet scenario_predictions(const Scenario& sc);
Scenario scenario_from_json(const std::string& text);

/// Scenario preset for the Giustina run: r = 3 and the reported polarizer
/// angles 85.6, 118.0, -5.4 and 25.9 degrees.
Scenario giustina_scenario(double r = 3.0, Permutation perms = Permutation::none);

// --- CSV formats -----------------------------------------------------------

/// columns i,j,a,b,probability (then the marginal blocks with j or i = 0)
void write_prediction_csv(std::ostream& os, const PredictionSet& pred);

/// columns instrA1,instrA2,instrB1,instrB2,pA,pB,weight; weights round-trip
/// bit-exactly through 17 significant digits.
void write_ensemble_csv(std::ostream& os, const Ensemble& m);
Ensemble read_ensemble_csv(std::istream& is);

void write_count_table_csv(std::ostream& os, const CountTable& counts);
CountTable read_count_table_csv(std::istream& is);

void write_experiment_csv(std::ostream& os, const ExperimentRecord& rec);
ExperimentRecord read_experiment_csv(std::istream& is);

/// One column of the bundled reference-model tables.
struct ReferenceColumn {
  double theta = 0.0;
  double eta = 0.0;
  Ensemble model;
};
std::vector<ReferenceColumn> read_reference_models(const std::string& path);

// --- JSON reports ----------------------------------------------------------

std::string beta_report_json(const BetaReport& report);
std::string gamma_report_json(const GammaReport& report,
                              const std::vector<std::pair<std::string, std::string>>& flags);

std::string read_text_file(const std::string& path);

}  // namespace bellkit
