#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellkit/inequalities.hpp"
#include "bellkit/lhv.hpp"
#include "bellkit/quantum.hpp"

namespace bellkit {

/// Counts published with a single-channel Eberhard-style run: per-setting
/// o-channel singles, o-o coincidences, the reported J and the trial budget.
/// Singles are accumulated over the same number of trials as the coincidence
/// context they are paired with.
struct ExperimentRecord {
  double singlesA[2] = {};    // S^A_o(alpha_i)
  double singlesB[2] = {};    // S^B_o(beta_j)
  double coincOO[2][2] = {};  // C_oo(alpha_i, beta_j)
  double jValue = 0.0;
  double totalTrials = 0.0;  // overall number of emitted pairs (all contexts)
  std::array<Setting, 4> angles = {};
  double rParam = 0.0;

  void validate() const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

struct GammaReport {
  double gammaA = 0.0;  // evaluated at the window midpoint
  double gammaB = 0.0;
  double gammaIJ[2][2] = {};
  double gammaReport = 0.0;      // |J| / N_ours
  double gammaReportBound = 0.0; // |J| / N_ours upper bound supplied by caller
  std::pair<double, double> etaWindow;
  Interval windowA, windowB;
  Interval windowIJ[2][2];
  double jValue = 0.0;
};

/// Direct detection-rate estimates
///   etaA = C_oo(a2,b1) / S^B_o(b1) / Q(A2=o | B1=o),
///   etaB = C_oo(a1,b1) / S^A_o(a1) / Q(B1=o | A1=o).
/// Throws std::domain_error on a zero denominator or zero conditional.
std::pair<double, double> estimate_etas(const ExperimentRecord& rec, const PredictionSet& pred);

/// Confidence window spanned by the two estimates. `backgroundSubtraction`
/// lowers the bottom edge to allow for accidental counts; it is always
/// supplied by the caller, never inferred.
std::pair<double, double> eta_window_from_estimates(std::pair<double, double> etas,
                                                    double backgroundSubtraction = 0.0);

/// Gamma_A = etaA Q^A_1(o) / (4 S^A_o(a1)) J, Gamma_B likewise, and
/// Gamma_ij = etaA etaB Q_ij(o,o) / (4 C_oo(a_i,b_j)) J, each evaluated at
/// both window endpoints. `reportBound` is the threshold recorded next to
/// the |J| / N_ours ratio.
GammaReport gamma_bounds(const ExperimentRecord& rec, const PredictionSet& pred,
                         std::pair<double, double> etaWindow, double reportBound = 0.0013);

/// Pairs of Gamma windows with empty intersection; a nonempty list signals
/// context-dependent detection rates.
std::vector<std::pair<std::string, std::string>> consistency_flags(const GammaReport& report);

/// p1 = s2b / cAB, p2 = s2b / cA'B.
std::pair<double, double> christensen_ratios(double s2b, double cAB, double cAPrimeB);

/// Conditional detection rates P(A_i detected | B_j = b) and the side-swapped
/// analogue, from double-channel counts. Entries with an empty conditioning
/// subsample are left unset.
struct UnfairSamplingTable {
  std::optional<double> rateA[2][2][2];  // [i-1][j-1][b] with b: 0 -> o, 1 -> e
  std::optional<double> rateB[2][2][2];  // [j-1][i-1][a]
};
UnfairSamplingTable unfair_sampling_table(const CountTable& counts);

/// Expected (noise-free) counts of a run driven by an ensemble:
/// `trials` per coincidence context and per removed-polarizer run.
CountTable synth_counts(const Ensemble& m, double trials);

/// Multinomial sampling with a seeded generator.
CountTable synth_counts_sampled(const Ensemble& m, std::int64_t trials, std::uint64_t seed);

/// Expected single-channel record for a prediction set under independent
/// errors with per-side rates etaA, etaB; `pairsPerContext` emitted pairs per
/// setting pair.
ExperimentRecord synth_experiment(const PredictionSet& pred, double etaA, double etaB,
                                  double pairsPerContext);

}  // namespace bellkit
