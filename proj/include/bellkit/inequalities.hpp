#pragma once

#include <string>
#include <vector>

#include "bellkit/lhv.hpp"
#include "bellkit/quantum.hpp"

namespace bellkit {

/// Outcome categories of a detection attempt behind a polarizing splitter.
/// g ("gamma") is a local coincidence: both exit channels fire at once.
enum class Cat : int { o = 0, e = 1, u = 2, g = 3 };

/// Raw counts of a two-setting-per-side run. Counts are stored as doubles so
/// exact expected counts can be carried without rounding; sampled tables hold
/// integers.
struct CountTable {
  double n[2][2][4][4] = {};  // [i-1][j-1][catA][catB]
  double trialsPerContext = 0.0;

  // Runs with the remote polarizer removed: nA_inf[i-1] counts A_i = o
  // together with a B-side no-polarizer detection; nInf_B is the transpose;
  // nInfInf counts no-polarizer coincidences.
  double nA_inf[2] = {0.0, 0.0};
  double nInf_B[2] = {0.0, 0.0};
  double nInfInf = 0.0;
  double trialsNoPol = 0.0;

  double& count(int i, int j, Cat a, Cat b) { return n[i - 1][j - 1][int(a)][int(b)]; }
  double count(int i, int j, Cat a, Cat b) const { return n[i - 1][j - 1][int(a)][int(b)]; }
  /// Frequency relative to the context's trials.
  double freq(int i, int j, Cat a, Cat b) const;
  void validate() const;
};

enum class BetaKind {
  chsh,
  ch_gen,
  ch_ng,
  ch_op,
  ch_2ch,
  ch_norm,
  eberhard_prob,
  eberhard_counts,
  eberhard_eta,
};

enum class ChshConvention { paper, aspect };

std::string to_string(BetaKind k);
std::string to_string(ChshConvention c);

struct BetaReport {
  double value = 0.0;
  BetaKind kind = BetaKind::chsh;
  ChshConvention convention = ChshConvention::paper;
  double lower = 0.0;
  double upper = 0.0;
  bool violated = false;
  std::vector<std::string> assumptions;
};

/// Correlations <A_i B_j> restricted to coincident detections.
struct Correlations {
  double c[2][2] = {};
  double& at(int i, int j) { return c[i - 1][j - 1]; }
  double at(int i, int j) const { return c[i - 1][j - 1]; }
};

Correlations correlations(const Ensemble& m);
Correlations correlations(const PredictionSet& pred);
/// Coincidence-normalized correlations estimated from a count table.
Correlations correlations(const CountTable& counts);

/// The probabilities entering the CH family of expressions.
struct ChTerms {
  double p11 = 0, p12 = 0, p21 = 0, p22 = 0;  // P(A_i = 1, B_j = 1)
  double pA1 = 0, pA2 = 0, pB1 = 0;           // P(A_1 = 1), P(A_2 = 1), P(B_1 = 1)
  double pA1_B = 0, pA_B1 = 0;                // P(A_1 = 1, B), P(A, B_1 = 1)
  double pAB = 0;                             // P(A, B)
};

ChTerms ch_terms(const Ensemble& m);
/// Perfect-detection reading of a prediction set (every no-polarizer term 1).
ChTerms ch_terms(const PredictionSet& pred);
/// Frequencies from a count table; single-setting marginals are read in the
/// context pairing the tested setting with the first remote one.
ChTerms ch_terms(const CountTable& counts);

/// paper: |C11 + C12 + C21 - C22| <= 2; aspect: |C11 - C12 + C21 + C22| <= 2.
BetaReport chsh(const Correlations& c, ChshConvention convention);

/// paper: P11 + P12 + P21 - P22 - P(A1=1) - P(B1=1), bounds (-1, 0).
/// aspect: the equivalent rearrangement -1 - [P11 - P12 + P21 + P22 - P(A2=1)
/// - P(B1=1)], so the maximal quantum violation reads (sqrt(2)-1)/2 above 0.
BetaReport ch_genuine(const ChTerms& t, ChshConvention convention);

/// (1/eta^2)[P11 + P12 + P21 - P22 - P(A1=1,B) - P(A,B1=1)]; legitimate only
/// under no-enhancement.
BetaReport ch_nongenuine(const ChTerms& t, double eta);
BetaReport ch_nongenuine(const Ensemble& m, double eta);

/// Count-based operational expression
/// [N(a1,b1)+N(a1,b2)+N(a2,b1)-N(a2,b2)-N(a1,inf)-N(inf,b1)] / N(inf,inf),
/// evaluated on per-run frequencies so unequal trial counts stay comparable.
BetaReport ch_operational(const CountTable& counts);

/// Detection-rate-normalized expression (fair-sampling dependent).
BetaReport ch_normalized(const ChTerms& t, double eta);
BetaReport ch_normalized(const CountTable& counts, double eta);

/// Double-channel expression normalized by both-detected totals
/// (fair-sampling dependent).
BetaReport ch_two_channel(const CountTable& counts);

/// Local-coincidence corrections. SEL discards every event with a gamma on
/// either side; NS counts an o-channel fire as the outcome o regardless of
/// the other channel. Marginals are read in the contexts pairing the tested
/// setting with the first remote setting.
struct CoincidenceCorrection {
  double deltaJoint[2][2][2][2] = {};  // [i-1][j-1][a][b], a,b in {o,e}
  double deltaA[2][2] = {};            // [i-1][a]
  double deltaB[2][2] = {};            // [j-1][b]
  double M = 0.0;
  double betaNS = 0.0;
  double betaSEL = 0.0;
};
CoincidenceCorrection coincidence_correction(const CountTable& counts);

/// -P11(+,+) + P12(+,-) + P12(+,0) + P21(-,+) + P21(0,+) + P22(+,+), >= 0 for
/// any non-contextual model.
BetaReport eberhard(const Ensemble& m);
/// Same expression on the model thinned to detection rate eta (capped at the
/// model's own rate).
BetaReport eberhard(const Ensemble& m, double eta);
BetaReport eberhard(const ContextualEnsemble& m);

/// Raw count form J = -n_oo(1,1) + n_oe(1,2) + n_ou(1,2) + n_eo(2,1)
/// + n_uo(2,1) + n_oo(2,2).
double eberhard_counts(const CountTable& counts);

/// Quantum prediction under independent errors:
/// (N/4)[-e2 Q11(o,o) + e2 Q12(o,e) + e(1-e) Q1^A(o) + e2 Q21(e,o)
///       + e(1-e) Q1^B(o) + e2 Q22(o,o)], with o == +1.
BetaReport eberhard_qm(const PredictionSet& pred, double eta, double nPairs);

/// CH values of the enhancement models at detection rate eta; defined for the
/// whole (0,1] range even where the underlying block weights leave [0,1].
struct EnhancementCurvePoint {
  double eta = 0.0;
  double betaGenPrime = 0.0;
  double betaGenDoublePrime = 0.0;
  double betaNgPrime = 0.0;
  double betaNgDoublePrime = 0.0;
};
EnhancementCurvePoint enhancement_curve_point(double eta);

}  // namespace bellkit
