#pragma once

#include <array>
#include <optional>
#include <vector>

#include "bellkit/quantum.hpp"

namespace bellkit {

/// One hidden-variable state: deterministic outcome instructions for
/// (A1,A2;B1,B2), each in {+1,-1,0} with 0 = undetected, plus the
/// probabilities pA, pB of a detection when the polarizer is removed
/// on the respective side.
struct LhvState {
  std::array<int, 4> instr = {0, 0, 0, 0};  // A1, A2, B1, B2
  double pA = 0.0;
  double pB = 0.0;

  int a(int i) const { return instr[i - 1]; }
  int b(int j) const { return instr[1 + j]; }

  void validate() const;
  bool same_instructions(const LhvState& o) const { return instr == o.instr; }
  bool operator==(const LhvState& o) const { return instr == o.instr && pA == o.pA && pB == o.pB; }
};

/// Canonical order: lexicographic on (A1,A2,B1,B2,pA,pB) with +1 < -1 < 0
/// for instructions and larger no-polarizer probabilities first.
bool canonical_less(const LhvState& x, const LhvState& y);

struct Ensemble {
  struct Entry {
    LhvState state;
    double weight = 0.0;
  };
  std::vector<Entry> entries;

  double total_weight() const;
  /// States valid, weights nonnegative, total weight 1 within 1e-12.
  void validate() const;
  /// Sorted into canonical order with exact duplicates merged.
  Ensemble canonicalized() const;
};

/// One independent ensemble per setting pair; used when a hidden state may
/// occur only under particular measurement contexts (cross-talk models).
struct ContextualEnsemble {
  Ensemble perContext[2][2];  // [i-1][j-1]

  Ensemble& context(int i, int j) { return perContext[i - 1][j - 1]; }
  const Ensemble& context(int i, int j) const { return perContext[i - 1][j - 1]; }
  void validate() const;
};

/// Requirement an event atom places on a setting outcome.
enum class OutcomeReq : int {
  plus = +1,
  minus = -1,
  undetected = 0,
  detected = 2,  // either +1 or -1
};

/// Conjunction of atoms. Per side at most one setting atom; a no-polarizer
/// atom may not share a side with a setting atom (the polarizer is either
/// present or absent).
struct Event {
  std::optional<std::pair<int, OutcomeReq>> settingA;  // {settingIndex, requirement}
  std::optional<std::pair<int, OutcomeReq>> settingB;
  std::optional<bool> noPolA;  // true = detected, false = undetected
  std::optional<bool> noPolB;

  static Event A(int i, OutcomeReq r);
  static Event B(int j, OutcomeReq r);
  static Event A_noPol(bool detected);
  static Event B_noPol(bool detected);

  /// Conjunction; throws std::invalid_argument on conflicting atoms.
  Event operator&(const Event& other) const;
  void validate() const;
};

/// Probability of the state producing the event; no-polarizer responses on
/// the two sides are independent coin flips with biases pA, pB.
double state_probability(const LhvState& s, const Event& ev);

double eval_event(const Ensemble& ensemble, const Event& ev);

/// P(ev | given); throws std::domain_error when the condition has zero probability.
double eval_conditional(const Ensemble& ensemble, const Event& ev, const Event& given);

/// eta_crit(beta) = 2 / (1 + beta/2) for beta in [2, 2 sqrt(2)].
double eta_crit_chsh(double beta);

/// Block weights of the CHSH model at detection rate eta:
/// p = eta(3 eta - 2) over the no-zero block, q = 4 eta(1 - eta) over the
/// one-zero block, r = 1 - p - q on the all-undetected state.
struct ModelWeights {
  double eta, p, q, r;
};
ModelWeights chsh_model_weights(double eta);

/// The 8 + 8 + 1 states of the CHSH model; weights p/8, q/8 and 1-p-q.
/// No-polarizer probabilities are left at 0 (extended separately).
/// Requires 2 < beta <= 2 sqrt(2).
Ensemble build_M(double beta);

/// Assign no-polarizer detections: pA = pB = 1 on the no-zero block,
/// pA = 0 exactly where A2 = 0 and pB = 0 exactly where B2 = 0 on the
/// one-zero block, and 0 on the all-zero state.
Ensemble extend_to_M_prime(const Ensemble& m);

/// Like extend_to_M_prime but with pA or pB = 1/2 on the side carrying the
/// zero instruction, removing the lock between polarizer and no-polarizer fates.
Ensemble build_M_double_prime(double beta);

/// Internal family versions parameterized by eta directly; weights may leave
/// [0,1] when eta < 2/3, so no Ensemble validation is performed.
Ensemble build_M_raw(double eta);
Ensemble extend_to_M_prime_raw(const Ensemble& m);
Ensemble build_M_double_prime_raw(double eta);

/// Closed-form model over the 25 one-instruction-per-side states:
/// joint states carry eta^2 Q^AB, single-side states eta Q - eta^2 (sum of
/// row/column of Q^AB), the vacuum state the remainder. Any weight below
/// -1e-12 makes the model infeasible; weights in [-1e-12, 0) are clamped.
struct ClosedFormModel {
  bool feasible = false;
  double rho0 = 0.0;           // vacuum weight before clamping
  double minWeight = 0.0;      // most negative weight encountered
  Ensemble model;              // valid only when feasible
};
ClosedFormModel build_closed_form_model(const PredictionSet& pred, double eta);

enum class StateSpace { reduced81, full324 };

/// reduced81: 16 no-zero instruction tuples with pA=pB=1, the 64 one-zero
/// tuples duplicated over the zeroed side's no-polarizer value, and the
/// all-zero state. full324: all 81 tuples x (pA,pB) in {0,1}^2.
std::vector<LhvState> enumerate_states(StateSpace space);

struct NoEnhancementViolation {
  std::size_t entryIndex = 0;
  LhvState state;
  Side side = Side::A;
  int settingIndex = 0;
};

/// States where a deterministic detection instruction coexists with a smaller
/// no-polarizer detection probability on the same side.
std::vector<NoEnhancementViolation> check_no_enhancement(const Ensemble& ensemble);

/// Cross-talk model: (+1,x;+1,+1) under A-setting 1; (x,+1;+1,-1) and
/// (x,-1;+1,-1) with weight 1/2 each under A-setting 2; all detections certain.
ContextualEnsemble build_crosstalk_M3();

/// Independent loss of each particle with survival probability `survival`:
/// a lost particle reports 0 under every setting and is never detected
/// without a polarizer.
Ensemble thin_ensemble(const Ensemble& ensemble, double survival);

/// Replace every state by its four deterministic sub-states with
/// pA, pB in {0,1} and product weights.
Ensemble expand_substates(const Ensemble& ensemble);

}  // namespace bellkit
