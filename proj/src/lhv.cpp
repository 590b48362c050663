#include "bellkit/lhv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bellkit {

namespace {

int instr_rank(int v) {
  switch (v) {
    case 1: return 0;
    case -1: return 1;
    default: return 2;
  }
}

bool matches(int instruction, OutcomeReq r) {
  switch (r) {
    case OutcomeReq::plus: return instruction == 1;
    case OutcomeReq::minus: return instruction == -1;
    case OutcomeReq::undetected: return instruction == 0;
    case OutcomeReq::detected: return instruction != 0;
  }
  return false;
}

}  // namespace

void LhvState::validate() const {
  for (int v : instr)
    if (v != 1 && v != -1 && v != 0) throw std::invalid_argument("LhvState: instruction outside {+1,-1,0}");
  if (!(pA >= 0.0 && pA <= 1.0 && pB >= 0.0 && pB <= 1.0))
    throw std::invalid_argument("LhvState: pA, pB must lie in [0,1]");
}

bool canonical_less(const LhvState& x, const LhvState& y) {
  for (int k = 0; k < 4; ++k) {
    int rx = instr_rank(x.instr[k]), ry = instr_rank(y.instr[k]);
    if (rx != ry) return rx < ry;
  }
  if (x.pA != y.pA) return x.pA > y.pA;
  return x.pB > y.pB;
}

double Ensemble::total_weight() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.weight;
  return s;
}

void Ensemble::validate() const {
  for (const auto& e : entries) {
    e.state.validate();
    if (!(e.weight >= 0.0)) throw std::invalid_argument("Ensemble: negative weight");
  }
  if (std::abs(total_weight() - 1.0) > 1e-12)
    throw std::invalid_argument("Ensemble: weights do not sum to 1");
}

Ensemble Ensemble::canonicalized() const {
  Ensemble out;
  out.entries = entries;
  std::sort(out.entries.begin(), out.entries.end(), [](const Entry& a, const Entry& b) {
    if (!(a.state == b.state)) return canonical_less(a.state, b.state);
    return false;
  });
  Ensemble merged;
  for (const auto& e : out.entries) {
    if (!merged.entries.empty() && merged.entries.back().state == e.state)
      merged.entries.back().weight += e.weight;
    else
      merged.entries.push_back(e);
  }
  return merged;
}

void ContextualEnsemble::validate() const {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) perContext[i][j].validate();
}

Event Event::A(int i, OutcomeReq r) {
  if (i != 1 && i != 2) throw std::invalid_argument("Event: setting index must be 1 or 2");
  Event e;
  e.settingA = {i, r};
  return e;
}

Event Event::B(int j, OutcomeReq r) {
  if (j != 1 && j != 2) throw std::invalid_argument("Event: setting index must be 1 or 2");
  Event e;
  e.settingB = {j, r};
  return e;
}

Event Event::A_noPol(bool detected) {
  Event e;
  e.noPolA = detected;
  return e;
}

Event Event::B_noPol(bool detected) {
  Event e;
  e.noPolB = detected;
  return e;
}

Event Event::operator&(const Event& other) const {
  Event out = *this;
  if (other.settingA) {
    if (out.settingA && *out.settingA != *other.settingA)
      throw std::invalid_argument("Event: conflicting A-setting atoms");
    out.settingA = other.settingA;
  }
  if (other.settingB) {
    if (out.settingB && *out.settingB != *other.settingB)
      throw std::invalid_argument("Event: conflicting B-setting atoms");
    out.settingB = other.settingB;
  }
  if (other.noPolA) {
    if (out.noPolA && *out.noPolA != *other.noPolA)
      throw std::invalid_argument("Event: conflicting A no-polarizer atoms");
    out.noPolA = other.noPolA;
  }
  if (other.noPolB) {
    if (out.noPolB && *out.noPolB != *other.noPolB)
      throw std::invalid_argument("Event: conflicting B no-polarizer atoms");
    out.noPolB = other.noPolB;
  }
  out.validate();
  return out;
}

void Event::validate() const {
  // A side may carry a setting atom together with a no-polarizer atom: such
  // conjunctions are not observable in a single run but are well defined on
  // the hidden states, where instructions and the no-polarizer coin coexist.
}

double state_probability(const LhvState& s, const Event& ev) {
  double p = 1.0;
  if (ev.settingA && !matches(s.a(ev.settingA->first), ev.settingA->second)) return 0.0;
  if (ev.settingB && !matches(s.b(ev.settingB->first), ev.settingB->second)) return 0.0;
  if (ev.noPolA) p *= *ev.noPolA ? s.pA : 1.0 - s.pA;
  if (ev.noPolB) p *= *ev.noPolB ? s.pB : 1.0 - s.pB;
  return p;
}

double eval_event(const Ensemble& ensemble, const Event& ev) {
  ev.validate();
  double p = 0.0;
  for (const auto& e : ensemble.entries) p += e.weight * state_probability(e.state, ev);
  return p;
}

double eval_conditional(const Ensemble& ensemble, const Event& ev, const Event& given) {
  double denom = eval_event(ensemble, given);
  if (denom <= 0.0) throw std::domain_error("eval_conditional: conditioning on a zero-probability event");
  return eval_event(ensemble, ev & given) / denom;
}

double eta_crit_chsh(double beta) {
  const double betaMax = 2.0 * std::sqrt(2.0) + 1e-9;
  if (!(beta >= 2.0 && beta <= betaMax))
    throw std::invalid_argument("eta_crit_chsh: beta must lie in [2, 2 sqrt(2)]");
  return 2.0 / (1.0 + beta / 2.0);
}

ModelWeights chsh_model_weights(double eta) {
  ModelWeights w;
  w.eta = eta;
  w.p = eta * (3.0 * eta - 2.0);
  w.q = 4.0 * eta * (1.0 - eta);
  w.r = 1.0 - w.p - w.q;
  return w;
}

namespace {

// State patterns of the CHSH model. Each row stands for the two states
// obtained with s = +1 and s = -1; entries are multiples of s (0 stays 0).
constexpr std::array<std::array<int, 4>, 4> kNoZeroPatterns = {{
    {1, 1, 1, 1},
    {1, 1, 1, -1},
    {1, -1, 1, 1},
    {1, -1, -1, 1},
}};

constexpr std::array<std::array<int, 4>, 4> kOneZeroPatterns = {{
    {1, 1, 1, 0},
    {1, -1, 0, 1},
    {1, 0, 1, 1},
    {0, 1, 1, -1},
}};

}  // namespace

Ensemble build_M_raw(double eta) {
  ModelWeights w = chsh_model_weights(eta);
  Ensemble m;
  for (int k = 0; k < 4; ++k)
    for (int s : {1, -1}) {
      LhvState st;
      for (int c = 0; c < 4; ++c) st.instr[c] = s * kNoZeroPatterns[k][c];
      m.entries.push_back({st, w.p / 8.0});
    }
  for (int k = 0; k < 4; ++k)
    for (int s : {1, -1}) {
      LhvState st;
      for (int c = 0; c < 4; ++c) st.instr[c] = s * kOneZeroPatterns[k][c];
      m.entries.push_back({st, w.q / 8.0});
    }
  m.entries.push_back({LhvState{}, w.r});
  return m;
}

Ensemble build_M(double beta) {
  if (!(beta > 2.0)) throw std::invalid_argument("build_M: beta must exceed the local bound 2");
  double eta = eta_crit_chsh(beta);
  ModelWeights w = chsh_model_weights(eta);
  if (w.p < 0.0 || w.p > 1.0 || w.q < 0.0 || w.q > 1.0)
    throw std::invalid_argument("build_M: block weights outside [0,1]");
  Ensemble m = build_M_raw(eta);
  m.validate();
  return m;
}

Ensemble extend_to_M_prime_raw(const Ensemble& m) {
  Ensemble out = m;
  for (auto& e : out.entries) {
    auto& s = e.state;
    int zeros = 0;
    for (int v : s.instr) zeros += v == 0;
    if (zeros == 0) {
      s.pA = s.pB = 1.0;
    } else if (zeros == 4) {
      s.pA = s.pB = 0.0;
    } else if (zeros == 1) {
      s.pA = s.a(2) == 0 ? 0.0 : 1.0;
      s.pB = s.b(2) == 0 ? 0.0 : 1.0;
    } else {
      throw std::invalid_argument("extend_to_M_prime: unrecognized state shape");
    }
  }
  return out;
}

Ensemble extend_to_M_prime(const Ensemble& m) {
  Ensemble out = extend_to_M_prime_raw(m);
  out.validate();
  return out;
}

Ensemble build_M_double_prime_raw(double eta) {
  Ensemble out = extend_to_M_prime_raw(build_M_raw(eta));
  for (auto& e : out.entries) {
    auto& s = e.state;
    int zeros = 0;
    for (int v : s.instr) zeros += v == 0;
    if (zeros != 1) continue;
    if (s.a(1) == 0 || s.a(2) == 0) {
      s.pA = 0.5;
      s.pB = 1.0;
    } else {
      s.pA = 1.0;
      s.pB = 0.5;
    }
  }
  return out;
}

Ensemble build_M_double_prime(double beta) {
  if (!(beta > 2.0)) throw std::invalid_argument("build_M_double_prime: beta must exceed the local bound 2");
  double eta = eta_crit_chsh(beta);
  ModelWeights w = chsh_model_weights(eta);
  if (w.p < 0.0 || w.p > 1.0 || w.q < 0.0 || w.q > 1.0)
    throw std::invalid_argument("build_M_double_prime: block weights outside [0,1]");
  Ensemble out = build_M_double_prime_raw(eta);
  out.validate();
  return out;
}

ClosedFormModel build_closed_form_model(const PredictionSet& pred, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("build_closed_form_model: eta must lie in [0,1]");
  pred.validate();

  ClosedFormModel res;
  Ensemble m;
  double assigned = 0.0;
  double minW = 0.0;

  auto push = [&](const LhvState& s, double w) {
    minW = std::min(minW, w);
    if (w < 0.0 && w >= -1e-12) w = 0.0;
    m.entries.push_back({s, w});
    assigned += w;
  };

  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int a : {1, -1})
        for (int b : {1, -1}) {
          LhvState s;
          s.instr[i - 1] = a;
          s.instr[1 + j] = b;
          s.pA = s.pB = 0.5;
          push(s, eta * eta * pred.q_joint(i, j, a, b));
        }
  for (int i = 1; i <= 2; ++i)
    for (int a : {1, -1}) {
      LhvState s;
      s.instr[i - 1] = a;
      s.pA = 0.5;
      s.pB = 0.0;
      double coincidence = 0.0;
      for (int j = 1; j <= 2; ++j)
        for (int b : {1, -1}) coincidence += pred.q_joint(i, j, a, b);
      push(s, eta * pred.q_a(i, a) - eta * eta * coincidence);
    }
  for (int j = 1; j <= 2; ++j)
    for (int b : {1, -1}) {
      LhvState s;
      s.instr[1 + j] = b;
      s.pA = 0.0;
      s.pB = 0.5;
      double coincidence = 0.0;
      for (int i = 1; i <= 2; ++i)
        for (int a : {1, -1}) coincidence += pred.q_joint(i, j, a, b);
      push(s, eta * pred.q_b(j, b) - eta * eta * coincidence);
    }

  res.rho0 = 1.0 - assigned;
  LhvState vacuum;
  double rho0 = res.rho0;
  minW = std::min(minW, rho0);
  if (rho0 < 0.0 && rho0 >= -1e-12) rho0 = 0.0;
  m.entries.push_back({vacuum, rho0});

  res.minWeight = minW;
  if (minW < -1e-12) {
    res.feasible = false;
    return res;
  }
  res.feasible = true;
  res.model = m;
  res.model.validate();
  return res;
}

std::vector<LhvState> enumerate_states(StateSpace space) {
  std::vector<LhvState> out;
  const int values[3] = {1, -1, 0};
  if (space == StateSpace::full324) {
    for (int v0 : values)
      for (int v1 : values)
        for (int v2 : values)
          for (int v3 : values)
            for (double pA : {1.0, 0.0})
              for (double pB : {1.0, 0.0}) out.push_back({{v0, v1, v2, v3}, pA, pB});
  } else {
    for (int v0 : values)
      for (int v1 : values)
        for (int v2 : values)
          for (int v3 : values) {
            LhvState s{{v0, v1, v2, v3}, 1.0, 1.0};
            int zeros = (v0 == 0) + (v1 == 0) + (v2 == 0) + (v3 == 0);
            if (zeros == 0) {
              out.push_back(s);
            } else if (zeros == 1) {
              bool zeroOnA = v0 == 0 || v1 == 0;
              for (double pz : {1.0, 0.0}) {
                if (zeroOnA)
                  s.pA = pz;
                else
                  s.pB = pz;
                out.push_back(s);
              }
            } else if (zeros == 4) {
              s.pA = s.pB = 0.0;
              out.push_back(s);
            }
          }
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::vector<NoEnhancementViolation> check_no_enhancement(const Ensemble& ensemble) {
  std::vector<NoEnhancementViolation> out;
  for (std::size_t k = 0; k < ensemble.entries.size(); ++k) {
    const LhvState& s = ensemble.entries[k].state;
    for (int i = 1; i <= 2; ++i) {
      if (s.a(i) != 0 && s.pA < 1.0) out.push_back({k, s, Side::A, i});
      if (s.b(i) != 0 && s.pB < 1.0) out.push_back({k, s, Side::B, i});
    }
  }
  return out;
}

ContextualEnsemble build_crosstalk_M3() {
  ContextualEnsemble ce;
  // The A2 (resp. A1) instruction is never read in these contexts; +1 stands
  // in for the unconstrained slot.
  LhvState first{{1, 1, 1, 1}, 1.0, 1.0};
  LhvState plus{{1, 1, 1, -1}, 1.0, 1.0};
  LhvState minus{{1, -1, 1, -1}, 1.0, 1.0};
  for (int j = 1; j <= 2; ++j) {
    ce.context(1, j).entries = {{first, 1.0}};
    ce.context(2, j).entries = {{plus, 0.5}, {minus, 0.5}};
  }
  ce.validate();
  return ce;
}

Ensemble thin_ensemble(const Ensemble& ensemble, double survival) {
  if (!(survival >= 0.0 && survival <= 1.0))
    throw std::invalid_argument("thin_ensemble: survival probability must lie in [0,1]");
  const double t = survival;
  Ensemble out;
  for (const auto& e : ensemble.entries) {
    LhvState keep = e.state;
    LhvState aLost = e.state;
    aLost.instr[0] = aLost.instr[1] = 0;
    aLost.pA = 0.0;
    LhvState bLost = e.state;
    bLost.instr[2] = bLost.instr[3] = 0;
    bLost.pB = 0.0;
    LhvState bothLost = aLost;
    bothLost.instr[2] = bothLost.instr[3] = 0;
    bothLost.pB = 0.0;
    out.entries.push_back({keep, e.weight * t * t});
    out.entries.push_back({bLost, e.weight * t * (1.0 - t)});
    out.entries.push_back({aLost, e.weight * (1.0 - t) * t});
    out.entries.push_back({bothLost, e.weight * (1.0 - t) * (1.0 - t)});
  }
  return out.canonicalized();
}

Ensemble expand_substates(const Ensemble& ensemble) {
  Ensemble out;
  for (const auto& e : ensemble.entries) {
    for (int da : {1, 0})
      for (int db : {1, 0}) {
        double w = e.weight * (da ? e.state.pA : 1.0 - e.state.pA) * (db ? e.state.pB : 1.0 - e.state.pB);
        if (w == 0.0) continue;
        LhvState s = e.state;
        s.pA = da;
        s.pB = db;
        out.entries.push_back({s, w});
      }
  }
  return out.canonicalized();
}

}  // namespace bellkit
