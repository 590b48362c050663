#include "bellkit/inequalities.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bellkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool outside(double v, double lo, double hi) { return v < lo || v > hi; }

OutcomeReq req_of(int outcome) {
  switch (outcome) {
    case 1: return OutcomeReq::plus;
    case -1: return OutcomeReq::minus;
    case 0: return OutcomeReq::undetected;
    default: throw std::invalid_argument("outcome must be +1, -1 or 0");
  }
}

double joint_prob(const Ensemble& m, int i, int a, int j, int b) {
  return eval_event(m, Event::A(i, req_of(a)) & Event::B(j, req_of(b)));
}

}  // namespace

double CountTable::freq(int i, int j, Cat a, Cat b) const {
  if (trialsPerContext <= 0.0) throw std::invalid_argument("CountTable: trialsPerContext not set");
  return count(i, j, a, b) / trialsPerContext;
}

void CountTable::validate() const {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double total = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          if (n[i][j][a][b] < 0.0) throw std::invalid_argument("CountTable: negative count");
          total += n[i][j][a][b];
        }
      if (trialsPerContext > 0.0 && total > trialsPerContext * (1.0 + 1e-9))
        throw std::invalid_argument("CountTable: context total exceeds trials");
    }
  for (int i = 0; i < 2; ++i)
    if (nA_inf[i] < 0.0 || nInf_B[i] < 0.0) throw std::invalid_argument("CountTable: negative count");
  if (nInfInf < 0.0) throw std::invalid_argument("CountTable: negative count");
}

std::string to_string(BetaKind k) {
  switch (k) {
    case BetaKind::chsh: return "chsh";
    case BetaKind::ch_gen: return "ch_gen";
    case BetaKind::ch_ng: return "ch_ng";
    case BetaKind::ch_op: return "ch_op";
    case BetaKind::ch_2ch: return "ch_2ch";
    case BetaKind::ch_norm: return "ch_norm";
    case BetaKind::eberhard_prob: return "eberhard_prob";
    case BetaKind::eberhard_counts: return "eberhard_counts";
    case BetaKind::eberhard_eta: return "eberhard_eta";
  }
  return "?";
}

std::string to_string(ChshConvention c) { return c == ChshConvention::paper ? "paper" : "aspect"; }

Correlations correlations(const Ensemble& m) {
  Correlations out;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) {
      double pp = joint_prob(m, i, 1, j, 1);
      double pm = joint_prob(m, i, 1, j, -1);
      double mp = joint_prob(m, i, -1, j, 1);
      double mm = joint_prob(m, i, -1, j, -1);
      double coinc = pp + pm + mp + mm;
      if (coinc <= 0.0) throw std::domain_error("correlations: no coincident detections for a setting pair");
      out.at(i, j) = (pp - pm - mp + mm) / coinc;
    }
  return out;
}

Correlations correlations(const PredictionSet& pred) {
  Correlations out;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) out.at(i, j) = pred.correlation(i, j);
  return out;
}

Correlations correlations(const CountTable& counts) {
  Correlations out;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) {
      double pp = counts.count(i, j, Cat::o, Cat::o);
      double pm = counts.count(i, j, Cat::o, Cat::e);
      double mp = counts.count(i, j, Cat::e, Cat::o);
      double mm = counts.count(i, j, Cat::e, Cat::e);
      double coinc = pp + pm + mp + mm;
      if (coinc <= 0.0) throw std::domain_error("correlations: no coincident counts for a setting pair");
      out.at(i, j) = (pp - pm - mp + mm) / coinc;
    }
  return out;
}

ChTerms ch_terms(const Ensemble& m) {
  ChTerms t;
  t.p11 = joint_prob(m, 1, 1, 1, 1);
  t.p12 = joint_prob(m, 1, 1, 2, 1);
  t.p21 = joint_prob(m, 2, 1, 1, 1);
  t.p22 = joint_prob(m, 2, 1, 2, 1);
  t.pA1 = eval_event(m, Event::A(1, OutcomeReq::plus));
  t.pA2 = eval_event(m, Event::A(2, OutcomeReq::plus));
  t.pB1 = eval_event(m, Event::B(1, OutcomeReq::plus));
  t.pA1_B = eval_event(m, Event::A(1, OutcomeReq::plus) & Event::B_noPol(true));
  t.pA_B1 = eval_event(m, Event::A_noPol(true) & Event::B(1, OutcomeReq::plus));
  t.pAB = eval_event(m, Event::A_noPol(true) & Event::B_noPol(true));
  return t;
}

ChTerms ch_terms(const PredictionSet& pred) {
  ChTerms t;
  t.p11 = pred.q_joint(1, 1, 1, 1);
  t.p12 = pred.q_joint(1, 2, 1, 1);
  t.p21 = pred.q_joint(2, 1, 1, 1);
  t.p22 = pred.q_joint(2, 2, 1, 1);
  t.pA1 = pred.q_a(1, 1);
  t.pA2 = pred.q_a(2, 1);
  t.pB1 = pred.q_b(1, 1);
  t.pA1_B = t.pA1;
  t.pA_B1 = t.pB1;
  t.pAB = 1.0;
  return t;
}

ChTerms ch_terms(const CountTable& counts) {
  if (counts.trialsPerContext <= 0.0) throw std::invalid_argument("ch_terms: trials not set");
  ChTerms t;
  t.p11 = counts.freq(1, 1, Cat::o, Cat::o);
  t.p12 = counts.freq(1, 2, Cat::o, Cat::o);
  t.p21 = counts.freq(2, 1, Cat::o, Cat::o);
  t.p22 = counts.freq(2, 2, Cat::o, Cat::o);
  for (int cb = 0; cb < 4; ++cb) {
    t.pA1 += counts.freq(1, 1, Cat::o, Cat(cb));
    t.pA2 += counts.freq(2, 1, Cat::o, Cat(cb));
    t.pB1 += counts.freq(1, 1, Cat(cb), Cat::o);
  }
  if (counts.trialsNoPol > 0.0) {
    t.pA1_B = counts.nA_inf[0] / counts.trialsNoPol;
    t.pA_B1 = counts.nInf_B[0] / counts.trialsNoPol;
    t.pAB = counts.nInfInf / counts.trialsNoPol;
  }
  return t;
}

BetaReport chsh(const Correlations& c, ChshConvention convention) {
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      if (std::abs(c.at(i, j)) > 1.0 + 1e-12)
        throw std::invalid_argument("chsh: correlations must lie in [-1,1]");
  BetaReport r;
  r.kind = BetaKind::chsh;
  r.convention = convention;
  if (convention == ChshConvention::paper)
    r.value = std::abs(c.at(1, 1) + c.at(1, 2) + c.at(2, 1) - c.at(2, 2));
  else
    r.value = std::abs(c.at(1, 1) - c.at(1, 2) + c.at(2, 1) + c.at(2, 2));
  r.lower = -2.0;
  r.upper = 2.0;
  r.violated = outside(r.value, r.lower, r.upper);
  r.assumptions = {"fair-sampling"};
  return r;
}

BetaReport ch_genuine(const ChTerms& t, ChshConvention convention) {
  BetaReport r;
  r.kind = BetaKind::ch_gen;
  r.convention = convention;
  if (convention == ChshConvention::paper)
    r.value = t.p11 + t.p12 + t.p21 - t.p22 - t.pA1 - t.pB1;
  else
    r.value = -1.0 - (t.p11 - t.p12 + t.p21 + t.p22 - t.pA2 - t.pB1);
  r.lower = -1.0;
  r.upper = 0.0;
  r.violated = outside(r.value, r.lower, r.upper);
  return r;
}

BetaReport ch_nongenuine(const ChTerms& t, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("ch_nongenuine: eta must lie in (0,1]");
  BetaReport r;
  r.kind = BetaKind::ch_ng;
  r.value = (t.p11 + t.p12 + t.p21 - t.p22 - t.pA1_B - t.pA_B1) / (eta * eta);
  r.lower = -1.0 / (eta * eta);
  r.upper = 0.0;
  r.violated = outside(r.value, r.lower, r.upper);
  r.assumptions = {"no-enhancement"};
  return r;
}

BetaReport ch_nongenuine(const Ensemble& m, double eta) { return ch_nongenuine(ch_terms(m), eta); }

BetaReport ch_operational(const CountTable& counts) {
  if (counts.nInfInf <= 0.0) throw std::invalid_argument("ch_operational: N(inf,inf) must be positive");
  if (counts.trialsPerContext <= 0.0 || counts.trialsNoPol <= 0.0)
    throw std::invalid_argument("ch_operational: trial counts not set");
  auto f = [&](int i, int j) { return counts.freq(i, j, Cat::o, Cat::o); };
  double fa1 = counts.nA_inf[0] / counts.trialsNoPol;
  double fb1 = counts.nInf_B[0] / counts.trialsNoPol;
  double fInf = counts.nInfInf / counts.trialsNoPol;
  BetaReport r;
  r.kind = BetaKind::ch_op;
  r.value = (f(1, 1) + f(1, 2) + f(2, 1) - f(2, 2) - fa1 - fb1) / fInf;
  r.lower = -1.0;
  r.upper = 0.0;
  r.violated = outside(r.value, r.lower, r.upper);
  r.assumptions = {"no-enhancement"};
  return r;
}

BetaReport ch_normalized(const ChTerms& t, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("ch_normalized: eta must lie in (0,1]");
  BetaReport r;
  r.kind = BetaKind::ch_norm;
  r.value = (t.p11 + t.p12 + t.p21 - t.p22 - eta * t.pA1 - eta * t.pB1) / (eta * eta);
  r.lower = -1.0;
  r.upper = 0.0;
  r.violated = outside(r.value, r.lower, r.upper);
  r.assumptions = {"fair-sampling"};
  return r;
}

BetaReport ch_normalized(const CountTable& counts, double eta) {
  if (counts.trialsPerContext <= 0.0) throw std::invalid_argument("ch_normalized: trials not set");
  ChTerms t;
  t.p11 = counts.freq(1, 1, Cat::o, Cat::o);
  t.p12 = counts.freq(1, 2, Cat::o, Cat::o);
  t.p21 = counts.freq(2, 1, Cat::o, Cat::o);
  t.p22 = counts.freq(2, 2, Cat::o, Cat::o);
  double a1 = 0.0, b1 = 0.0;
  for (int cb = 0; cb < 4; ++cb) a1 += counts.freq(1, 1, Cat::o, Cat(cb));
  for (int ca = 0; ca < 4; ++ca) b1 += counts.freq(1, 1, Cat(ca), Cat::o);
  t.pA1 = a1;
  t.pB1 = b1;
  return ch_normalized(t, eta);
}

BetaReport ch_two_channel(const CountTable& counts) {
  if (counts.trialsPerContext <= 0.0) throw std::invalid_argument("ch_two_channel: trials not set");
  auto bothDetected = [&](int i, int j) {
    double s = 0.0;
    for (Cat a : {Cat::o, Cat::e})
      for (Cat b : {Cat::o, Cat::e}) s += counts.count(i, j, a, b);
    return s;
  };
  auto jointTerm = [&](int i, int j) {
    double d = bothDetected(i, j);
    if (d <= 0.0) throw std::invalid_argument("ch_two_channel: no both-channel coincidences");
    return counts.count(i, j, Cat::o, Cat::o) / d;
  };
  // Single-side totals read off the (1,1) context.
  double nA1o = 0.0, nA1e = 0.0, nB1o = 0.0, nB1e = 0.0;
  for (int cb = 0; cb < 4; ++cb) {
    nA1o += counts.count(1, 1, Cat::o, Cat(cb));
    nA1e += counts.count(1, 1, Cat::e, Cat(cb));
  }
  for (int ca = 0; ca < 4; ++ca) {
    nB1o += counts.count(1, 1, Cat(ca), Cat::o);
    nB1e += counts.count(1, 1, Cat(ca), Cat::e);
  }
  if (nA1o + nA1e <= 0.0 || nB1o + nB1e <= 0.0)
    throw std::invalid_argument("ch_two_channel: missing both-channel singles");
  BetaReport r;
  r.kind = BetaKind::ch_2ch;
  r.value = jointTerm(1, 1) + jointTerm(1, 2) + jointTerm(2, 1) - jointTerm(2, 2) -
            nA1o / (nA1o + nA1e) - nB1o / (nB1o + nB1e);
  r.lower = -1.0;
  r.upper = 0.0;
  r.violated = outside(r.value, r.lower, r.upper);
  r.assumptions = {"fair-sampling"};
  return r;
}

CoincidenceCorrection coincidence_correction(const CountTable& counts) {
  if (counts.trialsPerContext <= 0.0)
    throw std::invalid_argument("coincidence_correction: trials not set");
  CoincidenceCorrection cc;
  auto cat = [](int idx) { return idx == 0 ? Cat::o : Cat::e; };
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          cc.deltaJoint[i - 1][j - 1][a][b] = counts.freq(i, j, Cat::g, cat(b)) +
                                              counts.freq(i, j, cat(a), Cat::g) +
                                              counts.freq(i, j, Cat::g, Cat::g);
  for (int i = 1; i <= 2; ++i)
    for (int a = 0; a < 2; ++a) {
      double s = counts.freq(i, 1, cat(a), Cat::g);
      for (int cb = 0; cb < 4; ++cb) s += counts.freq(i, 1, Cat::g, Cat(cb));
      cc.deltaA[i - 1][a] = s;
    }
  for (int j = 1; j <= 2; ++j)
    for (int b = 0; b < 2; ++b) {
      double s = counts.freq(1, j, Cat::g, cat(b));
      for (int ca = 0; ca < 4; ++ca) s += counts.freq(1, j, Cat(ca), Cat::g);
      cc.deltaB[j - 1][b] = s;
    }
  cc.M = cc.deltaJoint[0][0][0][0] + cc.deltaJoint[0][1][0][0] + cc.deltaJoint[1][0][0][0] -
         cc.deltaJoint[1][1][0][0] - cc.deltaA[0][0] - cc.deltaB[0][0];

  auto selJoint = [&](int i, int j) { return counts.freq(i, j, Cat::o, Cat::o); };
  auto nsJoint = [&](int i, int j) {
    return counts.freq(i, j, Cat::o, Cat::o) + counts.freq(i, j, Cat::o, Cat::g) +
           counts.freq(i, j, Cat::g, Cat::o) + counts.freq(i, j, Cat::g, Cat::g);
  };
  double selA1 = counts.freq(1, 1, Cat::o, Cat::o) + counts.freq(1, 1, Cat::o, Cat::e) +
                 counts.freq(1, 1, Cat::o, Cat::u);
  double selB1 = counts.freq(1, 1, Cat::o, Cat::o) + counts.freq(1, 1, Cat::e, Cat::o) +
                 counts.freq(1, 1, Cat::u, Cat::o);
  double nsA1 = 0.0, nsB1 = 0.0;
  for (int cb = 0; cb < 4; ++cb)
    nsA1 += counts.freq(1, 1, Cat::o, Cat(cb)) + counts.freq(1, 1, Cat::g, Cat(cb));
  for (int ca = 0; ca < 4; ++ca)
    nsB1 += counts.freq(1, 1, Cat(ca), Cat::o) + counts.freq(1, 1, Cat(ca), Cat::g);

  cc.betaSEL = selJoint(1, 1) + selJoint(1, 2) + selJoint(2, 1) - selJoint(2, 2) - selA1 - selB1;
  cc.betaNS = nsJoint(1, 1) + nsJoint(1, 2) + nsJoint(2, 1) - nsJoint(2, 2) - nsA1 - nsB1;
  if (std::abs(cc.betaNS - (cc.betaSEL + cc.M)) > 1e-12)
    throw std::logic_error("coincidence_correction: NS/SEL decomposition failed");
  return cc;
}

namespace {

// terms = {P11(+,+), P12(+,-), P12(+,0), P21(-,+), P21(0,+), P22(+,+)}
BetaReport eberhard_from(const std::array<double, 6>& terms) {
  BetaReport r;
  r.kind = BetaKind::eberhard_prob;
  r.value = -terms[0] + terms[1] + terms[2] + terms[3] + terms[4] + terms[5];
  r.lower = 0.0;
  r.upper = kInf;
  r.violated = outside(r.value, r.lower, r.upper);
  r.assumptions = {"space-like-separation"};
  return r;
}

}  // namespace

BetaReport eberhard(const Ensemble& m) {
  return eberhard_from({
      joint_prob(m, 1, 1, 1, 1),   // P11(+,+)
      joint_prob(m, 1, 1, 2, -1),  // P12(+,-)
      joint_prob(m, 1, 1, 2, 0),   // P12(+,0)
      joint_prob(m, 2, -1, 1, 1),  // P21(-,+)
      joint_prob(m, 2, 0, 1, 1),   // P21(0,+)
      joint_prob(m, 2, 1, 2, 1),   // P22(+,+)
  });
}

BetaReport eberhard(const Ensemble& m, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eberhard: eta must lie in [0,1]");
  double rate = eval_event(m, Event::A(1, OutcomeReq::detected));
  double survival = rate > 0.0 ? std::min(1.0, eta / rate) : 1.0;
  return eberhard(thin_ensemble(m, survival));
}

BetaReport eberhard(const ContextualEnsemble& m) {
  m.validate();
  auto term = [&](int i, int a, int j, int b) {
    return eval_event(m.context(i, j), Event::A(i, req_of(a)) & Event::B(j, req_of(b)));
  };
  return eberhard_from({term(1, 1, 1, 1), term(1, 1, 2, -1), term(1, 1, 2, 0),
                        term(2, -1, 1, 1), term(2, 0, 1, 1), term(2, 1, 2, 1)});
}

double eberhard_counts(const CountTable& counts) {
  return -counts.count(1, 1, Cat::o, Cat::o) + counts.count(1, 2, Cat::o, Cat::e) +
         counts.count(1, 2, Cat::o, Cat::u) + counts.count(2, 1, Cat::e, Cat::o) +
         counts.count(2, 1, Cat::u, Cat::o) + counts.count(2, 2, Cat::o, Cat::o);
}

BetaReport eberhard_qm(const PredictionSet& pred, double eta, double nPairs) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eberhard_qm: eta must lie in [0,1]");
  const double e2 = eta * eta;
  const double eu = eta * (1.0 - eta);
  double v = -e2 * pred.q_joint(1, 1, 1, 1) + e2 * pred.q_joint(1, 2, 1, -1) +
             eu * pred.q_a(1, 1) + e2 * pred.q_joint(2, 1, -1, 1) + eu * pred.q_b(1, 1) +
             e2 * pred.q_joint(2, 2, 1, 1);
  BetaReport r;
  r.kind = BetaKind::eberhard_eta;
  r.value = nPairs / 4.0 * v;
  r.lower = 0.0;
  r.upper = kInf;
  r.violated = r.value < 0.0;
  r.assumptions = {"independent-errors", "space-like-separation"};
  return r;
}

EnhancementCurvePoint enhancement_curve_point(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("enhancement_curve_point: eta must lie in (0,1]");
  EnhancementCurvePoint out;
  out.eta = eta;
  Ensemble mPrime = extend_to_M_prime_raw(build_M_raw(eta));
  Ensemble mDouble = build_M_double_prime_raw(eta);
  ChTerms tp = ch_terms(mPrime);
  ChTerms td = ch_terms(mDouble);
  out.betaGenPrime = ch_genuine(tp, ChshConvention::paper).value;
  out.betaGenDoublePrime = ch_genuine(td, ChshConvention::paper).value;
  out.betaNgPrime = ch_nongenuine(tp, eta).value;
  out.betaNgDoublePrime = ch_nongenuine(td, eta).value;
  return out;
}

}  // namespace bellkit
