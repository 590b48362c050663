#include "bellkit/analysis.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace bellkit {

namespace {

Cat cat_of_instruction(int v) {
  if (v == 1) return Cat::o;
  if (v == -1) return Cat::e;
  return Cat::u;
}

}  // namespace

void ExperimentRecord::validate() const {
  for (int i = 0; i < 2; ++i) {
    if (singlesA[i] < 0.0 || singlesB[i] < 0.0) throw std::invalid_argument("ExperimentRecord: negative singles");
    for (int j = 0; j < 2; ++j) {
      if (coincOO[i][j] < 0.0) throw std::invalid_argument("ExperimentRecord: negative coincidences");
      if (coincOO[i][j] > singlesA[i] + 1e-9 || coincOO[i][j] > singlesB[j] + 1e-9)
        throw std::invalid_argument("ExperimentRecord: coincidences exceed singles");
    }
  }
  if (totalTrials < 0.0) throw std::invalid_argument("ExperimentRecord: negative trials");
}

std::pair<double, double> estimate_etas(const ExperimentRecord& rec, const PredictionSet& pred) {
  if (rec.singlesB[0] <= 0.0 || rec.singlesA[0] <= 0.0)
    throw std::domain_error("estimate_etas: zero singles");
  double qB1 = pred.q_b(1, 1);
  double qA1 = pred.q_a(1, 1);
  if (qB1 <= 0.0 || qA1 <= 0.0) throw std::domain_error("estimate_etas: zero marginal prediction");
  double condA = pred.q_joint(2, 1, 1, 1) / qB1;  // Q(A2=o | B1=o)
  double condB = pred.q_joint(1, 1, 1, 1) / qA1;  // Q(B1=o | A1=o)
  if (condA <= 0.0 || condB <= 0.0) throw std::domain_error("estimate_etas: zero conditional prediction");
  double etaA = rec.coincOO[1][0] / rec.singlesB[0] / condA;
  double etaB = rec.coincOO[0][0] / rec.singlesA[0] / condB;
  return {etaA, etaB};
}

std::pair<double, double> eta_window_from_estimates(std::pair<double, double> etas,
                                                    double backgroundSubtraction) {
  if (backgroundSubtraction < 0.0)
    throw std::invalid_argument("eta_window_from_estimates: subtraction must be nonnegative");
  double lo = std::min(etas.first, etas.second) - backgroundSubtraction;
  double hi = std::max(etas.first, etas.second);
  return {lo, hi};
}

GammaReport gamma_bounds(const ExperimentRecord& rec, const PredictionSet& pred,
                         std::pair<double, double> etaWindow, double reportBound) {
  GammaReport rep;
  rep.etaWindow = etaWindow;
  rep.jValue = rec.jValue;
  rep.gammaReportBound = reportBound;
  double lo = etaWindow.first, hi = etaWindow.second;
  if (!(lo <= hi)) throw std::invalid_argument("gamma_bounds: empty eta window");

  auto gammaA = [&](double eta) {
    if (rec.singlesA[0] <= 0.0) throw std::domain_error("gamma_bounds: zero singles");
    return eta * pred.q_a(1, 1) / (4.0 * rec.singlesA[0]) * rec.jValue;
  };
  auto gammaB = [&](double eta) {
    if (rec.singlesB[0] <= 0.0) throw std::domain_error("gamma_bounds: zero singles");
    return eta * pred.q_b(1, 1) / (4.0 * rec.singlesB[0]) * rec.jValue;
  };
  auto gammaIJ = [&](int i, int j, double eta) {
    if (rec.coincOO[i - 1][j - 1] <= 0.0) throw std::domain_error("gamma_bounds: zero coincidences");
    return eta * eta * pred.q_joint(i, j, 1, 1) / (4.0 * rec.coincOO[i - 1][j - 1]) * rec.jValue;
  };

  auto window = [](double a, double b) { return Interval{std::min(a, b), std::max(a, b)}; };
  double mid = 0.5 * (lo + hi);
  rep.gammaA = gammaA(mid);
  rep.gammaB = gammaB(mid);
  rep.windowA = window(gammaA(lo), gammaA(hi));
  rep.windowB = window(gammaB(lo), gammaB(hi));
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) {
      rep.gammaIJ[i - 1][j - 1] = gammaIJ(i, j, mid);
      rep.windowIJ[i - 1][j - 1] = window(gammaIJ(i, j, lo), gammaIJ(i, j, hi));
    }
  if (rec.totalTrials > 0.0) rep.gammaReport = std::abs(rec.jValue) / rec.totalTrials;
  return rep;
}

std::vector<std::pair<std::string, std::string>> consistency_flags(const GammaReport& report) {
  std::vector<std::pair<std::string, Interval>> named = {
      {"Gamma_A", report.windowA},
      {"Gamma_B", report.windowB},
  };
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      named.emplace_back("Gamma_" + std::to_string(i) + std::to_string(j),
                         report.windowIJ[i - 1][j - 1]);
  std::vector<std::pair<std::string, std::string>> flags;
  for (std::size_t a = 0; a < named.size(); ++a)
    for (std::size_t b = a + 1; b < named.size(); ++b)
      if (!named[a].second.overlaps(named[b].second))
        flags.emplace_back(named[a].first, named[b].first);
  return flags;
}

std::pair<double, double> christensen_ratios(double s2b, double cAB, double cAPrimeB) {
  if (cAB <= 0.0 || cAPrimeB <= 0.0) throw std::domain_error("christensen_ratios: zero denominator");
  return {s2b / cAB, s2b / cAPrimeB};
}

UnfairSamplingTable unfair_sampling_table(const CountTable& counts) {
  UnfairSamplingTable t;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int k = 0; k < 2; ++k) {
        Cat fixed = k == 0 ? Cat::o : Cat::e;
        double detA = counts.count(i, j, Cat::o, fixed) + counts.count(i, j, Cat::e, fixed);
        double allA = detA + counts.count(i, j, Cat::u, fixed);
        if (allA > 0.0) t.rateA[i - 1][j - 1][k] = detA / allA;
        double detB = counts.count(i, j, fixed, Cat::o) + counts.count(i, j, fixed, Cat::e);
        double allB = detB + counts.count(i, j, fixed, Cat::u);
        if (allB > 0.0) t.rateB[j - 1][i - 1][k] = detB / allB;
      }
  return t;
}

CountTable synth_counts(const Ensemble& m, double trials) {
  if (!(trials > 0.0)) throw std::invalid_argument("synth_counts: trials must be positive");
  CountTable c;
  c.trialsPerContext = trials;
  c.trialsNoPol = trials;
  for (const auto& e : m.entries) {
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j)
        c.count(i, j, cat_of_instruction(e.state.a(i)), cat_of_instruction(e.state.b(j))) +=
            e.weight * trials;
    for (int i = 1; i <= 2; ++i) {
      if (e.state.a(i) == 1) c.nA_inf[i - 1] += e.weight * e.state.pB * trials;
      if (e.state.b(i) == 1) c.nInf_B[i - 1] += e.weight * e.state.pA * trials;
    }
    c.nInfInf += e.weight * e.state.pA * e.state.pB * trials;
  }
  return c;
}

CountTable synth_counts_sampled(const Ensemble& m, std::int64_t trials, std::uint64_t seed) {
  if (trials <= 0) throw std::invalid_argument("synth_counts_sampled: trials must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  CountTable c;
  c.trialsPerContext = double(trials);
  c.trialsNoPol = double(trials);

  std::vector<double> cdf;
  cdf.reserve(m.entries.size());
  double acc = 0.0;
  for (const auto& e : m.entries) {
    acc += e.weight;
    cdf.push_back(acc);
  }
  auto draw_state = [&]() {
    double u = unif(rng) * acc;
    std::size_t lo = 0, hi = cdf.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cdf[mid] < u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  };

  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (std::int64_t t = 0; t < trials; ++t) {
        const LhvState& s = m.entries[draw_state()].state;
        c.count(i, j, cat_of_instruction(s.a(i)), cat_of_instruction(s.b(j))) += 1.0;
      }
  for (std::int64_t t = 0; t < trials; ++t) {
    const LhvState& s = m.entries[draw_state()].state;
    bool detB = unif(rng) < s.pB;
    bool detA = unif(rng) < s.pA;
    // One removed-polarizer run feeds all three count classes symmetrically.
    if (s.a(1) == 1 && detB) c.nA_inf[0] += 1.0;
    if (s.a(2) == 1 && detB) c.nA_inf[1] += 1.0;
    if (s.b(1) == 1 && detA) c.nInf_B[0] += 1.0;
    if (s.b(2) == 1 && detA) c.nInf_B[1] += 1.0;
    if (detA && detB) c.nInfInf += 1.0;
  }
  return c;
}

ExperimentRecord synth_experiment(const PredictionSet& pred, double etaA, double etaB,
                                  double pairsPerContext) {
  if (!(etaA >= 0.0 && etaA <= 1.0 && etaB >= 0.0 && etaB <= 1.0))
    throw std::invalid_argument("synth_experiment: rates must lie in [0,1]");
  if (!(pairsPerContext > 0.0)) throw std::invalid_argument("synth_experiment: need positive pair count");
  ExperimentRecord rec;
  const double T = pairsPerContext;
  for (int i = 1; i <= 2; ++i) {
    rec.singlesA[i - 1] = T * etaA * pred.q_a(i, 1);
    rec.singlesB[i - 1] = T * etaB * pred.q_b(i, 1);
    for (int j = 1; j <= 2; ++j) rec.coincOO[i - 1][j - 1] = T * etaA * etaB * pred.q_joint(i, j, 1, 1);
  }
  rec.totalTrials = 4.0 * T;
  rec.jValue = -rec.coincOO[0][0] + T * etaA * etaB * pred.q_joint(1, 2, 1, -1) +
               T * etaA * (1.0 - etaB) * pred.q_a(1, 1) +
               T * etaA * etaB * pred.q_joint(2, 1, -1, 1) +
               T * (1.0 - etaA) * etaB * pred.q_b(1, 1) + rec.coincOO[1][1];
  return rec;
}

}  // namespace bellkit
