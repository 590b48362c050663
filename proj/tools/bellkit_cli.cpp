// bellkit command line: quantum predictions, LHV model construction and
// evaluation, inequality reports, critical-rate estimation and count-table
// analysis. All outputs are machine-readable CSV/JSON; identical flags (and
// seed) produce byte-identical files. Exit codes: 0 success, 1 computation
// infeasibility, 2 usage or config errors.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bellkit/analysis.hpp"
#include "bellkit/inequalities.hpp"
#include "bellkit/io.hpp"
#include "bellkit/lhv.hpp"
#include "bellkit/quantum.hpp"
#include "bellkit/solver.hpp"

using namespace bellkit;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Shortest decimal form that parses back to the same double.
std::string fmt(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct ScenarioFlags {
  std::string configPath;
  std::string state = "psi1";
  double theta = 0.7;
  double r = 3.0;
  double xi = 0.1;
  std::string permute = "none";
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f) {
  cmd->add_option("--config", f.configPath, "scenario config JSON file");
  cmd->add_option("--state", f.state, "psi1 | psi2 | giustina | larsson")
      ->check(CLI::IsMember({"psi1", "psi2", "giustina", "larsson"}));
  cmd->add_option("--theta", f.theta, "scan angle theta (radians)");
  cmd->add_option("--r", f.r, "giustina state parameter r");
  cmd->add_option("--xi", f.xi, "larsson state parameter xi");
  cmd->add_option("--permute", f.permute, "labels | directions | both | none")
      ->check(CLI::IsMember({"none", "labels", "directions", "both"}));
}

Scenario scenario_from_flags(const ScenarioFlags& f) {
  if (!f.configPath.empty()) return scenario_from_json(read_text_file(f.configPath));
  Permutation perm = permutation_from_string(f.permute);
  if (f.state == "giustina") return giustina_scenario(f.r, perm);
  Scenario sc;
  sc.state.kind = f.state;
  sc.state.param = f.state == "larsson" ? f.xi : 0.0;
  auto s = scan_settings(f.theta);
  sc.a1 = s[0].angle;
  sc.a2 = s[1].angle;
  sc.b1 = s[2].angle;
  sc.b2 = s[3].angle;
  sc.convention = AngleConvention::bloch;
  sc.permutations = perm;
  return sc;
}

ConditionKind kind_from_string(const std::string& s) {
  if (s == "gen") return ConditionKind::GEN;
  if (s == "ng") return ConditionKind::NG;
  return ConditionKind::BOTH;
}

StateSpace space_from_string(const std::string& s) {
  return s == "full" ? StateSpace::full324 : StateSpace::reduced81;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::filesystem::path p = std::filesystem::path(dir) / name;
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

void write_provenance(const std::string& dir, const std::string& name, const json& params,
                      const std::vector<std::string>& outputs) {
  json j{{"tool", "bellkit"}, {"version", kVersion}, {"parameters", params}, {"outputs", outputs}};
  auto os = open_out(dir, name);
  os << j.dump(2) << '\n';
}

Ensemble built_in_model(const std::string& name, double beta) {
  if (name == "m") return build_M(beta);
  if (name == "mprime") return extend_to_M_prime(build_M(beta));
  if (name == "mdprime") return build_M_double_prime(beta);
  throw std::invalid_argument("unknown model: " + name);
}

// Family member at detection rate eta (valid for eta in [2/3, 1]).
Ensemble built_in_model_at_eta(const std::string& name, double eta) {
  ModelWeights w = chsh_model_weights(eta);
  if (w.p < 0.0 || w.q < 0.0)
    throw std::invalid_argument("model family undefined below eta = 2/3");
  Ensemble m = build_M_raw(eta);
  if (name == "m") return m;
  if (name == "mprime") return extend_to_M_prime(m);
  if (name == "mdprime") {
    Ensemble d = build_M_double_prime_raw(eta);
    d.validate();
    return d;
  }
  throw std::invalid_argument("unknown model: " + name);
}

// --- reproduce targets ------------------------------------------------------

void reproduce_fig2(const std::string& out) {
  auto os = open_out(out, "fig2.csv");
  os << "eta,beta_gen_mprime,beta_gen_mdoubleprime,beta_ng_mprime,beta_ng_mdoubleprime\n";
  for (int k = 1; k <= 20; ++k) {
    double eta = 0.05 * k;
    auto f = enhancement_curve_point(eta);
    os << fmt(eta) << ',' << fmt(f.betaGenPrime) << ',' << fmt(f.betaGenDoublePrime) << ','
       << fmt(f.betaNgPrime) << ',' << fmt(f.betaNgDoublePrime) << '\n';
  }
  write_provenance(out, "fig2_provenance.json",
                   json{{"figure", "fig2"}, {"eta_grid", "0.05:1.00:0.05"}}, {"fig2.csv"});
}

void reproduce_fig3(const std::string& out, double tol, double step) {
  std::vector<double> thetas;
  for (int k = 2; k <= 22; ++k) thetas.push_back(k / 20.0);
  auto p1 = sweep_eta_crit(make_bell_state(BellKind::psi1), thetas, ConditionKind::BOTH,
                           StateSpace::reduced81, tol, step);
  auto p2 = sweep_eta_crit(make_bell_state(BellKind::psi2), thetas, ConditionKind::BOTH,
                           StateSpace::reduced81, tol, step);
  auto os = open_out(out, "fig3.csv");
  os << "theta,eta_crit_psi1,eta_crit_psi2\n";
  for (std::size_t k = 0; k < thetas.size(); ++k)
    os << fmt(thetas[k]) << ',' << fmt(p1[k].etaCrit) << ',' << fmt(p2[k].etaCrit) << '\n';
  write_provenance(out, "fig3_provenance.json",
                   json{{"figure", "fig3"},
                        {"theta_grid", "0.10:1.10:0.05"},
                        {"tol", tol},
                        {"step", step},
                        {"kind", "both"},
                        {"space", "reduced81"}},
                   {"fig3.csv"});
}

void reproduce_fig45(const std::string& out, ChshConvention conv) {
  std::string name = conv == ChshConvention::paper ? "fig4" : "fig5";
  auto os = open_out(out, name + ".csv");
  os << "theta,chsh_psi1,ch_psi1,chsh_psi2,ch_psi2\n";
  QuantumState s1 = make_bell_state(BellKind::psi1);
  QuantumState s2 = make_bell_state(BellKind::psi2);
  for (int k = 0; k <= 157; ++k) {
    double theta = 0.01 * k;
    auto st = scan_settings(theta);
    PredictionSet q1 = prediction_set(s1, st[0], st[1], st[2], st[3]);
    PredictionSet q2 = prediction_set(s2, st[0], st[1], st[2], st[3]);
    os << fmt(theta) << ',' << fmt(chsh(correlations(q1), conv).value) << ','
       << fmt(ch_genuine(ch_terms(q1), conv).value) << ','
       << fmt(chsh(correlations(q2), conv).value) << ','
       << fmt(ch_genuine(ch_terms(q2), conv).value) << '\n';
  }
  write_provenance(out, name + "_provenance.json",
                   json{{"figure", name},
                        {"theta_grid", "0.00:1.57:0.01"},
                        {"convention", to_string(conv)},
                        {"eta", 1.0}},
                   {name + ".csv"});
}

void reproduce_table(const std::string& out, BellKind kind, double tol, double step) {
  std::string name = kind == BellKind::psi1 ? "tableI" : "tableII";
  std::vector<double> thetas;
  for (int k = 1; k <= 11; ++k) thetas.push_back(k / 10.0);
  QuantumState st = make_bell_state(kind);

  auto states = enumerate_states(StateSpace::reduced81);
  // Group the 81 states into 41 sign-pattern rows: a row holds a state and
  // its mirror with every nonzero instruction flipped.
  std::vector<std::pair<LhvState, LhvState>> rows;
  std::vector<bool> used(states.size(), false);
  for (std::size_t a = 0; a < states.size(); ++a) {
    if (used[a]) continue;
    LhvState mirror = states[a];
    for (int& v : mirror.instr) v = -v;
    std::size_t match = a;
    for (std::size_t b = a + 1; b < states.size(); ++b)
      if (!used[b] && states[b] == mirror) {
        match = b;
        break;
      }
    used[a] = used[match] = true;
    rows.emplace_back(states[a], states[match]);
  }

  std::vector<double> etas, mus;
  std::vector<std::vector<double>> weights(rows.size());
  for (double theta : thetas) {
    auto s = scan_settings(theta);
    PredictionSet pred = prediction_set(st, s[0], s[1], s[2], s[3]);
    EtaCritResult r = find_eta_crit(pred, ConditionKind::BOTH, StateSpace::reduced81, tol, step);
    etas.push_back(r.etaCrit);
    auto sys = assemble(pred, r.etaCrit, ConditionKind::BOTH, states);
    mus.push_back(model_mu(sys, r.model));
    auto weight_of = [&](const LhvState& q) {
      for (const auto& e : r.model.entries)
        if (e.state == q) return e.weight;
      return 0.0;
    };
    for (std::size_t k = 0; k < rows.size(); ++k) {
      bool allZero = rows[k].first.instr == std::array<int, 4>{0, 0, 0, 0};
      double w = allZero ? weight_of(rows[k].first)
                         : 0.5 * (weight_of(rows[k].first) + weight_of(rows[k].second));
      weights[k].push_back(w);
    }
  }

  auto os = open_out(out, name + ".csv");
  os << "a1,a2,b1,b2,pA,pB";
  for (std::size_t c = 0; c < thetas.size(); ++c)
    os << ",w_theta" << fmt(thetas[c]) << "_eta" << fmt(etas[c]);
  os << '\n';
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const LhvState& s = rows[k].first;
    auto code = [&](int v) { return v == 0 ? std::string("0") : (v > 0 ? std::string("+") : std::string("-")); };
    os << code(s.instr[0]) << ',' << code(s.instr[1]) << ',' << code(s.instr[2]) << ','
       << code(s.instr[3]) << ',' << fmt(s.pA) << ',' << fmt(s.pB);
    for (double w : weights[k]) os << ',' << fmt(w);
    os << '\n';
  }
  json params{{"figure", name}, {"tol", tol},   {"step", step},
              {"kind", "both"}, {"space", "reduced81"}, {"thetas", thetas},
              {"etas", etas},   {"mu", mus}};
  write_provenance(out, name + "_provenance.json", params, {name + ".csv"});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LHV models, Bell inequalities and critical detection rates"};
  app.require_subcommand(1);

  // ---- predict
  auto* cmdPredict = app.add_subcommand("predict", "quantum prediction set for a scenario");
  ScenarioFlags predictFlags;
  std::string predictOut;
  add_scenario_flags(cmdPredict, predictFlags);
  cmdPredict->add_option("--out", predictOut, "output directory (default: stdout)");

  // ---- eval
  auto* cmdEval = app.add_subcommand("eval", "evaluate an inequality; BetaReport JSON on stdout");
  ScenarioFlags evalFlags;
  std::string evalIneq = "chsh", evalConv = "paper", evalModel;
  double evalEta = 1.0, evalBeta = 2.0 * std::sqrt(2.0), evalPairs = 4.0;
  add_scenario_flags(cmdEval, evalFlags);
  cmdEval->add_option("--ineq", evalIneq, "chsh | ch_gen | ch_ng | ch_norm | eberhard | eberhard_qm")
      ->check(CLI::IsMember({"chsh", "ch_gen", "ch_ng", "ch_norm", "eberhard", "eberhard_qm"}));
  cmdEval->add_option("--convention", evalConv, "paper | aspect")
      ->check(CLI::IsMember({"paper", "aspect"}));
  cmdEval->add_option("--model", evalModel, "built-in LHV model: m | mprime | mdprime | m3 | closedform");
  cmdEval->add_option("--beta", evalBeta, "CHSH value for built-in models");
  auto* evalEtaOpt = cmdEval->add_option("--eta", evalEta, "detection rate");
  cmdEval->add_option("--pairs", evalPairs, "emitted pairs N for eberhard_qm");

  // ---- build-model
  auto* cmdBuild = app.add_subcommand("build-model", "construct an LHV ensemble; CSV output");
  ScenarioFlags buildFlags;
  std::string buildModel = "mprime", buildOut;
  double buildBeta = 2.0 * std::sqrt(2.0), buildEta = 0.5;
  add_scenario_flags(cmdBuild, buildFlags);
  cmdBuild->add_option("--model", buildModel, "m | mprime | mdprime | closedform")
      ->check(CLI::IsMember({"m", "mprime", "mdprime", "closedform"}));
  cmdBuild->add_option("--beta", buildBeta, "CHSH value for m / mprime / mdprime");
  cmdBuild->add_option("--eta", buildEta, "detection rate for closedform");
  cmdBuild->add_option("--out", buildOut, "output directory (default: stdout)");

  // ---- eta-crit
  auto* cmdEtaCrit = app.add_subcommand("eta-crit", "critical detection rate for one scenario");
  ScenarioFlags etaFlags;
  std::string etaKind = "both", etaSpace = "reduced", etaOut = ".";
  double etaTol = 5e-5, etaStep = 0.01;
  add_scenario_flags(cmdEtaCrit, etaFlags);
  cmdEtaCrit->add_option("--kind", etaKind, "gen | ng | both")->check(CLI::IsMember({"gen", "ng", "both"}));
  cmdEtaCrit->add_option("--space", etaSpace, "reduced | full")->check(CLI::IsMember({"reduced", "full"}));
  cmdEtaCrit->add_option("--tol", etaTol, "feasibility tolerance on mu");
  cmdEtaCrit->add_option("--step", etaStep, "eta descent step");
  cmdEtaCrit->add_option("--out", etaOut, "output directory");

  // ---- sweep
  auto* cmdSweep = app.add_subcommand("sweep", "eta-crit across a theta grid");
  std::string sweepState = "psi1", sweepKind = "both", sweepSpace = "reduced", sweepOut = ".";
  std::string sweepConfig;
  double sweepFrom = 0.1, sweepTo = 1.1, sweepBy = 0.1, sweepTol = 5e-5, sweepStep = 0.01;
  cmdSweep->add_option("--config", sweepConfig,
                       "JSON config {state, thetaGrid: [from,to,by], kind, space, tol, step}");
  cmdSweep->add_option("--state", sweepState, "psi1 | psi2")->check(CLI::IsMember({"psi1", "psi2"}));
  cmdSweep->add_option("--theta-from", sweepFrom);
  cmdSweep->add_option("--theta-to", sweepTo);
  cmdSweep->add_option("--theta-by", sweepBy);
  cmdSweep->add_option("--kind", sweepKind)->check(CLI::IsMember({"gen", "ng", "both"}));
  cmdSweep->add_option("--space", sweepSpace)->check(CLI::IsMember({"reduced", "full"}));
  cmdSweep->add_option("--tol", sweepTol);
  cmdSweep->add_option("--step", sweepStep);
  cmdSweep->add_option("--out", sweepOut, "output directory");

  // ---- analyze
  auto* cmdAnalyze = app.add_subcommand("analyze", "experiment-record diagnostics");
  ScenarioFlags analyzeFlags;
  std::string analyzeCounts;
  std::pair<double, double> etaWindow{0.68, 0.73};
  double analyzeBackground = 0.0;
  analyzeFlags.state = "giustina";
  add_scenario_flags(cmdAnalyze, analyzeFlags);
  cmdAnalyze->add_option("--counts", analyzeCounts, "ExperimentRecord CSV file")->required();
  auto* etaWindowOpt = cmdAnalyze->add_option("--eta-window", etaWindow,
                                              "lo hi (default: spanned by the rate estimates)");
  cmdAnalyze->add_option("--background", analyzeBackground,
                         "lower the derived window's bottom edge by this much");

  // ---- synth-counts
  auto* cmdSynth = app.add_subcommand("synth-counts", "synthesize count tables from a model");
  ScenarioFlags synthFlags;
  std::string synthModel = "mprime", synthFormat = "counts", synthOut;
  double synthBeta = 2.0 * std::sqrt(2.0), synthEta = -1.0, synthTrials = 100000;
  std::uint64_t synthSeed = 0;
  bool synthSampled = false;
  add_scenario_flags(cmdSynth, synthFlags);
  cmdSynth->add_option("--model", synthModel, "m | mprime | mdprime")
      ->check(CLI::IsMember({"m", "mprime", "mdprime"}));
  cmdSynth->add_option("--beta", synthBeta);
  cmdSynth->add_option("--eta", synthEta, "thin the model to this detection rate");
  cmdSynth->add_option("--trials", synthTrials, "trials per context");
  cmdSynth->add_flag("--sampled", synthSampled, "multinomial sampling instead of exact expectations");
  cmdSynth->add_option("--seed", synthSeed, "RNG seed for --sampled");
  cmdSynth->add_option("--format", synthFormat, "counts | experiment")
      ->check(CLI::IsMember({"counts", "experiment"}));
  cmdSynth->add_option("--out", synthOut, "output directory (default: stdout)");

  // ---- reproduce
  auto* cmdRepro = app.add_subcommand("reproduce", "write figure/table data with default parameters");
  std::string figure, reproOut = ".";
  double reproTol = 5e-5, reproStep = 0.01;
  cmdRepro->add_option("figure", figure, "fig2 | fig3 | fig4 | fig5 | tableI | tableII")->required();
  cmdRepro->add_option("--out", reproOut, "output directory");
  cmdRepro->add_option("--tol", reproTol);
  cmdRepro->add_option("--step", reproStep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cmdPredict) {
      PredictionSet pred = scenario_predictions(scenario_from_flags(predictFlags));
      if (predictOut.empty()) {
        write_prediction_csv(std::cout, pred);
      } else {
        auto os = open_out(predictOut, "predictions.csv");
        write_prediction_csv(os, pred);
      }
    } else if (*cmdEval) {
      ChshConvention conv =
          evalConv == "paper" ? ChshConvention::paper : ChshConvention::aspect;
      BetaReport report;
      if (!evalModel.empty()) {
        if (evalModel == "m3") {
          if (evalIneq != "eberhard") throw std::invalid_argument("m3 supports --ineq eberhard");
          report = eberhard(build_crosstalk_M3());
        } else if (evalModel == "closedform") {
          PredictionSet pred = scenario_predictions(scenario_from_flags(evalFlags));
          ClosedFormModel m = build_closed_form_model(pred, evalEta);
          if (!m.feasible) throw std::domain_error("closed-form model infeasible at this eta");
          if (evalIneq == "eberhard")
            report = eberhard(m.model);
          else if (evalIneq == "ch_ng")
            report = ch_nongenuine(m.model, evalEta);
          else if (evalIneq == "ch_gen")
            report = ch_genuine(ch_terms(m.model), conv);
          else if (evalIneq == "chsh")
            report = chsh(correlations(m.model), conv);
          else
            throw std::invalid_argument("unsupported inequality for closedform");
        } else {
          bool haveEta = evalEtaOpt->count() > 0;
          if (evalIneq == "eberhard") {
            // eta thins the beta-model; the CH family below is instead
            // re-built at the requested rate.
            Ensemble m = built_in_model(evalModel, evalBeta);
            report = haveEta ? eberhard(m, evalEta) : eberhard(m);
          } else {
            Ensemble m = haveEta ? built_in_model_at_eta(evalModel, evalEta)
                                 : built_in_model(evalModel, evalBeta);
            double eta = eval_event(m, Event::A(1, OutcomeReq::detected));
            if (evalIneq == "ch_ng")
              report = ch_nongenuine(m, eta);
            else if (evalIneq == "ch_gen")
              report = ch_genuine(ch_terms(m), conv);
            else if (evalIneq == "ch_norm")
              report = ch_normalized(ch_terms(m), eta);
            else if (evalIneq == "chsh")
              report = chsh(correlations(m), conv);
            else
              throw std::invalid_argument("unsupported inequality for built-in models");
          }
        }
      } else {
        PredictionSet pred = scenario_predictions(scenario_from_flags(evalFlags));
        if (evalIneq == "chsh")
          report = chsh(correlations(pred), conv);
        else if (evalIneq == "ch_gen")
          report = ch_genuine(ch_terms(pred), conv);
        else if (evalIneq == "eberhard_qm")
          report = eberhard_qm(pred, evalEta, evalPairs);
        else
          throw std::invalid_argument("unsupported inequality for quantum scenarios");
      }
      std::cout << beta_report_json(report) << '\n';
    } else if (*cmdBuild) {
      Ensemble m;
      if (buildModel == "closedform") {
        PredictionSet pred = scenario_predictions(scenario_from_flags(buildFlags));
        ClosedFormModel r = build_closed_form_model(pred, buildEta);
        if (!r.feasible) throw std::domain_error("closed-form model infeasible at this eta");
        m = r.model;
      } else {
        m = built_in_model(buildModel, buildBeta);
      }
      if (buildOut.empty()) {
        write_ensemble_csv(std::cout, m);
      } else {
        auto os = open_out(buildOut, "model.csv");
        write_ensemble_csv(os, m);
      }
    } else if (*cmdEtaCrit) {
      PredictionSet pred = scenario_predictions(scenario_from_flags(etaFlags));
      EtaCritResult r = find_eta_crit(pred, kind_from_string(etaKind), space_from_string(etaSpace),
                                      etaTol, etaStep);
      auto trace = open_out(etaOut, "trace.csv");
      trace << "eta,mu\n";
      for (auto& [eta, mu] : r.trace) trace << fmt(eta) << ',' << fmt(mu) << '\n';
      auto model = open_out(etaOut, "model.csv");
      write_ensemble_csv(model, r.model);
      json j{{"eta_crit", r.etaCrit}, {"kind", etaKind}, {"space", etaSpace},
             {"tol", etaTol},         {"step", etaStep}, {"outputs", {"trace.csv", "model.csv"}}};
      std::cout << j.dump(2) << '\n';
    } else if (*cmdSweep) {
      if (!sweepConfig.empty()) {
        json cfg = json::parse(read_text_file(sweepConfig));
        if (cfg.contains("state")) sweepState = cfg.at("state").get<std::string>();
        if (cfg.contains("kind")) sweepKind = cfg.at("kind").get<std::string>();
        if (cfg.contains("space")) sweepSpace = cfg.at("space").get<std::string>();
        if (cfg.contains("tol")) sweepTol = cfg.at("tol").get<double>();
        if (cfg.contains("step")) sweepStep = cfg.at("step").get<double>();
        if (cfg.contains("thetaGrid")) {
          auto g = cfg.at("thetaGrid");
          sweepFrom = g.at(0).get<double>();
          sweepTo = g.at(1).get<double>();
          sweepBy = g.at(2).get<double>();
        }
      }
      std::vector<double> thetas;
      for (int k = 0; sweepFrom + k * sweepBy <= sweepTo + 1e-12; ++k)
        thetas.push_back(sweepFrom + k * sweepBy);
      QuantumState st = make_bell_state(sweepState == "psi1" ? BellKind::psi1 : BellKind::psi2);
      auto pts = sweep_eta_crit(st, thetas, kind_from_string(sweepKind),
                                space_from_string(sweepSpace), sweepTol, sweepStep);
      auto os = open_out(sweepOut, "sweep.csv");
      os << "theta,eta,mu,feasible,etaCrit\n";
      for (const auto& p : pts)
        for (auto& [eta, mu] : p.trace)
          os << fmt(p.theta) << ',' << fmt(eta) << ',' << fmt(mu) << ','
             << (mu < sweepTol ? 1 : 0) << ',' << fmt(p.etaCrit) << '\n';
      write_provenance(sweepOut, "sweep_provenance.json",
                       json{{"state", sweepState},
                            {"kind", sweepKind},
                            {"space", sweepSpace},
                            {"tol", sweepTol},
                            {"step", sweepStep}},
                       {"sweep.csv"});
    } else if (*cmdAnalyze) {
      std::ifstream is(analyzeCounts);
      if (!is) throw std::invalid_argument("cannot open " + analyzeCounts);
      ExperimentRecord rec = read_experiment_csv(is);
      rec.validate();
      PredictionSet pred = scenario_predictions(scenario_from_flags(analyzeFlags));
      bool haveEtas = false;
      std::pair<double, double> etas{0.0, 0.0};
      try {
        etas = estimate_etas(rec, pred);
        haveEtas = true;
      } catch (const std::domain_error&) {
      }
      if (etaWindowOpt->count() == 0) {
        if (!haveEtas)
          throw std::domain_error("cannot derive an eta window: rate estimates unavailable");
        etaWindow = eta_window_from_estimates(etas, analyzeBackground);
      }
      GammaReport rep = gamma_bounds(rec, pred, etaWindow);
      auto flags = consistency_flags(rep);
      json j = json::parse(gamma_report_json(rep, flags));
      if (haveEtas) {
        j["eta_A"] = etas.first;
        j["eta_B"] = etas.second;
      } else {
        j["eta_A"] = nullptr;
        j["eta_B"] = nullptr;
      }
      std::cout << j.dump(2) << '\n';
    } else if (*cmdSynth) {
      if (synthFormat == "experiment") {
        // Single-channel record from a quantum scenario under independent errors.
        PredictionSet pred = scenario_predictions(scenario_from_flags(synthFlags));
        double eta = synthEta >= 0.0 ? synthEta : 1.0;
        ExperimentRecord rec = synth_experiment(pred, eta, eta, synthTrials);
        if (synthOut.empty()) {
          write_experiment_csv(std::cout, rec);
        } else {
          auto os = open_out(synthOut, "experiment.csv");
          write_experiment_csv(os, rec);
        }
      } else {
        Ensemble m = built_in_model(synthModel, synthBeta);
        if (synthEta >= 0.0) {
          double rate = eval_event(m, Event::A(1, OutcomeReq::detected));
          m = thin_ensemble(m, rate > 0.0 ? std::min(1.0, synthEta / rate) : 1.0);
        }
        CountTable c = synthSampled ? synth_counts_sampled(m, std::int64_t(synthTrials), synthSeed)
                                    : synth_counts(m, synthTrials);
        if (synthOut.empty()) {
          write_count_table_csv(std::cout, c);
        } else {
          auto os = open_out(synthOut, "counts.csv");
          write_count_table_csv(os, c);
        }
      }
    } else if (*cmdRepro) {
      auto t0 = std::chrono::steady_clock::now();
      if (figure == "fig2")
        reproduce_fig2(reproOut);
      else if (figure == "fig3")
        reproduce_fig3(reproOut, reproTol, reproStep);
      else if (figure == "fig4")
        reproduce_fig45(reproOut, ChshConvention::paper);
      else if (figure == "fig5")
        reproduce_fig45(reproOut, ChshConvention::aspect);
      else if (figure == "tableI")
        reproduce_table(reproOut, BellKind::psi1, reproTol, reproStep);
      else if (figure == "tableII")
        reproduce_table(reproOut, BellKind::psi2, reproTol, reproStep);
      else {
        std::cerr << "unknown figure id: " << figure << '\n';
        return 2;
      }
      auto t1 = std::chrono::steady_clock::now();
      std::cerr << "reproduce " << figure << ": "
                << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
                << " ms\n";
    }
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const SolverIterationCap& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
