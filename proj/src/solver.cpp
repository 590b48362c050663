#include "bellkit/solver.hpp"

#include <cmath>
#include <future>
#include <limits>

namespace bellkit {

namespace {

OutcomeReq req_of_sign(int a) { return a == 1 ? OutcomeReq::plus : OutcomeReq::minus; }

struct RowSpec {
  Event event;
  double target;
  std::string label;
};

std::vector<RowSpec> row_specs(const PredictionSet& pred, double eta, ConditionKind kind) {
  std::vector<RowSpec> rows;
  rows.push_back({Event{}, 1.0, "norm"});
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int a : {1, -1})
        for (int b : {1, -1})
          rows.push_back({Event::A(i, req_of_sign(a)) & Event::B(j, req_of_sign(b)),
                          eta * eta * pred.q_joint(i, j, a, b),
                          "joint(" + std::to_string(i) + "," + std::to_string(j) + ";" +
                              std::to_string(a) + "," + std::to_string(b) + ")"});
  if (kind == ConditionKind::GEN || kind == ConditionKind::BOTH) {
    for (int i = 1; i <= 2; ++i)
      for (int a : {1, -1})
        rows.push_back({Event::A(i, req_of_sign(a)), eta * pred.q_a(i, a),
                        "margA(" + std::to_string(i) + ";" + std::to_string(a) + ")"});
    for (int j = 1; j <= 2; ++j)
      for (int b : {1, -1})
        rows.push_back({Event::B(j, req_of_sign(b)), eta * pred.q_b(j, b),
                        "margB(" + std::to_string(j) + ";" + std::to_string(b) + ")"});
  }
  if (kind == ConditionKind::NG || kind == ConditionKind::BOTH) {
    for (int i = 1; i <= 2; ++i)
      for (int a : {1, -1})
        rows.push_back({Event::A(i, req_of_sign(a)) & Event::B_noPol(true),
                        eta * eta * pred.q_a(i, a),
                        "ngA(" + std::to_string(i) + ";" + std::to_string(a) + ")"});
    for (int j = 1; j <= 2; ++j)
      for (int b : {1, -1})
        rows.push_back({Event::A_noPol(true) & Event::B(j, req_of_sign(b)),
                        eta * eta * pred.q_b(j, b),
                        "ngB(" + std::to_string(j) + ";" + std::to_string(b) + ")"});
    rows.push_back({Event::A_noPol(true), eta, "noPolA"});
    rows.push_back({Event::B_noPol(true), eta, "noPolB"});
  }
  return rows;
}

}  // namespace

std::string to_string(ConditionKind k) {
  switch (k) {
    case ConditionKind::GEN: return "gen";
    case ConditionKind::NG: return "ng";
    case ConditionKind::BOTH: return "both";
  }
  return "?";
}

std::string to_string(StateSpace s) { return s == StateSpace::reduced81 ? "reduced81" : "full324"; }

ConstraintSystem assemble(const PredictionSet& pred, double eta, ConditionKind kind,
                          StateSpace space) {
  return assemble(pred, eta, kind, enumerate_states(space));
}

ConstraintSystem assemble(const PredictionSet& pred, double eta, ConditionKind kind,
                          std::vector<LhvState> states) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("assemble: eta must lie in [0,1]");
  pred.validate();
  auto rows = row_specs(pred, eta, kind);

  ConstraintSystem sys;
  sys.kind = kind;
  sys.eta = eta;
  sys.columnStates = std::move(states);
  sys.matrix.resize(long(rows.size()), long(sys.columnStates.size()));
  sys.target.resize(long(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    sys.rowEvents.push_back(rows[r].event);
    sys.rowLabels.push_back(rows[r].label);
    sys.target(long(r)) = rows[r].target;
    for (std::size_t c = 0; c < sys.columnStates.size(); ++c)
      sys.matrix(long(r), long(c)) = state_probability(sys.columnStates[c], rows[r].event);
  }
  return sys;
}

SolveReport nnls_solve(const ConstraintSystem& system, double feasibilityTol) {
  NnlsResult nn = nnls(system.matrix, system.target);
  SolveReport rep;
  rep.weights = nn.x;
  rep.residualNorm = nn.residualNorm;
  rep.iterations = nn.iterations;
  rep.eta = system.eta;
  double ax = (system.matrix * nn.x).norm();
  rep.mu = ax > 0.0 ? nn.residualNorm / ax : std::numeric_limits<double>::infinity();
  rep.feasible = rep.mu < feasibilityTol;
  if (!nn.converged) throw SolverIterationCap(rep);
  return rep;
}

Ensemble report_to_ensemble(const ConstraintSystem& system, const SolveReport& report) {
  Ensemble m;
  double total = 0.0;
  for (long c = 0; c < report.weights.size(); ++c) total += report.weights(c);
  if (total <= 0.0) throw std::domain_error("report_to_ensemble: zero total weight");
  for (long c = 0; c < report.weights.size(); ++c) {
    double w = report.weights(c);
    if (w > 0.0) m.entries.push_back({system.columnStates[std::size_t(c)], w / total});
  }
  return m.canonicalized();
}

std::vector<double> row_residuals(const ConstraintSystem& system, const Ensemble& model) {
  std::vector<double> out;
  out.reserve(system.rowEvents.size());
  for (std::size_t r = 0; r < system.rowEvents.size(); ++r)
    out.push_back(std::abs(eval_event(model, system.rowEvents[r]) - system.target(long(r))));
  return out;
}

double model_mu(const ConstraintSystem& system, const Ensemble& model) {
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < system.rowEvents.size(); ++r) {
    double p = eval_event(model, system.rowEvents[r]);
    num += (p - system.target(long(r))) * (p - system.target(long(r)));
    den += p * p;
  }
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(num) / std::sqrt(den);
}

EtaCritResult find_eta_crit(const PredictionSet& pred, ConditionKind kind, StateSpace space,
                            double tol, double step) {
  if (!(tol > 0.0) || !(step > 0.0)) throw std::invalid_argument("find_eta_crit: tol and step must be positive");
  auto states = enumerate_states(space);

  EtaCritResult res;
  res.etaCrit = -1.0;
  bool haveModel = false;
  // Grid values computed as counts of whole steps below 1 where possible, so
  // decimal steps give decimal grid points.
  long long stepsPerUnit = std::llround(1.0 / step);
  bool decimalGrid = std::abs(stepsPerUnit * step - 1.0) < 1e-9 && stepsPerUnit > 0;
  for (int k = 0;; ++k) {
    double eta = decimalGrid ? double(stepsPerUnit - k) / double(stepsPerUnit) : 1.0 - k * step;
    if (eta < step / 2.0) break;
    ConstraintSystem sys = assemble(pred, eta, kind, states);
    double mu;
    SolveReport rep;
    try {
      rep = nnls_solve(sys, tol);
      mu = rep.mu;
    } catch (const SolverIterationCap& cap) {
      rep = cap.partial;
      mu = std::numeric_limits<double>::infinity();
    }
    res.trace.emplace_back(eta, mu);
    if (mu < tol && !haveModel) {
      res.etaCrit = eta;
      res.model = report_to_ensemble(sys, rep);
      haveModel = true;
    }
  }
  if (!haveModel) {
    res.etaCrit = 0.0;
    double fallbackEta = step * std::floor(0.5 / step + 1e-9);
    ClosedFormModel fb = build_closed_form_model(pred, fallbackEta);
    if (!fb.feasible) throw std::domain_error("find_eta_crit: closed-form fallback infeasible");
    res.model = fb.model;
  }
  return res;
}

std::vector<SweepPoint> sweep_eta_crit(const QuantumState& state, const std::vector<double>& thetas,
                                       ConditionKind kind, StateSpace space, double tol,
                                       double step) {
  std::vector<std::future<SweepPoint>> futures;
  futures.reserve(thetas.size());
  for (double theta : thetas)
    futures.push_back(std::async(std::launch::async, [=]() {
      auto s = scan_settings(theta);
      PredictionSet pred = prediction_set(state, s[0], s[1], s[2], s[3]);
      EtaCritResult r = find_eta_crit(pred, kind, space, tol, step);
      return SweepPoint{theta, r.etaCrit, std::move(r.trace)};
    }));
  std::vector<SweepPoint> out;
  out.reserve(futures.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

}  // namespace bellkit
