#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellkit/lhv.hpp"
#include "bellkit/nnls.hpp"
#include "bellkit/quantum.hpp"

namespace bellkit {

enum class ConditionKind { GEN, NG, BOTH };

std::string to_string(ConditionKind k);
std::string to_string(StateSpace s);

/// Linear feasibility system for an LHV model at fixed eta. Row 0 is the
/// normalization row (all coefficients 1, target 1); then the 16 joint rows
/// with targets eta^2 Q^AB; GEN contributes the 8 single-setting marginal
/// rows with targets eta Q; NG contributes the 8 linearized conditional rows
/// with targets eta^2 Q plus the two no-polarizer marginal rows with target
/// eta. Coefficients are per-state event probabilities.
struct ConstraintSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd target;
  std::vector<LhvState> columnStates;
  std::vector<Event> rowEvents;
  std::vector<std::string> rowLabels;
  ConditionKind kind = ConditionKind::BOTH;
  double eta = 0.0;
};

ConstraintSystem assemble(const PredictionSet& pred, double eta, ConditionKind kind,
                          StateSpace space);
ConstraintSystem assemble(const PredictionSet& pred, double eta, ConditionKind kind,
                          std::vector<LhvState> states);

struct SolveReport {
  Eigen::VectorXd weights;
  double residualNorm = 0.0;  // ||A x - b||
  double mu = 0.0;            // ||A x - b|| / ||A x||
  bool feasible = false;      // mu < tolerance used by the caller
  double eta = 0.0;
  int iterations = 0;
};

/// Thrown when the active-set iteration cap (10 x columns) is exceeded;
/// carries the partial report.
struct SolverIterationCap : std::runtime_error {
  SolveReport partial;
  explicit SolverIterationCap(SolveReport r)
      : std::runtime_error("nnls_solve: iteration cap exceeded"), partial(std::move(r)) {}
};

SolveReport nnls_solve(const ConstraintSystem& system, double feasibilityTol = 5e-5);

/// Weights of a solve arranged as an Ensemble over the system's column
/// states (zero-weight states dropped, weights renormalized to unit total).
Ensemble report_to_ensemble(const ConstraintSystem& system, const SolveReport& report);

/// |P_model(event) - target| for every row of the system, evaluated directly
/// on an ensemble (which need not live in the system's state space).
std::vector<double> row_residuals(const ConstraintSystem& system, const Ensemble& model);

/// Relative error ||A x - b|| / ||A x|| of an ensemble against a system,
/// using the ensemble's event probabilities as A x.
double model_mu(const ConstraintSystem& system, const Ensemble& model);

struct EtaCritResult {
  double etaCrit = 0.0;
  Ensemble model;
  std::vector<std::pair<double, double>> trace;  // (eta, mu), descending eta
};

/// Descend eta from 1 by `step`, solving at every grid point; the critical
/// rate is the largest grid eta with mu < tol. When nothing is feasible the
/// closed-form eta = 1/2 model is returned with etaCrit = 0.
EtaCritResult find_eta_crit(const PredictionSet& pred, ConditionKind kind, StateSpace space,
                            double tol = 5e-5, double step = 0.01);

struct SweepPoint {
  double theta = 0.0;
  double etaCrit = 0.0;
  std::vector<std::pair<double, double>> trace;
};

/// find_eta_crit over a theta grid with the scan observables, as a parallel map.
std::vector<SweepPoint> sweep_eta_crit(const QuantumState& state, const std::vector<double>& thetas,
                                       ConditionKind kind, StateSpace space, double tol = 5e-5,
                                       double step = 0.01);

}  // namespace bellkit
