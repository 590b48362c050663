#pragma once

#include <Eigen/Dense>

namespace bellkit {

struct NnlsResult {
  Eigen::VectorXd x;
  double residualNorm = 0.0;  // ||A x - b||_2
  int iterations = 0;
  bool converged = false;     // false when the iteration cap was hit
};

/// Lawson-Hanson active-set nonnegative least squares:
/// minimize ||A x - b||^2 subject to x >= 0.
/// Deterministic: candidate columns are examined in index order and ties in
/// the dual pick the lowest index. `maxIterations <= 0` means 10 * cols.
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int maxIterations = 0);

}  // namespace bellkit
