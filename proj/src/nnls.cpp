#include "bellkit/nnls.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bellkit {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const std::vector<int>& passive) {
  Eigen::MatrixXd Ap(A.rows(), passive.size());
  for (std::size_t k = 0; k < passive.size(); ++k) Ap.col(k) = A.col(passive[k]);
  return Ap.colPivHouseholderQr().solve(b);
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int maxIterations) {
  const int n = int(A.cols());
  const int m = int(A.rows());
  if (m == 0 || n == 0) throw std::invalid_argument("nnls: empty system");
  if (b.size() != m) throw std::invalid_argument("nnls: dimension mismatch");
  if (!A.allFinite() || !b.allFinite()) throw std::invalid_argument("nnls: non-finite input");
  if (maxIterations <= 0) maxIterations = 10 * n;

  NnlsResult res;
  res.x = Eigen::VectorXd::Zero(n);

  std::vector<bool> inPassive(n, false);
  std::vector<int> passive;
  // Dual tolerance scaled to the problem.
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff());
  const double wTol = 1e-12 * scale;

  Eigen::VectorXd residual = b;
  std::vector<bool> blocked(n, false);

  while (true) {
    Eigen::VectorXd w = A.transpose() * residual;

    int best = -1;
    double bestW = wTol;
    for (int j = 0; j < n; ++j) {
      if (inPassive[j] || blocked[j]) continue;
      if (w(j) > bestW) {
        bestW = w(j);
        best = j;
      }
    }
    if (best < 0) break;

    passive.push_back(best);
    inPassive[best] = true;

    bool accepted = false;
    while (res.iterations < maxIterations) {
      Eigen::VectorXd z = solve_passive(A, b, passive);
      ++res.iterations;

      // Reject a freshly added column whose unconstrained coefficient is not
      // positive; it cannot improve the fit.
      if (!accepted) {
        if (z(z.size() - 1) <= 0.0) {
          inPassive[best] = false;
          passive.pop_back();
          blocked[best] = true;
          break;
        }
        accepted = true;
        for (int j = 0; j < n; ++j) blocked[j] = false;
      }

      double alpha = 1.0;
      int limiting = -1;
      for (std::size_t k = 0; k < passive.size(); ++k) {
        if (z(k) > 0.0) continue;
        double xk = res.x(passive[k]);
        double t = xk / (xk - z(k));
        if (t < alpha) {
          alpha = t;
          limiting = int(k);
        }
      }
      if (limiting < 0) {
        for (std::size_t k = 0; k < passive.size(); ++k) res.x(passive[k]) = z(k);
        break;
      }
      for (std::size_t k = 0; k < passive.size(); ++k) {
        double xk = res.x(passive[k]);
        res.x(passive[k]) = xk + alpha * (z(k) - xk);
      }
      // Drop every passive variable pinned at (or numerically below) zero.
      std::vector<int> keep;
      for (std::size_t k = 0; k < passive.size(); ++k) {
        int j = passive[k];
        if ((int(k) == limiting) || res.x(j) <= 1e-14 * scale) {
          res.x(j) = 0.0;
          inPassive[j] = false;
        } else {
          keep.push_back(j);
        }
      }
      passive = keep;
      if (passive.empty()) break;
    }

    if (res.iterations >= maxIterations) {
      residual = b - A * res.x;
      res.residualNorm = residual.norm();
      res.converged = false;
      return res;
    }
    residual = b - A * res.x;
  }

  res.residualNorm = residual.norm();
  res.converged = true;
  return res;
}

}  // namespace bellkit
