#include "bellkit/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace bellkit {

namespace {

Matrix2c sigma_x() {
  Matrix2c m;
  m << 0, 1, 1, 0;
  return m;
}

Matrix2c sigma_z() {
  Matrix2c m;
  m << 1, 0, 0, -1;
  return m;
}

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

}  // namespace

void QuantumState::validate() const {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("QuantumState: not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-12 || std::abs(rho.trace().imag()) > 1e-12)
    throw std::invalid_argument("QuantumState: trace != 1");
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("QuantumState: negative eigenvalue");
}

QuantumState state_from_ket(const Vector4c& ket) {
  double n = ket.norm();
  if (n <= 0.0 || !std::isfinite(n)) throw std::invalid_argument("state_from_ket: null ket");
  Vector4c k = ket / n;
  QuantumState s;
  s.rho = k * k.adjoint();
  return s;
}

QuantumState make_bell_state(BellKind kind) {
  Vector4c ket = Vector4c::Zero();
  ket(1) = 1.0 / std::sqrt(2.0);                                   // |ud>
  ket(2) = (kind == BellKind::psi1 ? -1.0 : 1.0) / std::sqrt(2.0); // |du>
  return state_from_ket(ket);
}

QuantumState make_giustina_state(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("make_giustina_state: r must be finite and >= 0");
  Vector4c ket = Vector4c::Zero();
  ket(1) = 1.0;  // |HV>
  ket(2) = r;    // |VH>
  return state_from_ket(ket);
}

QuantumState make_larsson_state(double xi) {
  if (!(xi > 0.0 && xi < M_PI / 2.0))
    throw std::invalid_argument("make_larsson_state: xi must lie in (0, pi/2)");
  Vector4c ket = Vector4c::Zero();
  ket(0) = 1.0 - 2.0 * std::cos(xi);  // |00>
  ket(1) = std::sin(xi);              // |01>
  ket(2) = std::sin(xi);              // |10>
  return state_from_ket(ket);
}

QuantumState permute_directions(const QuantumState& s) {
  Matrix4c xx = kron(sigma_x(), sigma_x());
  QuantumState out;
  out.rho = xx * s.rho * xx;
  return out;
}

double Setting::bloch_angle() const {
  return convention == AngleConvention::polarizer ? 2.0 * angle : angle;
}

Matrix2c Setting::observable() const {
  double t = bloch_angle();
  return std::sin(t) * sigma_x() + std::cos(t) * sigma_z();
}

Matrix2c Setting::projector(int outcome) const {
  if (outcome != 1 && outcome != -1) throw std::invalid_argument("Setting::projector: outcome must be +1 or -1");
  return 0.5 * (Matrix2c::Identity() + double(outcome) * observable());
}

double PredictionSet::q_joint(int i, int j, int a, int b) const {
  return joint[i - 1][j - 1][a == 1 ? 0 : 1][b == 1 ? 0 : 1];
}

double PredictionSet::q_a(int i, int a) const { return margA[i - 1][a == 1 ? 0 : 1]; }

double PredictionSet::q_b(int j, int b) const { return margB[j - 1][b == 1 ? 0 : 1]; }

double PredictionSet::correlation(int i, int j) const {
  double c = 0.0;
  for (int a : {1, -1})
    for (int b : {1, -1}) c += a * b * q_joint(i, j, a, b);
  return c;
}

PredictionSet PredictionSet::permute_labels() const {
  PredictionSet out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out.joint[i][j][a][b] = joint[i][j][1 - a][1 - b];
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a) {
      out.margA[i][a] = margA[i][1 - a];
      out.margB[i][a] = margB[i][1 - a];
    }
  return out;
}

void PredictionSet::validate() const {
  for (int i = 1; i <= 2; ++i) {
    double sa = q_a(i, 1) + q_a(i, -1);
    double sb = q_b(i, 1) + q_b(i, -1);
    if (std::abs(sa - 1.0) > 1e-12 || std::abs(sb - 1.0) > 1e-12)
      throw std::invalid_argument("PredictionSet: marginal normalization failed");
  }
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) {
      double s = 0.0;
      for (int a : {1, -1})
        for (int b : {1, -1}) s += q_joint(i, j, a, b);
      if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("PredictionSet: joint normalization failed");
      for (int a : {1, -1}) {
        double m = q_joint(i, j, a, 1) + q_joint(i, j, a, -1);
        if (std::abs(m - q_a(i, a)) > 1e-12)
          throw std::invalid_argument("PredictionSet: A-marginal consistency failed");
      }
      for (int b : {1, -1}) {
        double m = q_joint(i, j, 1, b) + q_joint(i, j, -1, b);
        if (std::abs(m - q_b(j, b)) > 1e-12)
          throw std::invalid_argument("PredictionSet: B-marginal consistency failed");
      }
    }
}

double correlation(const QuantumState& state, const Setting& a, const Setting& b) {
  if (a.side != Side::A || b.side != Side::B)
    throw std::invalid_argument("correlation: settings must sit on opposite sides (A first)");
  Matrix4c obs = kron(a.observable(), b.observable());
  return (state.rho * obs).trace().real();
}

PredictionSet prediction_set(const QuantumState& state, const Setting& a1, const Setting& a2,
                             const Setting& b1, const Setting& b2) {
  if (a1.side != Side::A || a2.side != Side::A || b1.side != Side::B || b2.side != Side::B)
    throw std::invalid_argument("prediction_set: a-settings must be on side A, b-settings on side B");
  const Setting as[2] = {a1, a2};
  const Setting bs[2] = {b1, b2};
  const Matrix2c id = Matrix2c::Identity();
  PredictionSet p;
  for (int i = 0; i < 2; ++i)
    for (int ai = 0; ai < 2; ++ai) {
      int a = ai == 0 ? 1 : -1;
      p.margA[i][ai] = (state.rho * kron(as[i].projector(a), id)).trace().real();
      p.margB[i][ai] = (state.rho * kron(id, bs[i].projector(a))).trace().real();
    }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int ai = 0; ai < 2; ++ai)
        for (int bi = 0; bi < 2; ++bi) {
          int a = ai == 0 ? 1 : -1;
          int b = bi == 0 ? 1 : -1;
          p.joint[i][j][ai][bi] =
              (state.rho * kron(as[i].projector(a), bs[j].projector(b))).trace().real();
        }
  return p;
}

std::array<Setting, 4> scan_settings(double theta) {
  return {Setting{0.0, Side::A}, Setting{2.0 * theta, Side::A},
          Setting{theta, Side::B}, Setting{3.0 * theta, Side::B}};
}

}  // namespace bellkit
