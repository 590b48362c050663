#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

namespace bellkit {

using Matrix4c = Eigen::Matrix4cd;
using Matrix2c = Eigen::Matrix2cd;
using Vector4c = Eigen::Vector4cd;

enum class Side { A, B };

/// Polarizer angles describe rotations in ordinary space and must be doubled
/// before they act on the Bloch sphere; bloch angles are used as-is.
enum class AngleConvention { bloch, polarizer };

/// Two-qubit density operator in the z-basis |uu>, |ud>, |du>, |dd>.
/// H is identified with the +1 eigenvector of sigma_z, V with the -1 one.
struct QuantumState {
  Matrix4c rho = Matrix4c::Zero();

  /// Throws std::invalid_argument unless rho is Hermitian (1e-12), unit
  /// trace (1e-12) and positive semidefinite (eigenvalues >= -1e-10).
  void validate() const;
};

QuantumState state_from_ket(const Vector4c& ket);

enum class BellKind { psi1, psi2 };

/// (|ud> -/+ |du>)/sqrt(2); psi1 takes the minus sign (singlet), psi2 the plus.
QuantumState make_bell_state(BellKind kind);

/// C (|HV> + r|VH>) with C = 1/sqrt(1+r^2).
QuantumState make_giustina_state(double r);

/// C {(1 - 2 cos xi)|00> + sin xi (|10> + |01>)}, xi in (0, pi/2).
QuantumState make_larsson_state(double xi);

/// Swap H and V on both qubits (conjugation by sigma_x (x) sigma_x).
QuantumState permute_directions(const QuantumState& s);

/// Dichotomic polarization observable sin(angle) sigma_x + cos(angle) sigma_z,
/// with the angle taken in the Bloch convention after optional doubling.
struct Setting {
  double angle = 0.0;  // radians
  Side side = Side::A;
  AngleConvention convention = AngleConvention::bloch;

  double bloch_angle() const;
  Matrix2c observable() const;
  /// Projector onto the outcome eigenspace; outcome must be +1 or -1.
  Matrix2c projector(int outcome) const;
};

/// Quantum probabilities for a 2-setting-per-side scenario.
/// Outcomes are labelled +1/-1; settings are labelled 1 and 2.
struct PredictionSet {
  double joint[2][2][2][2] = {};  // [i-1][j-1][a][b], a,b: 0 -> +1, 1 -> -1
  double margA[2][2] = {};        // [i-1][a]
  double margB[2][2] = {};        // [j-1][b]

  double q_joint(int i, int j, int a, int b) const;
  double q_a(int i, int a) const;
  double q_b(int j, int b) const;
  /// <A_i B_j> = sum ab q_joint(i,j,a,b)
  double correlation(int i, int j) const;

  /// o <-> e relabelling: flips the sign of every outcome on both sides.
  PredictionSet permute_labels() const;

  /// Throws std::invalid_argument if normalization or marginal consistency
  /// fail beyond 1e-12.
  void validate() const;
};

/// Side mismatch (a not on A, or b not on B) throws std::invalid_argument.
double correlation(const QuantumState& state, const Setting& a, const Setting& b);

PredictionSet prediction_set(const QuantumState& state, const Setting& a1, const Setting& a2,
                             const Setting& b1, const Setting& b2);

/// The observable family used for the eta_crit scans:
/// A1 = sigma_z, A2 at 2*theta, B1 at theta, B2 at 3*theta (Bloch angles).
std::array<Setting, 4> scan_settings(double theta);

}  // namespace bellkit
