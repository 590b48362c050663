#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bellkit/quantum.hpp"

using namespace bellkit;

namespace {

// Independent oracle: build the two-qubit observable by explicit index
// arithmetic instead of the library's kron helper.
Matrix4c oracle_kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = a(i / 2, j / 2) * b(i % 2, j % 2);
  return m;
}

double oracle_correlation(const QuantumState& s, double angleA, double angleB) {
  Matrix2c sx, sz;
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  Matrix2c oa = std::sin(angleA) * sx + std::cos(angleA) * sz;
  Matrix2c ob = std::sin(angleB) * sx + std::cos(angleB) * sz;
  return (s.rho * oracle_kron(oa, ob)).trace().real();
}

QuantumState random_pure_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector4c ket;
  for (int k = 0; k < 4; ++k) ket(k) = std::complex<double>(g(rng), g(rng));
  return state_from_ket(ket);
}

// Von Neumann entropy of the reduced state of qubit A.
double oracle_entanglement_entropy(const QuantumState& s) {
  Matrix2c red = Matrix2c::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) red(i, j) += s.rho(2 * i + k, 2 * j + k);
  Eigen::SelfAdjointEigenSolver<Matrix2c> es(red, Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (int k = 0; k < 2; ++k) {
    double lam = es.eigenvalues()(k);
    if (lam > 1e-15) h -= lam * std::log2(lam);
  }
  return h;
}

}  // namespace

TEST_CASE("bell states") {
  QuantumState psi1 = make_bell_state(BellKind::psi1);
  psi1.validate();
  CHECK(oracle_correlation(psi1, 0.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(psi1.rho.trace().real() - 1.0) < 1e-14);
  CHECK((psi1.rho * psi1.rho - psi1.rho).cwiseAbs().maxCoeff() < 1e-14);  // pure

  QuantumState psi2 = make_bell_state(BellKind::psi2);
  psi2.validate();
  CHECK(oracle_correlation(psi2, 0.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));

  // singlet: correlation at angles (0, t) is -cos t
  for (double t : {0.1, 0.7, 1.3, 2.9}) {
    Setting a{0.0, Side::A}, b{t, Side::B};
    CHECK(correlation(psi1, a, b) == doctest::Approx(-std::cos(t)).epsilon(1e-13));
    CHECK(correlation(psi1, a, b) == doctest::Approx(oracle_correlation(psi1, 0.0, t)).epsilon(1e-14));
  }
}

TEST_CASE("giustina and larsson states") {
  QuantumState prod = make_giustina_state(0.0);
  CHECK(std::abs(prod.rho(1, 1).real() - 1.0) < 1e-14);  // |HV><HV|

  QuantumState balanced = make_giustina_state(1.0);
  CHECK(std::abs(balanced.rho(1, 1).real() - 0.5) < 1e-14);
  CHECK(std::abs(balanced.rho(1, 2).real() - 0.5) < 1e-14);

  QuantumState g3 = make_giustina_state(3.0);
  CHECK(std::abs(g3.rho(1, 1).real() - 0.1) < 1e-14);  // C^2 = 1/10

  CHECK_THROWS_AS(make_giustina_state(-1.0), std::invalid_argument);

  for (double xi : {0.05, 0.1, 0.8, 1.5}) {
    QuantumState l = make_larsson_state(xi);
    l.validate();
    CHECK(std::abs(l.rho.trace().real() - 1.0) < 1e-13);
  }
  CHECK_THROWS_AS(make_larsson_state(0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_larsson_state(2.0), std::invalid_argument);

  // entanglement vanishes as xi -> 0
  double tiny = oracle_entanglement_entropy(make_larsson_state(1e-3));
  double mid = oracle_entanglement_entropy(make_larsson_state(0.3));
  CHECK(tiny < 1e-4);
  CHECK(mid > tiny);
}

TEST_CASE("state validation rejects bad inputs") {
  QuantumState s = make_bell_state(BellKind::psi1);
  QuantumState notHermitian = s;
  notHermitian.rho(0, 1) = 0.5;
  CHECK_THROWS_AS(notHermitian.validate(), std::invalid_argument);
  QuantumState badTrace = s;
  badTrace.rho *= 1.5;
  CHECK_THROWS_AS(badTrace.validate(), std::invalid_argument);
  QuantumState negative = s;
  negative.rho(0, 0) = -0.2;
  negative.rho(1, 1) += 0.2;
  CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
}

TEST_CASE("settings and projector decomposition") {
  Setting pol{0.3, Side::A, AngleConvention::polarizer};
  Setting blo{0.6, Side::A, AngleConvention::bloch};
  CHECK((pol.observable() - blo.observable()).cwiseAbs().maxCoeff() < 1e-15);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int k = 0; k < 20; ++k) {
    Setting s{angle(rng), Side::A};
    Matrix2c o = s.observable();
    CHECK((o * o - Matrix2c::Identity()).cwiseAbs().maxCoeff() < 1e-14);  // eigenvalues +-1
    CHECK((s.projector(1) + s.projector(-1) - Matrix2c::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  }
  Setting probe{0.0, Side::A};
  CHECK_THROWS_AS(probe.projector(0), std::invalid_argument);
}

TEST_CASE("correlation requires opposite sides") {
  QuantumState s = make_bell_state(BellKind::psi1);
  Setting a{0.0, Side::A}, b{0.3, Side::B};
  CHECK_THROWS_AS(correlation(s, b, b), std::invalid_argument);
  CHECK_THROWS_AS(correlation(s, a, a), std::invalid_argument);
}

TEST_CASE("prediction sets: normalization, marginals, correlations") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int k = 0; k < 25; ++k) {
    QuantumState st = random_pure_state(rng);
    Setting a1{angle(rng), Side::A}, a2{angle(rng), Side::A};
    Setting b1{angle(rng), Side::B}, b2{angle(rng), Side::B};
    PredictionSet p = prediction_set(st, a1, a2, b1, b2);
    p.validate();
    CHECK(p.correlation(1, 2) == doctest::Approx(correlation(st, a1, b2)).epsilon(1e-12));
    CHECK(p.correlation(2, 1) == doctest::Approx(correlation(st, a2, b1)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(
      prediction_set(make_bell_state(BellKind::psi1), Setting{0, Side::B}, Setting{0, Side::A},
                     Setting{0, Side::B}, Setting{0, Side::B}),
      std::invalid_argument);
}

TEST_CASE("maximally entangled marginals are flat") {
  QuantumState psi1 = make_bell_state(BellKind::psi1);
  for (double theta : {0.2, 0.7, 1.1}) {
    auto s = scan_settings(theta);
    PredictionSet p = prediction_set(psi1, s[0], s[1], s[2], s[3]);
    for (int i = 1; i <= 2; ++i) {
      CHECK(p.q_a(i, 1) == doctest::Approx(0.5).epsilon(1e-13));
      CHECK(p.q_b(i, 1) == doctest::Approx(0.5).epsilon(1e-13));
    }
  }
}

TEST_CASE("singlet correlations depend only on the angle difference") {
  QuantumState psi1 = make_bell_state(BellKind::psi1);
  double diff = 0.37;
  double ref = correlation(psi1, Setting{0.0, Side::A}, Setting{diff, Side::B});
  for (int k = 0; k < 100; ++k) {
    double base = -3.0 + 6.0 * k / 99.0;
    double c = correlation(psi1, Setting{base, Side::A}, Setting{base + diff, Side::B});
    CHECK(std::abs(c - ref) < 1e-12);
  }
}

TEST_CASE("mixed states flow through the prediction pipeline") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> mix(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int k = 0; k < 10; ++k) {
    QuantumState a = random_pure_state(rng);
    QuantumState b = random_pure_state(rng);
    double lam = mix(rng);
    QuantumState mixed;
    mixed.rho = lam * a.rho + (1.0 - lam) * b.rho;
    mixed.validate();
    Setting a1{angle(rng), Side::A}, a2{angle(rng), Side::A};
    Setting b1{angle(rng), Side::B}, b2{angle(rng), Side::B};
    PredictionSet p = prediction_set(mixed, a1, a2, b1, b2);
    p.validate();
    // expectation values are linear in the state
    PredictionSet pa = prediction_set(a, a1, a2, b1, b2);
    PredictionSet pb = prediction_set(b, a1, a2, b1, b2);
    CHECK(p.q_joint(1, 2, 1, -1) ==
          doctest::Approx(lam * pa.q_joint(1, 2, 1, -1) + (1.0 - lam) * pb.q_joint(1, 2, 1, -1))
              .epsilon(1e-12));
  }
}

TEST_CASE("label permutation flips outcomes; direction permutation is an involution") {
  std::mt19937_64 rng(23);
  QuantumState st = random_pure_state(rng);
  auto s = scan_settings(0.9);
  PredictionSet p = prediction_set(st, s[0], s[1], s[2], s[3]);
  PredictionSet q = p.permute_labels();
  for (int i = 1; i <= 2; ++i) {
    CHECK(q.q_a(i, 1) == p.q_a(i, -1));
    CHECK(q.q_b(i, -1) == p.q_b(i, 1));
  }
  CHECK(q.q_joint(1, 2, 1, -1) == p.q_joint(1, 2, -1, 1));
  PredictionSet back = q.permute_labels();
  CHECK(back.q_joint(2, 1, 1, 1) == p.q_joint(2, 1, 1, 1));

  QuantumState twice = permute_directions(permute_directions(st));
  CHECK((twice.rho - st.rho).cwiseAbs().maxCoeff() < 1e-14);
}
