#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "aswap/circuit.hpp"
#include "aswap/protocols.hpp"

using namespace aswap;

namespace {

TransmonSpec tunable(double wmax) {
  TransmonSpec t;
  t.max_frequency = wmax;
  t.flux_tunable = true;
  return t;
}

Eigen::MatrixXd one_exc_block(const CircuitSpec& circuit, double flux) {
  Basis basis = make_basis(circuit, false);
  auto manifold = excitation_manifold(basis, 1);
  Eigen::MatrixXd h = build_hamiltonian(circuit, flux);
  Eigen::MatrixXd block(manifold.size(), manifold.size());
  for (size_t i = 0; i < manifold.size(); ++i)
    for (size_t j = 0; j < manifold.size(); ++j)
      block(Eigen::Index(i), Eigen::Index(j)) = h(manifold[i], manifold[j]);
  return block;
}

}  // namespace

TEST_CASE("coupler flux map: closed-form values and limits") {
  TransmonSpec c = tunable(6.0);
  CHECK(coupler_frequency(c, 0.0) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(coupler_frequency(c, 1.0 / 3.0) ==
        doctest::Approx(6.0 * std::sqrt(0.5)).epsilon(1e-12));
  CHECK(coupler_frequency(c, 0.499999) < 0.02);
  CHECK_THROWS_AS(coupler_frequency(c, 0.5), std::domain_error);
  CHECK_THROWS_AS(coupler_frequency(c, -0.6), std::domain_error);

  // monotone decreasing on [0, period/2)
  double prev = coupler_frequency(c, 0.0);
  for (int i = 1; i < 50; ++i) {
    double f = coupler_frequency(c, 0.49 * i / 49.0);
    CHECK(f < prev);
    prev = f;
  }
}

TEST_CASE("coupler flux map: inversion and analytic slope") {
  TransmonSpec c = tunable(6.6);
  for (double target : {6.5, 5.0, 4.2, 3.1}) {
    double flux = coupler_flux_for_frequency(c, target);
    CHECK(coupler_frequency(c, flux) == doctest::Approx(target).epsilon(1e-12));
  }
  // slope against a central difference
  for (double flux : {0.05, 0.2, 0.35, 0.44}) {
    double h = 1e-7;
    double fd = (coupler_frequency(c, flux + h) - coupler_frequency(c, flux - h)) / (2.0 * h);
    CHECK(coupler_frequency_slope(c, flux) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("hamiltonian: resonant pair splits by exactly 2g") {
  CircuitSpec circuit = pair_circuit();
  double wq = circuit.q1.max_frequency;
  double flux = coupler_flux_for_frequency(circuit.coupler, wq);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(one_exc_block(circuit, flux));
  // top two branches are the q1-coupler pair; q2 is parked far below
  double gap = es.eigenvalues()[2] - es.eigenvalues()[1];
  CHECK(gap == doctest::Approx(2.0 * circuit.g_1c).epsilon(1e-9));
}

TEST_CASE("hamiltonian: far-detuned eigenvalues shift by ~g^2/Delta") {
  CircuitSpec circuit = pair_circuit();
  double wq = circuit.q1.max_frequency;
  double delta = 20.0 * circuit.g_1c;
  double flux = coupler_flux_for_frequency(circuit.coupler, wq + delta);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(one_exc_block(circuit, flux));
  double shift_bound = circuit.g_1c * circuit.g_1c / delta;
  bool q1_found = false;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i] - wq) < shift_bound * 1.01) q1_found = true;
  CHECK(q1_found);
}

TEST_CASE("hamiltonian: zero couplings give exactly the bare frequencies") {
  CircuitSpec circuit = pair_circuit();
  circuit.g_1c = 1e-30;  // validation requires > 0
  circuit.g_2c = 1e-30;
  circuit.g_12 = 0.0;
  double flux = 0.1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(one_exc_block(circuit, flux));
  std::vector<double> bare = {circuit.q2.max_frequency, circuit.q1.max_frequency,
                              coupler_frequency(circuit.coupler, flux)};
  for (size_t i = 0; i < bare.size(); ++i)
    CHECK(es.eigenvalues()[Eigen::Index(i)] == doctest::Approx(bare[i]).epsilon(1e-12));
}

TEST_CASE("hamiltonian: hermitian and excitation conserving") {
  CircuitSpec circuit = default_circuit();
  for (bool with_res : {false, true}) {
    Eigen::MatrixXd h = build_hamiltonian(circuit, 0.27, with_res);
    CHECK((h - h.transpose()).norm() < 1e-12 * h.norm());
    Basis basis = make_basis(circuit, with_res);
    Eigen::MatrixXd n = Eigen::MatrixXd::Zero(basis.dim, basis.dim);
    for (int i = 0; i < basis.dim; ++i) n(i, i) = basis.total_excitation(i);
    CHECK((h * n - n * h).norm() < 1e-12);
  }
}

TEST_CASE("eigenspectrum: branch count, ordering, and zero-bias frequencies") {
  CircuitSpec circuit = default_circuit();
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.45 * i / 100.0);
  SpectrumScan scan = eigenspectrum(circuit, grid);
  CHECK(scan.branch_count() == 3);
  for (const auto& b : scan.branches)
    for (Eigen::Index i = 1; i < b.size(); ++i) CHECK(b[i] >= b[i - 1]);
  // coupler far above both qubits at zero bias; residual dispersive
  // repulsion from the coupler is a few MHz at most
  CHECK(std::abs(scan.branches.front()[0] - 4.127) < 0.004);
  CHECK(std::abs(scan.branches.front()[1] - 4.636) < 0.004);
}

TEST_CASE("eigenspectrum: bare labels swap across the q1 anticrossing") {
  CircuitSpec circuit = default_circuit();
  double wq = circuit.q1.max_frequency;
  double lo = coupler_flux_for_frequency(circuit.coupler, wq + 0.3);
  double hi = coupler_flux_for_frequency(circuit.coupler, wq - 0.3);
  SpectrumScan scan = eigenspectrum(circuit, {lo, hi});
  // the middle branch is q1-like before the crossing and coupler-like after
  CHECK(scan.bare_labels.front()[1] == "q1");
  CHECK(scan.bare_labels.back()[1] == "c");
}

TEST_CASE("locate_anticrossings: recovers 2g on the isolated pair") {
  CircuitSpec circuit = pair_circuit();
  double wq = circuit.q1.max_frequency;
  double lo = coupler_flux_for_frequency(circuit.coupler, wq + 0.5);
  double hi = coupler_flux_for_frequency(circuit.coupler, wq - 0.5);
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(lo + (hi - lo) * i / 400.0);
  auto found = locate_anticrossings(eigenspectrum(circuit, grid));
  REQUIRE(found.size() == 1);
  CHECK(std::abs(found.front().gap / (2.0 * circuit.g_1c) - 1.0) < 0.01);
}

TEST_CASE("locate_anticrossings: one crossing per qubit on the full circuit") {
  CircuitSpec circuit = default_circuit();
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(0.22 + (0.44 - 0.22) * i / 400.0);
  auto found = locate_anticrossings(eigenspectrum(circuit, grid));
  REQUIRE(found.size() == 2);
  // level repulsion from the third element and the direct q1-q2 path
  // perturbs the minimal gaps by a few percent
  for (const auto& ac : found) {
    double g = ac.lower_branch == 1 ? circuit.g_1c : circuit.g_2c;
    CHECK(std::abs(ac.gap / (2.0 * g) - 1.0) < 0.05);
  }
}

TEST_CASE("locate_anticrossings: empty when the coupler never reaches the qubits") {
  CircuitSpec circuit = default_circuit();
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(0.1 * i / 50.0);  // f_c stays > 6.5
  CHECK(locate_anticrossings(eigenspectrum(circuit, grid)).empty());
}

TEST_CASE("dressed mixing angle: balanced at resonance, polarized at +-20g") {
  double g = 0.07;
  double t0 = dressed_mixing_angle(0.0, g);
  CHECK(std::cos(t0) * std::cos(t0) - std::sin(t0) * std::sin(t0) ==
        doctest::Approx(0.0).epsilon(1e-12));
  double tp = dressed_mixing_angle(20.0 * g, g);
  double tm = dressed_mixing_angle(-20.0 * g, g);
  CHECK(std::abs((std::cos(tp) * std::cos(tp) - std::sin(tp) * std::sin(tp)) - (-1.0)) < 0.01);
  CHECK(std::abs((std::cos(tm) * std::cos(tm) - std::sin(tm) * std::sin(tm)) - 1.0) < 0.01);
  CHECK_THROWS_AS(dressed_mixing_angle(0.1, 0.0), std::domain_error);
}

TEST_CASE("dressed mixing angle matches diagonalized branch weights") {
  CircuitSpec circuit = pair_circuit();
  double wq = circuit.q1.max_frequency;
  double g = circuit.g_1c;
  for (double delta : {-0.3, -0.05, 0.0, 0.05, 0.3}) {
    double flux = coupler_flux_for_frequency(circuit.coupler, wq - delta);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(one_exc_block(circuit, flux));
    double theta = dressed_mixing_angle(delta, g);
    // q1-excited row of the single-excitation block (|001>, |010>, |100> order)
    const int iq = 2;
    // branch carrying qubit weight sin^2(theta): pair branches are indices 1,2
    double w1 = es.eigenvectors()(iq, 1) * es.eigenvectors()(iq, 1);
    double w2 = es.eigenvectors()(iq, 2) * es.eigenvectors()(iq, 2);
    double s2 = std::sin(theta) * std::sin(theta);
    CHECK(std::min(std::abs(w1 - s2), std::abs(w2 - s2)) < 1e-9);
  }
}

TEST_CASE("circuit validation rejects bad parameters") {
  CircuitSpec circuit = default_circuit();
  CHECK_NOTHROW(circuit.validate());
  CircuitSpec bad = circuit;
  bad.g_1c = 0.0;
  CHECK_THROWS(bad.validate());
  bad = circuit;
  bad.levels_per_element = 4;
  CHECK_THROWS(bad.validate());
  bad = circuit;
  bad.q1.max_frequency = -1.0;
  CHECK_THROWS(bad.validate());
  bad = circuit;
  bad.q1.anharmonicity = 0.1;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("basis bookkeeping round-trips indices and labels") {
  CircuitSpec circuit = default_circuit();
  Basis basis = make_basis(circuit, true, 3);
  CHECK(basis.dim == 2 * 2 * 2 * 3);
  for (int i = 0; i < basis.dim; ++i) CHECK(basis.index(basis.occupation(i)) == i);
  CHECK(basis.label(basis.index({1, 0, 0, 2})) == "|1002>");
  CHECK(basis.element("c") == 1);
  CHECK_THROWS(basis.element("nope"));
}
