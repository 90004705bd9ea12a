#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "aswap/dynamics.hpp"
#include "aswap/protocols.hpp"

using namespace aswap;

namespace {

FluxPulse constant_pulse(double flux, double duration, double dt) {
  FluxPulse p;
  p.sample_period = dt;
  p.samples.assign(size_t(std::llround(duration / dt)), flux);
  return p;
}

// single edge between two coupler frequencies, shaped in flux
FluxPulse edge_pulse(const CircuitSpec& circuit, double f_start, double f_end,
                     double duration, EdgeShape shape, double dt) {
  double p0 = coupler_flux_for_frequency(circuit.coupler, f_start);
  double p1 = coupler_flux_for_frequency(circuit.coupler, f_end);
  FluxPulse p;
  p.sample_period = dt;
  size_t n = size_t(std::llround(duration / dt));
  for (size_t i = 1; i <= n; ++i) {
    double s = double(i) / double(n);
    double frac = shape == EdgeShape::Cosine ? 0.5 * (1.0 - std::cos(M_PI * s)) : s;
    p.samples.push_back(p0 + (p1 - p0) * frac);
  }
  return p;
}

}  // namespace

TEST_CASE("state constructors and validation") {
  CircuitSpec circuit = pair_circuit();
  Basis basis = make_basis(circuit, false);
  QuantumState g = ground_state(basis);
  CHECK_NOTHROW(g.validate());
  CHECK(std::abs(g.amplitudes[0] - 1.0) < 1e-15);
  QuantumState e = basis_state(basis, {1, 0, 0});
  CHECK(std::abs(e.amplitudes[basis.index({1, 0, 0})] - 1.0) < 1e-15);
  DensityState rho = to_density(e);
  CHECK_NOTHROW(rho.validate());
  CHECK(std::abs(rho.matrix.trace().real() - 1.0) < 1e-12);
}

TEST_CASE("apply_rotation: pi/2, composition, identity, bad element") {
  CircuitSpec circuit = pair_circuit();
  Basis basis = make_basis(circuit, false);
  QuantumState g = ground_state(basis);

  QuantumState h = apply_rotation(g, "q1", Axis::X, M_PI / 2.0);
  int i1 = basis.index({1, 0, 0});
  CHECK(std::norm(h.amplitudes[0]) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::norm(h.amplitudes[i1]) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(h.amplitudes[i1] - std::complex<double>(0.0, -1.0 / std::sqrt(2.0))) < 1e-12);

  QuantumState flipped = apply_rotation(h, "q1", Axis::X, M_PI / 2.0);
  CHECK(std::norm(flipped.amplitudes[i1]) == doctest::Approx(1.0).epsilon(1e-12));

  QuantumState same = apply_rotation(g, "c", Axis::Y, 0.0);
  CHECK((same.amplitudes - g.amplitudes).norm() < 1e-15);
  CHECK_THROWS(apply_rotation(g, "q7", Axis::X, 1.0));
}

TEST_CASE("evolve_unitary: eigenstate populations are stationary") {
  CircuitSpec circuit = pair_circuit();
  double wq = circuit.q1.max_frequency;
  double flux = coupler_flux_for_frequency(circuit.coupler, wq);  // resonance
  Basis basis = make_basis(circuit, false);

  // symmetric dressed state of the resonant pair
  QuantumState psi = ground_state(basis);
  psi.amplitudes.setZero();
  psi.amplitudes[basis.index({1, 0, 0})] = 1.0 / std::sqrt(2.0);
  psi.amplitudes[basis.index({0, 1, 0})] = 1.0 / std::sqrt(2.0);

  EvolutionResult res = evolve_unitary(circuit, constant_pulse(flux, 40.0, 0.002), psi, 500);
  for (size_t t = 0; t < res.times.size(); ++t)
    CHECK(population(res, "|100>", t) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("evolve_unitary: vacuum Rabi oscillation at period 1/(2g)") {
  CircuitSpec circuit = pair_circuit();
  double g = circuit.g_1c;
  double flux = coupler_flux_for_frequency(circuit.coupler, circuit.q1.max_frequency);
  Basis basis = make_basis(circuit, false);
  QuantumState e0 = basis_state(basis, {1, 0, 0});

  double period = 1.0 / (2.0 * g);  // ~7.14 ns
  double dt = 0.002;
  FluxPulse p = constant_pulse(flux, period, dt);
  QuantumState final_state;
  EvolutionResult res = evolve_unitary(circuit, p, e0, int(p.samples.size() / 2), &final_state);
  // half period: excitation fully on the coupler; full period: back on q1
  size_t half = 0;
  for (size_t t = 0; t < res.times.size(); ++t)
    if (std::abs(res.times[t] - period / 2.0) < std::abs(res.times[half] - period / 2.0))
      half = t;
  CHECK(population(res, "|100>", half) < 1e-4);
  CHECK(population(res, "|010>", half) > 1.0 - 1e-4);
  CHECK(std::norm(final_state.amplitudes[basis.index({1, 0, 0})]) > 1.0 - 1e-4);
}

TEST_CASE("evolve_unitary: norm preserved and step-phase bound enforced") {
  CircuitSpec circuit = pair_circuit();
  double flux = coupler_flux_for_frequency(circuit.coupler, circuit.q1.max_frequency);
  Basis basis = make_basis(circuit, false);
  QuantumState e0 = basis_state(basis, {1, 0, 0});

  QuantumState final_state;
  evolve_unitary(circuit, constant_pulse(flux, 200.0, 0.002), e0, 100000, &final_state);
  CHECK(std::abs(final_state.amplitudes.norm() - 1.0) < 1e-9);

  // 2*pi*||H||*dt >= 0.1 rad must be rejected
  CHECK_THROWS(evolve_unitary(circuit, constant_pulse(flux, 200.0, 0.5), e0, 100));
}

TEST_CASE("evolve_unitary: linear sweep reproduces the Landau-Zener formula") {
  CircuitSpec circuit = pair_circuit();
  double g = circuit.g_1c;
  for (double target : {0.1, 0.6}) {
    double v = -4.0 * M_PI * M_PI * g * g / std::log(target);
    double p = landau_zener_diabatic(circuit, 2.0 * (20.0 * g) / v, 20.0 * g);
    CHECK(std::abs(p - target) < 0.02);
  }
}

TEST_CASE("adiabatic edge keeps the state on the instantaneous eigenbranch") {
  CircuitSpec circuit = pair_circuit();
  double wq = circuit.q1.max_frequency;
  double span = 10.0 * circuit.g_1c;
  double dt = 0.002;
  FluxPulse edge = edge_pulse(circuit, wq + span, wq - span, 200.0, EdgeShape::Cosine, dt);

  Basis basis = make_basis(circuit, false);
  auto manifold = excitation_manifold(basis, 1);
  auto block = [&](double flux) {
    Eigen::MatrixXd h = build_hamiltonian(circuit, flux);
    Eigen::MatrixXd b(manifold.size(), manifold.size());
    for (size_t i = 0; i < manifold.size(); ++i)
      for (size_t j = 0; j < manifold.size(); ++j)
        b(Eigen::Index(i), Eigen::Index(j)) = h(manifold[i], manifold[j]);
    return b;
  };
  int iq = -1;
  for (size_t i = 0; i < manifold.size(); ++i)
    if (basis.occupation(manifold[i])[0] == 1) iq = int(i);

  // start in the q1-like eigenstate at the first edge sample
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es0(block(edge.samples.front()));
  int b0 = 0;
  for (Eigen::Index k = 1; k < es0.eigenvectors().cols(); ++k)
    if (std::abs(es0.eigenvectors()(iq, k)) > std::abs(es0.eigenvectors()(iq, b0))) b0 = int(k);
  QuantumState psi = ground_state(basis);
  psi.amplitudes.setZero();
  for (size_t i = 0; i < manifold.size(); ++i)
    psi.amplitudes[manifold[i]] = es0.eigenvectors()(Eigen::Index(i), b0);

  QuantumState final_state;
  evolve_unitary(circuit, edge, psi, int(edge.samples.size()), &final_state);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(block(edge.samples.back()));
  std::complex<double> overlap = 0.0;
  for (size_t i = 0; i < manifold.size(); ++i)
    overlap += es1.eigenvectors()(Eigen::Index(i), b0) * final_state.amplitudes[manifold[i]];
  CHECK(std::abs(overlap) > 0.999);
}

TEST_CASE("propagator: unitary and invertible by sign flip") {
  Eigen::MatrixXd h(2, 2);
  h << 4.6, 0.07, 0.07, 4.5;
  Eigen::MatrixXcd u = propagator(h, 0.37);
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
  CHECK((u * u.adjoint() - id).norm() < 1e-12);
  CHECK((u * propagator(h, -0.37) - id).norm() < 1e-12);
}

TEST_CASE("evolve_lindblad: relaxation, dephasing, and the unitary limit") {
  CircuitSpec circuit = pair_circuit();
  circuit.g_1c = 1e-9;  // decouple so the single-element closed forms are exact
  circuit.g_2c = 1e-9;
  double flux = 0.02;  // coupler far detuned
  Basis basis = make_basis(circuit, false);
  double dt = 0.001;  // phase bound covers the doubly excited states here

  SUBCASE("t1 decay of the excited coupler") {
    LindbladSpec lb;
    lb.element_rates["c"] = {10000.0, kInfiniteTime};
    DensityState rho = to_density(basis_state(basis, {0, 1, 0}));
    FluxPulse p = constant_pulse(flux, 40.0, dt);
    DensityState out;
    evolve_lindblad(circuit, p, rho, lb, int(p.samples.size()), &out);
    double expected = std::exp(-40.0 / 10000.0);
    int ic = basis.index({0, 1, 0});
    CHECK(std::abs(out.matrix(ic, ic).real() - expected) < 1e-6);
    CHECK(std::abs(out.matrix.trace().real() - 1.0) < 1e-7);
  }

  SUBCASE("pure dephasing kills coherence at exp(-t/t_phi)") {
    LindbladSpec lb;
    lb.element_rates["c"] = {kInfiniteTime, 4000.0};
    DensityState rho = to_density(apply_rotation(ground_state(basis), "c", Axis::X, M_PI / 2.0));
    FluxPulse p = constant_pulse(flux, 40.0, dt);
    DensityState out;
    evolve_lindblad(circuit, p, rho, lb, int(p.samples.size()), &out);
    int ic = basis.index({0, 1, 0});
    double coherence = std::abs(out.matrix(0, ic));
    CHECK(coherence == doctest::Approx(0.5 * std::exp(-40.0 / 4000.0)).epsilon(1e-5));
  }

  SUBCASE("infinite rates match unitary evolution") {
    LindbladSpec lb;  // empty: all rates infinite
    QuantumState psi = apply_rotation(basis_state(basis, {1, 0, 0}), "c", Axis::Y, 0.7);
    FluxPulse p = constant_pulse(flux, 20.0, dt);
    DensityState out;
    evolve_lindblad(circuit, p, to_density(psi), lb, int(p.samples.size()), &out);
    QuantumState ref;
    EvolutionResult res = evolve_unitary(circuit, p, psi, int(p.samples.size()), &ref);
    for (int i = 0; i < basis.dim; ++i)
      CHECK(std::abs(out.matrix(i, i).real() - std::norm(ref.amplitudes[i])) < 1e-7);
    (void)res;
  }
}

TEST_CASE("evolve_constant_lindblad agrees with the closed-form decay") {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
  h(1, 1) = 5.0;
  LindbladSpec lb;
  lb.element_rates["c"] = {8000.0, kInfiniteTime};
  Basis two;
  two.element_names = {"c"};
  two.dims = {2};
  two.dim = 2;
  auto ops = collapse_operators(lb, two);
  REQUIRE(ops.size() == 1);
  Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(2, 2);
  rho0(1, 1) = 1.0;
  auto rhos = evolve_constant_lindblad(h, ops, rho0, {0.0, 1000.0, 5000.0});
  CHECK(std::abs(rhos[0](1, 1).real() - 1.0) < 1e-12);
  CHECK(rhos[1](1, 1).real() == doctest::Approx(std::exp(-1000.0 / 8000.0)).epsilon(1e-10));
  CHECK(rhos[2](1, 1).real() == doctest::Approx(std::exp(-5000.0 / 8000.0)).epsilon(1e-10));
}

TEST_CASE("population accessor: totals and range errors") {
  CircuitSpec circuit = pair_circuit();
  Basis basis = make_basis(circuit, false);
  FluxPulse p = constant_pulse(0.1, 10.0, 0.002);
  EvolutionResult res = evolve_unitary(circuit, p, ground_state(basis), 1000);
  double total = 0.0;
  for (const auto& label : res.basis_labels) total += population(res, label, 0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS(population(res, "|100>", res.times.size()));
  CHECK_THROWS(population(res, "|999>", 0));
}
