#include "aswap/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <stdexcept>

namespace aswap {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kMaxStepPhase = 0.1;  // rad

Eigen::MatrixXd number_operator(const Basis& basis, int element) {
  Eigen::MatrixXd n = Eigen::MatrixXd::Zero(basis.dim, basis.dim);
  for (int i = 0; i < basis.dim; ++i) n(i, i) = basis.occupation(i)[size_t(element)];
  return n;
}

Eigen::MatrixXd lowering_operator(const Basis& basis, int element) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(basis.dim, basis.dim);
  for (int i = 0; i < basis.dim; ++i) {
    auto occ = basis.occupation(i);
    if (occ[size_t(element)] > 0) {
      double amp = std::sqrt(double(occ[size_t(element)]));
      occ[size_t(element)] -= 1;
      a(basis.index(occ), i) = amp;
    }
  }
  return a;
}

void record_observables(const Eigen::VectorXd& pops, const Basis& basis, double t,
                        EvolutionResult& result, std::vector<Eigen::VectorXd>& pop_rows,
                        std::vector<Eigen::VectorXd>& sz_rows) {
  const int ne = int(basis.dims.size());
  Eigen::VectorXd sz = Eigen::VectorXd::Zero(ne);
  for (int i = 0; i < basis.dim; ++i) {
    auto occ = basis.occupation(i);
    for (int k = 0; k < ne; ++k) {
      if (occ[size_t(k)] == 0) sz[k] += pops[i];
      else if (occ[size_t(k)] == 1) sz[k] -= pops[i];
    }
  }
  result.times.push_back(t);
  pop_rows.push_back(pops);
  sz_rows.push_back(sz);
}

void finalize_result(EvolutionResult& result, const Basis& basis,
                     const std::vector<Eigen::VectorXd>& pop_rows,
                     const std::vector<Eigen::VectorXd>& sz_rows) {
  for (int i = 0; i < basis.dim; ++i) result.basis_labels.push_back(basis.label(i));
  result.element_names = basis.element_names;
  result.populations.resize(Eigen::Index(pop_rows.size()), basis.dim);
  result.sigma_z.resize(Eigen::Index(sz_rows.size()), Eigen::Index(basis.dims.size()));
  for (size_t r = 0; r < pop_rows.size(); ++r) {
    result.populations.row(Eigen::Index(r)) = pop_rows[r];
    result.sigma_z.row(Eigen::Index(r)) = sz_rows[r];
  }
}

}  // namespace

void QuantumState::validate() const {
  if (amplitudes.size() != basis.dim) throw std::invalid_argument("state: size does not match basis");
  if (std::abs(amplitudes.norm() - 1.0) > 1e-9) throw std::invalid_argument("state: not normalized");
}

void DensityState::validate() const {
  if (matrix.rows() != basis.dim || matrix.cols() != basis.dim)
    throw std::invalid_argument("density: size does not match basis");
  if ((matrix - matrix.adjoint()).norm() > 1e-12 * std::max(1.0, matrix.norm()))
    throw std::invalid_argument("density: not Hermitian");
  if (std::abs(matrix.trace().real() - 1.0) > 1e-9) throw std::invalid_argument("density: trace != 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix);
  if (es.eigenvalues().minCoeff() < -1e-9) throw std::invalid_argument("density: negative eigenvalue");
}

QuantumState ground_state(const Basis& basis) {
  QuantumState s;
  s.basis = basis;
  s.amplitudes = Eigen::VectorXcd::Zero(basis.dim);
  s.amplitudes[0] = 1.0;
  return s;
}

QuantumState basis_state(const Basis& basis, const std::vector<int>& occupation) {
  QuantumState s;
  s.basis = basis;
  s.amplitudes = Eigen::VectorXcd::Zero(basis.dim);
  s.amplitudes[basis.index(occupation)] = 1.0;
  return s;
}

DensityState to_density(const QuantumState& state) {
  DensityState d;
  d.basis = state.basis;
  d.matrix = state.amplitudes * state.amplitudes.adjoint();
  return d;
}

void LindbladSpec::validate() const {
  for (const auto& [name, r] : element_rates)
    if (r.t1 <= 0.0 || r.t_phi <= 0.0)
      throw std::invalid_argument("lindblad: t1 and t_phi must be > 0 for " + name);
}

double LindbladSpec::min_finite_time() const {
  double m = kInfiniteTime;
  for (const auto& [name, r] : element_rates) {
    (void)name;
    m = std::min({m, r.t1, r.t_phi});
  }
  return m;
}

Eigen::MatrixXcd propagator(const Eigen::MatrixXd& hamiltonian, double dt) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases[i] = std::polar(1.0, -kTwoPi * es.eigenvalues()[i] * dt);
  return es.eigenvectors().cast<std::complex<double>>() * phases.asDiagonal() *
         es.eigenvectors().transpose().cast<std::complex<double>>();
}

EvolutionResult evolve_unitary(const CircuitSpec& circuit, const FluxPulse& pulse,
                               const QuantumState& initial, int record_stride,
                               QuantumState* final_state) {
  pulse.validate();
  initial.validate();
  if (record_stride < 1) throw std::invalid_argument("evolve_unitary: record_stride must be >= 1");
  const Basis& basis = initial.basis;
  const double dt = pulse.sample_period;

  // H conserves total excitation; propagate only blocks the state occupies.
  int max_exc = 0;
  for (int d : basis.dims) max_exc += d - 1;
  std::vector<std::vector<int>> blocks;
  for (int n = 0; n <= max_exc; ++n) {
    auto idx = excitation_manifold(basis, n);
    double w = 0.0;
    for (int i : idx) w += std::norm(initial.amplitudes[i]);
    if (w > 1e-14) blocks.push_back(std::move(idx));
  }

  Eigen::VectorXcd psi = initial.amplitudes;
  EvolutionResult result;
  std::vector<Eigen::VectorXd> pop_rows, sz_rows;
  record_observables(psi.cwiseAbs2(), basis, 0.0, result, pop_rows, sz_rows);

  double cached_flux = std::numeric_limits<double>::quiet_NaN();
  std::vector<Eigen::MatrixXcd> block_props(blocks.size());

  for (size_t s = 0; s < pulse.samples.size(); ++s) {
    double flux = pulse.samples[s];
    if (flux != cached_flux) {
      Eigen::MatrixXd H = build_hamiltonian(circuit, flux);
      for (size_t b = 0; b < blocks.size(); ++b) {
        const auto& idx = blocks[b];
        Eigen::MatrixXd Hb(idx.size(), idx.size());
        for (size_t i = 0; i < idx.size(); ++i)
          for (size_t j = 0; j < idx.size(); ++j) Hb(Eigen::Index(i), Eigen::Index(j)) = H(idx[i], idx[j]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hb);
        double norm = std::max(std::abs(es.eigenvalues().minCoeff()),
                               std::abs(es.eigenvalues().maxCoeff()));
        if (kTwoPi * norm * dt >= kMaxStepPhase)
          throw std::invalid_argument(
              "evolve_unitary: per-step phase bound violated; use a finer pulse grid "
              "(need dt < " + std::to_string(kMaxStepPhase / (kTwoPi * norm)) + " ns)");
        Eigen::VectorXcd phases(es.eigenvalues().size());
        for (Eigen::Index i = 0; i < phases.size(); ++i)
          phases[i] = std::polar(1.0, -kTwoPi * es.eigenvalues()[i] * dt);
        block_props[b] = es.eigenvectors().cast<std::complex<double>>() * phases.asDiagonal() *
                         es.eigenvectors().transpose().cast<std::complex<double>>();
      }
      cached_flux = flux;
    }
    for (size_t b = 0; b < blocks.size(); ++b) {
      const auto& idx = blocks[b];
      Eigen::VectorXcd v(idx.size());
      for (size_t i = 0; i < idx.size(); ++i) v[Eigen::Index(i)] = psi[idx[i]];
      v = block_props[b] * v;
      for (size_t i = 0; i < idx.size(); ++i) psi[idx[i]] = v[Eigen::Index(i)];
    }
    if ((s + 1) % size_t(record_stride) == 0 || s + 1 == pulse.samples.size())
      record_observables(psi.cwiseAbs2(), basis, double(s + 1) * dt, result, pop_rows, sz_rows);
  }

  finalize_result(result, basis, pop_rows, sz_rows);
  if (final_state) {
    final_state->basis = basis;
    final_state->amplitudes = psi;
  }
  return result;
}

std::vector<Eigen::MatrixXd> collapse_operators(const LindbladSpec& lindblad, const Basis& basis) {
  lindblad.validate();
  std::vector<Eigen::MatrixXd> ops;
  for (const auto& [name, rates] : lindblad.element_rates) {
    int k = basis.element(name);
    if (std::isfinite(rates.t1))
      ops.push_back(std::sqrt(1.0 / rates.t1) * lowering_operator(basis, k));
    if (std::isfinite(rates.t_phi)) {
      // Z = 1 - 2n, scaled so coherences decay at 1/t_phi
      Eigen::MatrixXd z = Eigen::MatrixXd::Identity(basis.dim, basis.dim) -
                          2.0 * number_operator(basis, k);
      ops.push_back(std::sqrt(1.0 / (2.0 * rates.t_phi)) * z);
    }
  }
  return ops;
}

Eigen::MatrixXd dissipator_superoperator(const std::vector<Eigen::MatrixXd>& ops) {
  if (ops.empty()) return Eigen::MatrixXd();
  const Eigen::Index d = ops.front().rows();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(d * d, d * d);
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  auto kron = [](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j)
        K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
  };
  for (const auto& L : ops) {
    Eigen::MatrixXd LtL = L.transpose() * L;
    D += kron(L, L) - 0.5 * kron(I, LtL) - 0.5 * kron(LtL.transpose(), I);
  }
  return D;
}

EvolutionResult evolve_lindblad(const CircuitSpec& circuit, const FluxPulse& pulse,
                                const DensityState& initial, const LindbladSpec& lindblad,
                                int record_stride, DensityState* final_state) {
  pulse.validate();
  initial.validate();
  lindblad.validate();
  if (record_stride < 1) throw std::invalid_argument("evolve_lindblad: record_stride must be >= 1");
  const Basis& basis = initial.basis;
  const double dt = pulse.sample_period;
  if (dt > lindblad.min_finite_time() / 100.0)
    throw std::invalid_argument("evolve_lindblad: step too coarse for the decoherence rates");

  auto ops = collapse_operators(lindblad, basis);
  Eigen::MatrixXd half_dissipator;
  if (!ops.empty()) {
    Eigen::MatrixXd D = dissipator_superoperator(ops);
    half_dissipator = (0.5 * dt * D).exp();
  }

  Eigen::MatrixXcd rho = initial.matrix;
  const Eigen::Index d = basis.dim;
  auto apply_half_dissipator = [&](Eigen::MatrixXcd& r) {
    if (ops.empty()) return;
    Eigen::Map<Eigen::VectorXcd> v(r.data(), d * d);
    v = half_dissipator * v;
  };

  EvolutionResult result;
  std::vector<Eigen::VectorXd> pop_rows, sz_rows;
  record_observables(rho.diagonal().real(), basis, 0.0, result, pop_rows, sz_rows);

  double cached_flux = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXcd U;
  for (size_t s = 0; s < pulse.samples.size(); ++s) {
    double flux = pulse.samples[s];
    if (flux != cached_flux) {
      Eigen::MatrixXd H = build_hamiltonian(circuit, flux);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
      double norm = std::max(std::abs(es.eigenvalues().minCoeff()),
                             std::abs(es.eigenvalues().maxCoeff()));
      if (kTwoPi * norm * dt >= kMaxStepPhase)
        throw std::invalid_argument("evolve_lindblad: per-step phase bound violated; use a finer grid");
      U = propagator(H, dt);
      cached_flux = flux;
    }
    apply_half_dissipator(rho);
    rho = U * rho * U.adjoint();
    apply_half_dissipator(rho);
    if ((s + 1) % size_t(record_stride) == 0 || s + 1 == pulse.samples.size())
      record_observables(rho.diagonal().real(), basis, double(s + 1) * dt, result, pop_rows, sz_rows);
  }

  finalize_result(result, basis, pop_rows, sz_rows);
  if (final_state) {
    final_state->basis = basis;
    final_state->matrix = rho;
  }
  return result;
}

namespace {

Eigen::MatrixXcd rotation_matrix(const Basis& basis, int element, Axis axis, double angle) {
  using cd = std::complex<double>;
  const cd c = std::cos(angle / 2.0);
  const cd ms = axis == Axis::X ? cd(0.0, -std::sin(angle / 2.0)) : cd(-std::sin(angle / 2.0), 0.0);
  const cd ps = axis == Axis::X ? cd(0.0, -std::sin(angle / 2.0)) : cd(std::sin(angle / 2.0), 0.0);
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Identity(basis.dim, basis.dim);
  for (int i = 0; i < basis.dim; ++i) {
    auto occ = basis.occupation(i);
    if (occ[size_t(element)] != 0) continue;
    auto occ1 = occ;
    occ1[size_t(element)] = 1;
    int j = basis.index(occ1);
    R(i, i) = c;
    R(j, j) = c;
    R(i, j) = ms;  // |0><1| coefficient
    R(j, i) = ps;  // |1><0| coefficient
  }
  return R;
}

}  // namespace

QuantumState apply_rotation(const QuantumState& state, const std::string& element,
                            Axis axis, double angle) {
  int k = state.basis.element(element);
  QuantumState out = state;
  out.amplitudes = rotation_matrix(state.basis, k, axis, angle) * state.amplitudes;
  return out;
}

DensityState apply_rotation(const DensityState& state, const std::string& element,
                            Axis axis, double angle) {
  int k = state.basis.element(element);
  Eigen::MatrixXcd R = rotation_matrix(state.basis, k, axis, angle);
  DensityState out = state;
  out.matrix = R * state.matrix * R.adjoint();
  return out;
}

double population(const EvolutionResult& result, const std::string& bare_label,
                  size_t time_index) {
  if (time_index >= result.times.size()) throw std::out_of_range("population: time index out of range");
  for (size_t i = 0; i < result.basis_labels.size(); ++i)
    if (result.basis_labels[i] == bare_label)
      return result.populations(Eigen::Index(time_index), Eigen::Index(i));
  throw std::out_of_range("population: unknown label '" + bare_label + "'");
}

std::vector<Eigen::MatrixXcd> evolve_constant_lindblad(
    const Eigen::MatrixXd& hamiltonian, const std::vector<Eigen::MatrixXd>& ops,
    const Eigen::MatrixXcd& rho0, const std::vector<double>& times) {
  const Eigen::Index d = hamiltonian.rows();
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
  auto kron = [](const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    Eigen::MatrixXcd K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j)
        K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
  };
  Eigen::MatrixXcd Hc = hamiltonian.cast<std::complex<double>>();
  Eigen::MatrixXcd gen = std::complex<double>(0.0, -kTwoPi) *
                         (kron(I, Hc) - kron(Hc.transpose(), I));
  if (!ops.empty()) gen += dissipator_superoperator(ops).cast<std::complex<double>>();

  std::vector<Eigen::MatrixXcd> out;
  out.reserve(times.size());
  for (double t : times) {
    Eigen::MatrixXcd P = (gen * t).exp();
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), d * d);
    v = P * v;
    out.push_back(Eigen::Map<Eigen::MatrixXcd>(v.data(), d, d));
  }
  return out;
}

}  // namespace aswap
