#include "aswap/protocols.hpp"

#include <cmath>
#include <stdexcept>

namespace aswap {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double edge_fraction(EdgeShape shape, double s) {
  switch (shape) {
    case EdgeShape::Cosine: return 0.5 * (1.0 - std::cos(M_PI * s));
    case EdgeShape::Linear: return s;
    default: return s >= 1.0 ? 1.0 : 0.0;
  }
}

Eigen::MatrixXd one_excitation_block(const CircuitSpec& circuit, const Basis& basis,
                                     const std::vector<int>& manifold, double flux) {
  Eigen::MatrixXd H = build_hamiltonian(circuit, flux);
  Eigen::MatrixXd Hb(manifold.size(), manifold.size());
  for (size_t i = 0; i < manifold.size(); ++i)
    for (size_t j = 0; j < manifold.size(); ++j)
      Hb(Eigen::Index(i), Eigen::Index(j)) = H(manifold[i], manifold[j]);
  (void)basis;
  return Hb;
}

int manifold_slot(const Basis& basis, const std::vector<int>& manifold,
                  const std::string& element) {
  int k = basis.element(element);
  for (size_t i = 0; i < manifold.size(); ++i)
    if (basis.occupation(manifold[i])[size_t(k)] == 1) return int(i);
  throw std::logic_error("manifold_slot: element not found");
}

}  // namespace

CircuitSpec default_circuit() {
  CircuitSpec c;
  c.q1 = {4.636, -0.2, false, 1.0};
  c.q2 = {4.127, -0.2, false, 1.0};
  c.coupler = {6.6, -0.2, true, 1.0};
  c.g_1c = 0.070;
  c.g_2c = 0.070;
  c.g_12 = 0.012;
  c.resonator = {7.1, 0.002, 0.04};
  c.levels_per_element = 2;
  return c;
}

CircuitSpec pair_circuit() {
  CircuitSpec c = default_circuit();
  c.q2 = {2.0, -0.2, false, 1.0};
  c.g_2c = 1e-6;
  c.g_12 = 0.0;
  return c;
}

CircuitSpec dispersive_oracle_circuit() {
  CircuitSpec c = pair_circuit();
  c.resonator = {20.0, 0.002, 0.08};
  return c;
}

ScanTrace coarse_anticrossing_scan(const CircuitSpec& circuit,
                                   const std::vector<double>& flux_grid) {
  if (flux_grid.empty()) throw std::invalid_argument("coarse_anticrossing_scan: empty grid");
  Basis basis = make_basis(circuit, false);
  auto manifold = excitation_manifold(basis, 1);
  int iq = manifold_slot(basis, manifold, "q1");

  ScanTrace trace;
  trace.flux = flux_grid;
  trace.signal.reserve(flux_grid.size());
  for (double flux : flux_grid) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        one_excitation_block(circuit, basis, manifold, flux));
    double max_q1 = 0.0;
    for (Eigen::Index b = 0; b < es.eigenvectors().cols(); ++b)
      max_q1 = std::max(max_q1, std::norm(es.eigenvectors()(iq, b)));
    trace.signal.push_back(1.0 - max_q1);
  }
  return trace;
}

SpectroscopyMap spectroscopy_scan(const CircuitSpec& circuit,
                                  const std::vector<double>& flux_grid,
                                  const std::vector<double>& drive_freq_grid,
                                  const SpectroscopyOptions& options) {
  if (flux_grid.empty() || drive_freq_grid.empty())
    throw std::invalid_argument("spectroscopy_scan: empty grid");
  Basis basis = make_basis(circuit, false);
  auto manifold = excitation_manifold(basis, 1);
  int slot = manifold_slot(basis, manifold, options.drive_element);
  int drive_k = basis.element(options.drive_element);

  SpectroscopyMap map;
  map.flux_grid = flux_grid;
  map.drive_freq_grid = drive_freq_grid;
  map.response.resize(Eigen::Index(flux_grid.size()), Eigen::Index(drive_freq_grid.size()));

  for (size_t fi = 0; fi < flux_grid.size(); ++fi) {
    if (!options.time_domain) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
          one_excitation_block(circuit, basis, manifold, flux_grid[fi]));
      for (size_t di = 0; di < drive_freq_grid.size(); ++di) {
        double r = 0.0;
        for (Eigen::Index b = 0; b < es.eigenvalues().size(); ++b) {
          double w = std::norm(es.eigenvectors()(slot, b));
          double det = drive_freq_grid[di] - es.eigenvalues()[b];
          double g2 = options.linewidth * options.linewidth;
          r += w * g2 / (g2 + det * det);
        }
        map.response(Eigen::Index(fi), Eigen::Index(di)) = r;
      }
    } else {
      Eigen::MatrixXd H = build_hamiltonian(circuit, flux_grid[fi]);
      for (size_t di = 0; di < drive_freq_grid.size(); ++di) {
        Eigen::MatrixXd Hrot = H;
        for (int i = 0; i < basis.dim; ++i)
          Hrot(i, i) -= drive_freq_grid[di] * basis.total_excitation(i);
        for (int i = 0; i < basis.dim; ++i) {
          auto occ = basis.occupation(i);
          if (occ[size_t(drive_k)] + 1 < basis.dims[size_t(drive_k)]) {
            auto occ2 = occ;
            occ2[size_t(drive_k)] += 1;
            int j = basis.index(occ2);
            double amp = 0.5 * options.drive_amplitude * std::sqrt(double(occ2[size_t(drive_k)]));
            Hrot(j, i) += amp;
            Hrot(i, j) += amp;
          }
        }
        Eigen::VectorXcd psi = propagator(Hrot, options.drive_duration).col(0);
        map.response(Eigen::Index(fi), Eigen::Index(di)) = 1.0 - std::norm(psi[0]);
      }
    }
  }
  return map;
}

TransferResult aswap_transfer(const CircuitSpec& circuit, double edge_ns,
                              EdgeShape edge_shape, double flux_start,
                              double flux_end, double sample_period) {
  FluxPulse pulse;
  pulse.sample_period = sample_period;
  if (edge_shape == EdgeShape::Step) {
    pulse.samples = {flux_end};
  } else {
    size_t n = size_t(std::llround(edge_ns / sample_period));
    if (n < 2) throw std::invalid_argument("aswap_transfer: edge too short for the sample grid");
    for (size_t i = 1; i <= n; ++i)
      pulse.samples.push_back(flux_start + (flux_end - flux_start) *
                                               edge_fraction(edge_shape, double(i) / double(n)));
  }

  Basis basis = make_basis(circuit, false);
  QuantumState psi0 = basis_state(basis, {1, 0, 0});
  QuantumState psi;
  evolve_unitary(circuit, pulse, psi0, int(pulse.samples.size()), &psi);

  TransferResult result;
  result.probability = std::norm(psi.amplitudes[basis.index({0, 1, 0})]);
  double f0 = coupler_frequency(circuit.coupler, flux_start);
  double f1 = coupler_frequency(circuit.coupler, flux_end);
  result.crossed_anticrossing = (f0 - circuit.q1.max_frequency) * (f1 - circuit.q1.max_frequency) < 0;
  return result;
}

double landau_zener_diabatic(const CircuitSpec& circuit, double sweep_ns,
                             double span_ghz, double sample_period) {
  if (span_ghz <= 0 || sweep_ns <= 0)
    throw std::invalid_argument("landau_zener_diabatic: span and duration must be > 0");
  double wq = circuit.q1.max_frequency;
  size_t n = size_t(std::llround(sweep_ns / sample_period));
  if (n < 2) throw std::invalid_argument("landau_zener_diabatic: sweep too short for the sample grid");

  FluxPulse pulse;
  pulse.sample_period = sample_period;
  for (size_t i = 1; i <= n; ++i) {
    double f = wq + span_ghz - 2.0 * span_ghz * double(i) / double(n);
    pulse.samples.push_back(coupler_flux_for_frequency(circuit.coupler, f));
  }

  Basis basis = make_basis(circuit, false);
  auto manifold = excitation_manifold(basis, 1);
  int iq = manifold_slot(basis, manifold, "q1");

  auto q1_branch = [&](double flux) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        one_excitation_block(circuit, basis, manifold, flux));
    int best = 0;
    for (Eigen::Index b = 1; b < es.eigenvectors().cols(); ++b)
      if (std::norm(es.eigenvectors()(iq, b)) > std::norm(es.eigenvectors()(iq, best)))
        best = int(b);
    return Eigen::VectorXd(es.eigenvectors().col(best));
  };

  double flux_start = coupler_flux_for_frequency(circuit.coupler, wq + span_ghz);
  Eigen::VectorXd v0 = q1_branch(flux_start);
  QuantumState psi0;
  psi0.basis = basis;
  psi0.amplitudes = Eigen::VectorXcd::Zero(basis.dim);
  for (size_t i = 0; i < manifold.size(); ++i) psi0.amplitudes[manifold[i]] = v0[Eigen::Index(i)];

  QuantumState psi;
  evolve_unitary(circuit, pulse, psi0, int(n), &psi);

  Eigen::VectorXd v1 = q1_branch(pulse.samples.back());
  std::complex<double> overlap = 0.0;
  for (size_t i = 0; i < manifold.size(); ++i)
    overlap += v1[Eigen::Index(i)] * psi.amplitudes[manifold[i]];
  return std::norm(overlap);
}

namespace {

Basis coupler_basis() {
  Basis b;
  b.element_names = {"c"};
  b.dims = {2};
  b.dim = 2;
  return b;
}

LindbladSpec coupler_rates(const LindbladSpec& lindblad) {
  LindbladSpec out;
  auto it = lindblad.element_rates.find("c");
  if (it != lindblad.element_rates.end()) out.element_rates["c"] = it->second;
  return out;
}

Eigen::MatrixXcd half_pi_x() {
  Eigen::MatrixXcd r(2, 2);
  double c = std::cos(M_PI / 4.0), s = std::sin(M_PI / 4.0);
  r << c, std::complex<double>(0, -s), std::complex<double>(0, -s), c;
  return r;
}

}  // namespace

ExperimentTrace rabi_experiment(const CircuitSpec& circuit, const LindbladSpec& lindblad,
                                double drive_amplitude_mhz,
                                const std::vector<double>& duration_grid) {
  circuit.validate();
  if (duration_grid.size() < 8) throw std::invalid_argument("rabi_experiment: need >= 8 durations");
  Basis b = coupler_basis();
  auto ops = collapse_operators(coupler_rates(lindblad), b);
  double omega = drive_amplitude_mhz * 1e-3;  // GHz
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2, 2);
  H(0, 1) = H(1, 0) = omega / 2.0;

  Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(2, 2);
  rho0(0, 0) = 1.0;
  auto rhos = evolve_constant_lindblad(H, ops, rho0, duration_grid);

  ExperimentTrace trace;
  trace.x = duration_grid;
  for (const auto& rho : rhos) trace.y.push_back(rho(1, 1).real());
  trace.fit = fit_damped_cosine(trace.x, trace.y);
  return trace;
}

ExperimentTrace t1_experiment(const CircuitSpec& circuit, const LindbladSpec& lindblad,
                              const std::vector<double>& delay_grid) {
  circuit.validate();
  if (delay_grid.size() < 8) throw std::invalid_argument("t1_experiment: need >= 8 delays");
  Basis b = coupler_basis();
  auto ops = collapse_operators(coupler_rates(lindblad), b);
  Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(2, 2);
  rho0(1, 1) = 1.0;
  auto rhos = evolve_constant_lindblad(Eigen::MatrixXd::Zero(2, 2), ops, rho0, delay_grid);

  ExperimentTrace trace;
  trace.x = delay_grid;
  for (const auto& rho : rhos) trace.y.push_back(rho(1, 1).real());
  trace.fit = fit_exponential(trace.x, trace.y);
  if (trace.fit.converged) {
    double t = trace.fit.parameter("decay_time");
    double u = trace.fit.uncertainty("decay_time");
    if (t > 0 && u / t > 0.1)
      trace.fit.warnings.push_back("decay_time uncertainty above 10%; extend the delay grid");
  }
  return trace;
}

ExperimentTrace ramsey_experiment(const CircuitSpec& circuit, const LindbladSpec& lindblad,
                                  double detuning_mhz,
                                  const std::vector<double>& delay_grid) {
  circuit.validate();
  if (delay_grid.size() < 8) throw std::invalid_argument("ramsey_experiment: need >= 8 delays");
  Basis b = coupler_basis();
  auto ops = collapse_operators(coupler_rates(lindblad), b);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2, 2);
  H(1, 1) = detuning_mhz * 1e-3;

  Eigen::MatrixXcd r = half_pi_x();
  Eigen::VectorXcd psi0(2);
  psi0 << 1.0, 0.0;
  psi0 = r * psi0;
  Eigen::MatrixXcd rho0 = psi0 * psi0.adjoint();
  auto rhos = evolve_constant_lindblad(H, ops, rho0, delay_grid);

  ExperimentTrace trace;
  trace.x = delay_grid;
  for (auto& rho : rhos) {
    Eigen::MatrixXcd out = r * rho * r.adjoint();
    trace.y.push_back(out(1, 1).real());
  }
  trace.fit = fit_damped_cosine(trace.x, trace.y);
  return trace;
}

// --- distortion Ramsey ----------------------------------------------------

namespace {

struct RamseyLayout {
  size_t n_pre = 0, n_delay = 0, n_rise = 0, n_hold = 0, n_fall = 0;
  double hold_flux = 0.0;
  double dt = 0.0;
  EdgeShape shape = EdgeShape::Cosine;
  double pre_amplitude = 0.0;

  size_t window_begin() const { return n_pre + n_delay; }
  size_t total() const { return n_pre + n_delay + n_rise + n_hold + n_fall; }

  double programmed(size_t i) const {
    if (i < n_pre) return pre_amplitude;
    if (i < n_pre + n_delay) return 0.0;
    size_t j = i - n_pre - n_delay;
    if (j < n_rise) return hold_flux * edge_fraction(shape, double(j) / double(n_rise));
    j -= n_rise;
    if (j < n_hold) return hold_flux;
    j -= n_hold;
    return hold_flux * (1.0 - edge_fraction(shape, double(j + 1) / double(n_fall)));
  }
};

RamseyLayout make_layout(const CircuitSpec& circuit, double tau,
                         const DistortionRamseyOptions& opt, double pre_amplitude) {
  RamseyLayout lay;
  lay.dt = opt.sample_period;
  lay.shape = opt.edge_shape;
  lay.pre_amplitude = pre_amplitude;
  lay.n_pre = size_t(std::llround(opt.pre_pulse_duration / lay.dt));
  lay.n_delay = size_t(std::llround(tau / lay.dt));
  lay.n_rise = size_t(std::llround(opt.edge_ns / lay.dt));
  lay.n_hold = size_t(std::llround(opt.hold_ns / lay.dt));
  lay.n_fall = lay.n_rise;
  if (lay.n_rise < 2 || lay.n_hold < 1)
    throw std::invalid_argument("distortion_ramsey: edge or hold too short for the sample grid");
  lay.hold_flux = coupler_flux_for_frequency(circuit.coupler, opt.hold_frequency);
  return lay;
}

/// Streams the programmed waveform through the optional predistortion filter
/// and the distortion model; returns the physical flux over the simulated
/// window [window_begin, total).
std::vector<double> distorted_window(const RamseyLayout& lay, const DistortionModel& model,
                                     const std::optional<PredistortionFilter>& filter) {
  struct FState { double xp = 0.0, yp = 0.0; };
  std::vector<FState> fstate;
  if (filter) {
    filter->validate();
    if (std::abs(filter->sample_period - lay.dt) > 1e-12)
      throw std::invalid_argument("distortion_ramsey: filter sample period mismatch");
    fstate.resize(filter->sections.size());
  }
  const size_t nt = model.terms.size();
  std::vector<double> decay(nt), state(nt, 0.0);
  for (size_t k = 0; k < nt; ++k)
    decay[k] = std::exp(-lay.dt / model.terms[k].time_constant);

  std::vector<double> window;
  window.reserve(lay.total() - lay.window_begin());
  double prev_u = 0.0;
  for (size_t i = 0; i < lay.total(); ++i) {
    double u = lay.programmed(i);
    if (filter) {
      for (size_t s = 0; s < filter->sections.size(); ++s) {
        const auto& sec = filter->sections[s];
        double xn = u;
        u = sec.b0 * xn + sec.b1 * fstate[s].xp + sec.a1 * fstate[s].yp;
        fstate[s].xp = xn;
        fstate[s].yp = u;
      }
    }
    double du = u - prev_u;
    prev_u = u;
    double y = u;
    for (size_t k = 0; k < nt; ++k) {
      state[k] = decay[k] * state[k] + model.terms[k].amplitude * du;
      y += state[k];
    }
    if (i >= lay.window_begin()) window.push_back(model.dc_gain * y);
  }
  return window;
}

double sigma_z_q1(const QuantumState& psi) {
  int k = psi.basis.element("q1");
  double sz = 0.0;
  for (int i = 0; i < psi.basis.dim; ++i) {
    int n = psi.basis.occupation(i)[size_t(k)];
    double p = std::norm(psi.amplitudes[i]);
    if (n == 0) sz += p;
    else if (n == 1) sz -= p;
  }
  return sz;
}

double ramsey_phase(const CircuitSpec& circuit, const std::vector<double>& window, double dt) {
  FluxPulse pulse;
  pulse.sample_period = dt;
  pulse.samples = window;

  Basis basis = make_basis(circuit, false);
  QuantumState psi0 = apply_rotation(ground_state(basis), "q1", Axis::X, M_PI / 2.0);
  QuantumState psi;
  evolve_unitary(circuit, pulse, psi0, int(window.size()), &psi);

  // Rx(pi/2) maps sigma_z <- sigma_y, Ry(pi/2) maps sigma_z <- -sigma_x, so
  // the relative phase of |1> is atan2(<sz after Rx>, -<sz after Ry>).
  double sz_x = sigma_z_q1(apply_rotation(psi, "q1", Axis::X, M_PI / 2.0));
  double sz_y = sigma_z_q1(apply_rotation(psi, "q1", Axis::Y, M_PI / 2.0));
  return std::atan2(sz_x, -sz_y);
}

void check_hold_point(const CircuitSpec& circuit, const RamseyLayout& lay,
                      const DistortionRamseyOptions& opt, std::vector<std::string>& warnings) {
  double usable = 0.45 * circuit.coupler.flux_period;
  double max_slope = std::abs(coupler_frequency_slope(circuit.coupler, usable));
  double slope = std::abs(coupler_frequency_slope(circuit.coupler, lay.hold_flux));
  if (slope < opt.slope_threshold * max_slope)
    throw std::invalid_argument("distortion_ramsey: hold point too flux-insensitive (|df/dPhi| below threshold)");

  double idle_fc = coupler_frequency(circuit.coupler, 0.0);
  double v = std::abs(idle_fc - opt.hold_frequency) / opt.edge_ns;  // GHz/ns
  double p_lz = std::exp(-4.0 * M_PI * M_PI * circuit.g_1c * circuit.g_1c / v);
  if (opt.edge_shape == EdgeShape::Step || p_lz > 0.01)
    warnings.push_back("non-adiabatic aSWAP edge (estimated diabatic loss " +
                       std::to_string(p_lz) + ")");
}

std::vector<double> unwrap_series(const std::vector<double>& wrapped) {
  std::vector<double> out;
  out.reserve(wrapped.size());
  for (size_t i = 0; i < wrapped.size(); ++i) {
    if (i == 0) out.push_back(wrapped[0]);
    else out.push_back(out.back() + std::remainder(wrapped[i] - wrapped[i - 1], kTwoPi));
  }
  return out;
}

}  // namespace

RamseyRecord distortion_ramsey(const CircuitSpec& circuit, const DistortionModel& model,
                               const std::optional<PredistortionFilter>& filter,
                               const std::vector<double>& tau_delay_grid,
                               const DistortionRamseyOptions& options) {
  circuit.validate();
  model.validate();
  if (tau_delay_grid.empty()) throw std::invalid_argument("distortion_ramsey: empty delay grid");

  RamseyRecord record;
  RamseyLayout ref_layout = make_layout(circuit, tau_delay_grid.front(), options, 0.0);
  check_hold_point(circuit, ref_layout, options, record.warnings);

  // The reference window is delay-independent: with no pre-pulse the line has
  // no memory of the wait, so one reference run serves every delay.
  double phi0 = ramsey_phase(circuit, distorted_window(ref_layout, model, filter), options.sample_period);
  record.reference_phase = phi0;

  for (double tau : tau_delay_grid) {
    RamseyLayout lay = make_layout(circuit, tau, options, options.pre_pulse_amplitude);
    double phi = ramsey_phase(circuit, distorted_window(lay, model, filter), options.sample_period);
    record.tau_delay.push_back(tau);
    record.phase.push_back(phi);
    record.distortion_phase.push_back(std::remainder(phi - phi0, kTwoPi));
  }
  record.phase_unwrapped = unwrap_series(record.phase);
  record.distortion_phase_unwrapped = unwrap_series(record.distortion_phase);
  return record;
}

std::vector<double> distortion_phase_oracle(const CircuitSpec& circuit,
                                            const DistortionModel& model,
                                            const std::optional<PredistortionFilter>& filter,
                                            const std::vector<double>& tau_delay_grid,
                                            const DistortionRamseyOptions& options) {
  circuit.validate();
  model.validate();
  Basis basis = make_basis(circuit, false);
  auto manifold = excitation_manifold(basis, 1);
  int iq = manifold_slot(basis, manifold, "q1");

  RamseyLayout ref_layout = make_layout(circuit, tau_delay_grid.front(), options, 0.0);
  std::vector<double> ref = distorted_window(ref_layout, model, filter);

  // adiabatic branch carrying the excitation: the q1-like sorted branch at
  // the window start (it does not cross any other branch during the pulse)
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es0(
      one_excitation_block(circuit, basis, manifold, ref.front()));
  int branch = 0;
  for (Eigen::Index b = 1; b < es0.eigenvectors().cols(); ++b)
    if (std::norm(es0.eigenvectors()(iq, b)) > std::norm(es0.eigenvectors()(iq, branch)))
      branch = int(b);

  auto branch_energy = [&](double flux) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        one_excitation_block(circuit, basis, manifold, flux));
    return es.eigenvalues()[branch];
  };

  std::vector<double> ref_energy(ref.size());
  for (size_t i = 0; i < ref.size(); ++i) ref_energy[i] = branch_energy(ref[i]);

  std::vector<double> out;
  for (double tau : tau_delay_grid) {
    RamseyLayout lay = make_layout(circuit, tau, options, options.pre_pulse_amplitude);
    std::vector<double> win = distorted_window(lay, model, filter);
    double phi = 0.0;
    for (size_t i = 0; i < win.size(); ++i)
      phi += branch_energy(win[i]) - ref_energy[i];
    out.push_back(std::remainder(-kTwoPi * phi * options.sample_period, kTwoPi));
  }
  return out;
}

}  // namespace aswap
