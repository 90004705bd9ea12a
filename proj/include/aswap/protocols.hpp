#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "aswap/circuit.hpp"
#include "aswap/dynamics.hpp"
#include "aswap/fitting.hpp"
#include "aswap/pulse.hpp"

namespace aswap {

// --- fixtures -------------------------------------------------------------

/// Full Q1 / C12 / Q2 circuit with readout resonator on Q1.
CircuitSpec default_circuit();

/// Isolated qubit-coupler pair (Q2 parked far away and decoupled); used for
/// transfer and Landau-Zener studies.
CircuitSpec pair_circuit();

/// Pair circuit with a deeply dispersive resonator, for chi_eff cross-checks.
CircuitSpec dispersive_oracle_circuit();

// --- protocol results -----------------------------------------------------

struct ScanTrace {
  std::vector<double> flux;
  std::vector<double> signal;
};

struct SpectroscopyMap {
  std::vector<double> flux_grid;
  std::vector<double> drive_freq_grid;  // GHz
  Eigen::MatrixXd response;             // flux x drive frequency
};

struct TransferResult {
  double probability = 0.0;
  bool crossed_anticrossing = true;  // false => sweep missed the crossing
};

struct ExperimentTrace {
  std::vector<double> x;  // ns
  std::vector<double> y;  // population
  FitResult fit;
};

struct RamseyRecord {
  std::vector<double> tau_delay;        // ns
  std::vector<double> phase;            // rad, wrapped to (-pi, pi]
  std::vector<double> phase_unwrapped;  // rad
  double reference_phase = 0.0;         // rad, wrapped
  std::vector<double> distortion_phase;           // rad, wrapped
  std::vector<double> distortion_phase_unwrapped; // rad
  std::vector<std::string> warnings;
};

// --- operations -----------------------------------------------------------

/// Hybridization proxy for the readout-transmission dip: 1 - (largest q1
/// weight over the single-excitation branches) at each flux.
ScanTrace coarse_anticrossing_scan(const CircuitSpec& circuit,
                                   const std::vector<double>& flux_grid);

struct SpectroscopyOptions {
  std::string drive_element = "c";
  double linewidth = 0.005;        // GHz, proxy-mode Lorentzian width
  bool time_domain = false;
  double drive_amplitude = 0.002;  // GHz, time-domain mode
  double drive_duration = 250.0;   // ns, time-domain mode
};

/// Excitation response per (flux, drive frequency). Default mode sums
/// Lorentzians at the single-excitation eigenfrequencies weighted by the
/// drive element's weight; time-domain mode evolves under the rotating-frame
/// drive Hamiltonian instead.
SpectroscopyMap spectroscopy_scan(const CircuitSpec& circuit,
                                  const std::vector<double>& flux_grid,
                                  const std::vector<double>& drive_freq_grid,
                                  const SpectroscopyOptions& options = {});

/// Excite q1, sweep the coupler flux through one shaped edge, return the
/// population on the coupler's bare excited label.
TransferResult aswap_transfer(const CircuitSpec& circuit, double edge_ns,
                              EdgeShape edge_shape, double flux_start,
                              double flux_end, double sample_period = 0.002);

/// Diabatic (non-swapping) probability for a linear-in-frequency sweep of the
/// coupler across the q1 anticrossing, +/- span_ghz around resonance.
/// Endpoint states are the instantaneous q1-like eigenstates.
double landau_zener_diabatic(const CircuitSpec& circuit, double sweep_ns,
                             double span_ghz, double sample_period = 0.002);

/// Resonant Rabi drive on the coupler in its rotating frame; damped-cosine
/// fit of the excited population. Fitted frequency ~ drive amplitude.
ExperimentTrace rabi_experiment(const CircuitSpec& circuit, const LindbladSpec& lindblad,
                                double drive_amplitude_mhz,
                                const std::vector<double>& duration_grid);

/// Coupler prepared excited, free decay, exponential fit. Warns when the
/// relative T1 uncertainty exceeds 10%.
ExperimentTrace t1_experiment(const CircuitSpec& circuit, const LindbladSpec& lindblad,
                              const std::vector<double>& delay_grid);

/// pi/2 - delay - pi/2 on the coupler at the given detuning; damped-cosine
/// fit gives the frequency offset and T2*.
ExperimentTrace ramsey_experiment(const CircuitSpec& circuit, const LindbladSpec& lindblad,
                                  double detuning_mhz,
                                  const std::vector<double>& delay_grid);

struct DistortionRamseyOptions {
  double pre_pulse_amplitude = 0.0012;  // Phi0
  double pre_pulse_duration = 4000.0;   // ns
  double hold_frequency = 4.4;          // GHz, coupler frequency during hold
  double edge_ns = 200.0;  // long enough that the q1 crossing is traversed adiabatically
  double hold_ns = 100.0;
  EdgeShape edge_shape = EdgeShape::Cosine;
  double sample_period = 0.002;   // ns
  double slope_threshold = 0.5;   // fraction of the max usable |df_c/dPhi|
};

/// Modified Ramsey experiment measuring the phase accumulated on the coupler
/// from the decaying tail of a rectangular flux pulse switched off at tau0.
/// phi_dist(tau) = phi(tau) - phi0 with phi0 from a zero-amplitude reference.
RamseyRecord distortion_ramsey(const CircuitSpec& circuit, const DistortionModel& model,
                               const std::optional<PredistortionFilter>& filter,
                               const std::vector<double>& tau_delay_grid,
                               const DistortionRamseyOptions& options = {});

/// Independent prediction of phi_dist by quadrature of the adiabatic branch
/// energy over the distorted vs reference flux, bypassing the state-vector
/// evolution.
std::vector<double> distortion_phase_oracle(const CircuitSpec& circuit,
                                            const DistortionModel& model,
                                            const std::optional<PredistortionFilter>& filter,
                                            const std::vector<double>& tau_delay_grid,
                                            const DistortionRamseyOptions& options = {});

}  // namespace aswap
