#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "aswap/circuit.hpp"

namespace aswap {

struct DispersiveParams {
  double chi = 0.0;              // MHz, bare dispersive shift
  double kappa = 0.0;            // MHz, resonator linewidth
  double probe_frequency = 0.0;  // GHz

  void validate() const;
};

struct IQPoint {
  double i = 0.0;
  double q = 0.0;
  int true_state = 0;
  int assigned_state = 0;
};

struct HistogramResult {
  std::vector<IQPoint> iq_points;
  double threshold = 0.0;  // along I after blob alignment
  double assignment_fidelity = 0.0;
  uint64_t seed = 0;
};

/// chi = g^2 / delta_qr, sign carried. Inputs g_qr in MHz, delta in GHz,
/// result in MHz. Sets *dispersive_warning when |delta| < 10 g.
double chi_bare(double g_qr_mhz, double delta_qr_ghz,
                bool* dispersive_warning = nullptr);

/// Effective dispersive shift under qubit-coupler hybridization:
///   chi_eff = (chi/2) * (1 - (-g^2 + x^2) / (g^2 + x^2)),
///   x = delta_qc/2 - sqrt(delta_qc^2/4 + g^2).
/// chi in MHz, delta_qc in GHz, g in MHz.
double chi_eff(double chi_mhz, double delta_qc_ghz, double g_mhz);

/// Independent dispersive shift from diagonalizing q1 (x) c (x) q2 (x) r at
/// the given coupler flux: half the difference in resonator pull between the
/// dressed ground and |1~> states, in MHz. The dressed qubit branch is the
/// one overlapping sin(theta)|q1> + cos(theta)|c>.
double chi_eff_numeric(const CircuitSpec& circuit, double flux,
                       int resonator_levels = 3);

/// Notch (side-coupled) resonator response over the probe grid; the resonance
/// sits at w_r + chi_eff for state 0 and w_r - chi_eff for state 1.
std::vector<std::complex<double>> transmission_s21(const DispersiveParams& params,
                                                   int qubit_state,
                                                   const std::vector<double>& probe_grid_ghz,
                                                   double chi_eff_mhz);

/// 1 - erfc(snr / (2 sqrt(2))) / 2.
double histogram_fidelity_analytic(double snr);

/// Two circular unit Gaussians separated by snr along I, threshold at the
/// midpoint. Counter-based RNG: identical (seed, shots) give identical points.
HistogramResult simulate_histogram(double snr, int shots, uint64_t seed);

/// 1/2 + transfer * (qubit_fidelity - 1/2): an excitation that fails to swap
/// is assigned at chance.
double coupler_readout_fidelity(double swap_transfer, double qubit_fidelity);

}  // namespace aswap
