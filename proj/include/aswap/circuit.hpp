#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

// Frequency units are GHz throughout; time is ns; flux is in units of the
// flux quantum. Hamiltonians are written in the excitation-conserving
// (rotating-wave) form; propagators use exp(-i 2*pi H t) so that GHz * ns
// counts cycles.

namespace aswap {

struct TransmonSpec {
  double max_frequency = 0.0;   // GHz, frequency at zero flux
  double anharmonicity = 0.0;   // GHz, <= 0; ignored with 2 levels
  bool flux_tunable = false;
  double flux_period = 1.0;     // in units of Phi0

  void validate() const;
};

struct ResonatorSpec {
  double frequency = 0.0;       // GHz
  double linewidth = 0.0;       // GHz (kappa, full width)
  double qubit_coupling = 0.0;  // GHz (g_qr to q1)

  void validate() const;
  /// |w_r - w_q| >= 10 g_qr
  bool dispersive_valid(double qubit_frequency) const;
};

struct CircuitSpec {
  TransmonSpec q1;
  TransmonSpec q2;
  TransmonSpec coupler;
  double g_1c = 0.0;   // GHz
  double g_2c = 0.0;   // GHz
  double g_12 = 0.0;   // GHz, residual direct qubit-qubit coupling
  ResonatorSpec resonator;  // attached to q1
  int levels_per_element = 2;

  void validate() const;
};

/// Tensor-product basis bookkeeping. Element order: q1, coupler, q2
/// (optionally followed by the resonator).
struct Basis {
  std::vector<std::string> element_names;  // "q1", "c", "q2" [, "r"]
  std::vector<int> dims;
  int dim = 0;

  int index(const std::vector<int>& occupation) const;
  std::vector<int> occupation(int index) const;
  int total_excitation(int index) const;
  std::string label(int index) const;  // e.g. "|100>"
  int element(const std::string& name) const;
};

Basis make_basis(const CircuitSpec& circuit, bool include_resonator,
                 int resonator_levels = 3);

/// Coupler flux-frequency map: w_max * sqrt(|cos(pi * flux / period)|).
/// Requires flux_tunable and |flux| < period/2.
double coupler_frequency(const TransmonSpec& spec, double flux);

/// Flux giving the requested coupler frequency on [0, period/2).
double coupler_flux_for_frequency(const TransmonSpec& spec, double frequency);

/// d f_c / d flux, analytic.
double coupler_frequency_slope(const TransmonSpec& spec, double flux);

/// Frequency of any element (flux ignored for fixed-frequency elements).
double element_frequency(const TransmonSpec& spec, double flux);

/// Full rotating-wave Hamiltonian at the given flux, GHz. Real symmetric.
Eigen::MatrixXd build_hamiltonian(const CircuitSpec& circuit, double flux,
                                  bool include_resonator = false,
                                  int resonator_levels = 3);

/// Indices of basis states with the given total excitation number.
std::vector<int> excitation_manifold(const Basis& basis, int n);

struct SpectrumScan {
  std::vector<double> flux_grid;
  // branches[i] = sorted eigenfrequencies of the single-excitation manifold
  std::vector<Eigen::VectorXd> branches;
  // bare_labels[i][b] = element name of the bare state with maximal overlap
  std::vector<std::vector<std::string>> bare_labels;
  std::vector<bool> tie_flagged;  // per flux point

  int branch_count() const { return branches.empty() ? 0 : int(branches.front().size()); }
};

SpectrumScan eigenspectrum(const CircuitSpec& circuit,
                           const std::vector<double>& flux_grid);

struct Anticrossing {
  double flux = 0.0;  // refined location
  double gap = 0.0;   // GHz, refined minimal gap
  int lower_branch = 0;
};

/// Local minima of adjacent-branch gaps, parabolically refined.
std::vector<Anticrossing> locate_anticrossings(const SpectrumScan& scan);

/// theta = atan2(g, delta/2 - sqrt(delta^2/4 + g^2)); requires g > 0.
/// With this branch sin^2(theta) is the qubit weight of the measured dressed
/// state and cos^2(theta) the coupler weight.
double dressed_mixing_angle(double delta_qc, double g);

}  // namespace aswap
