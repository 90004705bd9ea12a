#pragma once

#include <Eigen/Dense>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "aswap/circuit.hpp"
#include "aswap/pulse.hpp"

namespace aswap {

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

struct QuantumState {
  Eigen::VectorXcd amplitudes;
  Basis basis;

  void validate() const;  // normalized within 1e-9, size matches basis
};

struct DensityState {
  Eigen::MatrixXcd matrix;
  Basis basis;

  void validate() const;  // Hermitian, unit trace, positive within tolerance
};

QuantumState ground_state(const Basis& basis);
QuantumState basis_state(const Basis& basis, const std::vector<int>& occupation);
DensityState to_density(const QuantumState& state);

struct LindbladSpec {
  struct Rates {
    double t1 = kInfiniteTime;     // ns
    double t_phi = kInfiniteTime;  // ns
  };
  std::map<std::string, Rates> element_rates;  // by basis element name

  void validate() const;
  double min_finite_time() const;
};

struct EvolutionResult {
  std::vector<double> times;               // ns
  std::vector<std::string> basis_labels;   // per population column
  std::vector<std::string> element_names;  // per sigma_z column
  Eigen::MatrixXd populations;             // times x basis states
  Eigen::MatrixXd sigma_z;                 // times x elements
};

/// Piecewise-constant propagation under H(flux(t)) with exact per-sample
/// matrix exponentials. Errors if 2*pi*||H||*dt >= 0.1 rad on any occupied
/// excitation block.
EvolutionResult evolve_unitary(const CircuitSpec& circuit, const FluxPulse& pulse,
                               const QuantumState& initial, int record_stride,
                               QuantumState* final_state = nullptr);

/// Lindblad propagation (Strang splitting of the dissipator around the
/// unitary step). Lowering at rate 1/t1, dephasing operators at 1/(2 t_phi).
EvolutionResult evolve_lindblad(const CircuitSpec& circuit, const FluxPulse& pulse,
                                const DensityState& initial, const LindbladSpec& lindblad,
                                int record_stride, DensityState* final_state = nullptr);

enum class Axis { X, Y };

/// Ideal instantaneous rotation exp(-i angle/2 sigma_axis) on the element's
/// {0,1} subspace.
QuantumState apply_rotation(const QuantumState& state, const std::string& element,
                            Axis axis, double angle);
DensityState apply_rotation(const DensityState& state, const std::string& element,
                            Axis axis, double angle);

double population(const EvolutionResult& result, const std::string& bare_label,
                  size_t time_index);

// --- lower-level building blocks shared by the protocol layer ---

/// exp(-i 2 pi H dt) for Hermitian H (GHz, ns).
Eigen::MatrixXcd propagator(const Eigen::MatrixXd& hamiltonian, double dt);

/// Collapse operators for the spec on the given basis (already scaled by
/// sqrt(rate)); rates in 1/ns.
std::vector<Eigen::MatrixXd> collapse_operators(const LindbladSpec& lindblad,
                                                const Basis& basis);

/// Superoperator D with vec(rho) column-major: sum L rho L+ - 1/2 {L+L, rho}.
Eigen::MatrixXd dissipator_superoperator(const std::vector<Eigen::MatrixXd>& ops);

/// rho(t) under constant H and collapse ops, one exact superoperator
/// exponential per requested time.
std::vector<Eigen::MatrixXcd> evolve_constant_lindblad(
    const Eigen::MatrixXd& hamiltonian, const std::vector<Eigen::MatrixXd>& ops,
    const Eigen::MatrixXcd& rho0, const std::vector<double>& times);

}  // namespace aswap
