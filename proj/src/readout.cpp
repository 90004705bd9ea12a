#include "aswap/readout.hpp"

#include <cmath>
#include <stdexcept>

namespace aswap {

void DispersiveParams::validate() const {
  if (!std::isfinite(chi)) throw std::invalid_argument("dispersive: chi must be finite");
  if (kappa <= 0.0) throw std::invalid_argument("dispersive: kappa must be > 0");
}

double chi_bare(double g_qr_mhz, double delta_qr_ghz, bool* dispersive_warning) {
  if (delta_qr_ghz == 0.0) throw std::invalid_argument("chi_bare: delta_qr = 0");
  if (dispersive_warning)
    *dispersive_warning = std::abs(delta_qr_ghz) < 10.0 * g_qr_mhz * 1e-3;
  double g = g_qr_mhz * 1e-3;  // GHz
  return g * g / delta_qr_ghz * 1e3;
}

double chi_eff(double chi_mhz, double delta_qc_ghz, double g_mhz) {
  if (g_mhz <= 0.0) throw std::invalid_argument("chi_eff: g must be > 0");
  double g = g_mhz * 1e-3;
  double x = delta_qc_ghz / 2.0 - std::sqrt(delta_qc_ghz * delta_qc_ghz / 4.0 + g * g);
  return 0.5 * chi_mhz * (1.0 - (-g * g + x * x) / (g * g + x * x));
}

double chi_eff_numeric(const CircuitSpec& circuit, double flux, int resonator_levels) {
  circuit.validate();
  if (resonator_levels < 2)
    throw std::invalid_argument("chi_eff_numeric: need at least 2 resonator levels");
  double wq = circuit.q1.max_frequency;
  double wc = coupler_frequency(circuit.coupler, flux);
  if (!circuit.resonator.dispersive_valid(wq) || !circuit.resonator.dispersive_valid(wc))
    throw std::invalid_argument("chi_eff_numeric: resonator too close to resonance");

  // dressed |1~> in the qubit-coupler system, from the mixing angle
  Basis b3 = make_basis(circuit, false);
  Eigen::MatrixXd h3 = build_hamiltonian(circuit, flux);
  std::vector<int> manifold = excitation_manifold(b3, 1);
  Eigen::MatrixXd block(manifold.size(), manifold.size());
  for (size_t i = 0; i < manifold.size(); ++i)
    for (size_t j = 0; j < manifold.size(); ++j)
      block(Eigen::Index(i), Eigen::Index(j)) = h3(manifold[i], manifold[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es3(block);

  Eigen::VectorXd target = Eigen::VectorXd::Zero(Eigen::Index(manifold.size()));
  int iq = -1, ic = -1;
  for (size_t i = 0; i < manifold.size(); ++i) {
    auto occ = b3.occupation(manifold[i]);
    if (occ[0] == 1 && occ[1] == 0 && occ[2] == 0) iq = int(i);
    if (occ[0] == 0 && occ[1] == 1 && occ[2] == 0) ic = int(i);
  }
  if (circuit.g_1c > 1e-6) {
    // |1~> carries qubit weight sin^2(theta); the coupler amplitude of the
    // eigenvector is -cos(theta) for the atan2 branch used here
    double theta = dressed_mixing_angle(wq - wc, circuit.g_1c);
    target[iq] = std::sin(theta);
    target[ic] = -std::cos(theta);
  } else {
    target[iq] = 1.0;  // no hybridization: |1~> is the bare qubit
  }
  int best = 0;
  double best_ov = -1.0;
  for (Eigen::Index k = 0; k < es3.eigenvectors().cols(); ++k) {
    double ov = std::abs(target.dot(es3.eigenvectors().col(k)));
    if (ov > best_ov) { best_ov = ov; best = int(k); }
  }
  Eigen::VectorXd dressed = es3.eigenvectors().col(best);

  // full system with the resonator
  Basis b4 = make_basis(circuit, true, resonator_levels);
  Eigen::MatrixXd h4 = build_hamiltonian(circuit, flux, true, resonator_levels);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es4(h4);

  auto dressed_energy = [&](int photons, bool excited) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(b4.dim);
    if (excited) {
      for (size_t i = 0; i < manifold.size(); ++i) {
        auto occ = b3.occupation(manifold[i]);
        occ.push_back(photons);
        t[b4.index(occ)] = dressed[Eigen::Index(i)];
      }
    } else {
      t[b4.index({0, 0, 0, photons})] = 1.0;
    }
    int bk = 0;
    double bo = -1.0;
    for (Eigen::Index k = 0; k < es4.eigenvectors().cols(); ++k) {
      double ov = std::abs(t.dot(es4.eigenvectors().col(k)));
      if (ov > bo) { bo = ov; bk = int(k); }
    }
    return es4.eigenvalues()[bk];
  };

  double pull0 = dressed_energy(1, false) - dressed_energy(0, false);
  double pull1 = dressed_energy(1, true) - dressed_energy(0, true);
  return (pull1 - pull0) / 2.0 * 1e3;  // MHz
}

std::vector<std::complex<double>> transmission_s21(const DispersiveParams& params,
                                                   int qubit_state,
                                                   const std::vector<double>& probe_grid_ghz,
                                                   double chi_eff_mhz) {
  params.validate();
  if (qubit_state != 0 && qubit_state != 1)
    throw std::invalid_argument("transmission_s21: qubit_state must be 0 or 1");
  double center = params.probe_frequency +
                  (qubit_state == 0 ? 1.0 : -1.0) * chi_eff_mhz * 1e-3;
  double half_kappa = params.kappa * 1e-3 / 2.0;
  std::vector<std::complex<double>> s21(probe_grid_ghz.size());
  for (size_t i = 0; i < probe_grid_ghz.size(); ++i) {
    std::complex<double> denom(half_kappa, probe_grid_ghz[i] - center);
    s21[i] = 1.0 - half_kappa / denom;
  }
  return s21;
}

double histogram_fidelity_analytic(double snr) {
  return 1.0 - 0.5 * std::erfc(snr / (2.0 * std::sqrt(2.0)));
}

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double uniform01(uint64_t bits) {  // open (0,1)
  return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

HistogramResult simulate_histogram(double snr, int shots, uint64_t seed) {
  if (shots < 1000) throw std::invalid_argument("simulate_histogram: shots < 1000");
  if (snr < 0.0) throw std::invalid_argument("simulate_histogram: snr must be >= 0");

  HistogramResult result;
  result.seed = seed;
  result.threshold = 0.0;
  result.iq_points.reserve(size_t(2 * shots));

  long errors = 0;
  for (int s = 0; s < 2; ++s) {
    double mean = (s == 0 ? -0.5 : 0.5) * snr;
    for (int i = 0; i < shots; ++i) {
      uint64_t ctr = (uint64_t(s) << 62) | uint64_t(i);
      double u1 = uniform01(splitmix64(seed ^ splitmix64(2 * ctr)));
      double u2 = uniform01(splitmix64(seed ^ splitmix64(2 * ctr + 1)));
      double r = std::sqrt(-2.0 * std::log(u1));
      IQPoint pt;
      pt.i = mean + r * std::cos(2.0 * M_PI * u2);
      pt.q = r * std::sin(2.0 * M_PI * u2);
      pt.true_state = s;
      pt.assigned_state = pt.i > result.threshold ? 1 : 0;
      if (pt.assigned_state != s) ++errors;
      result.iq_points.push_back(pt);
    }
  }
  result.assignment_fidelity = 1.0 - double(errors) / double(2 * shots);
  return result;
}

double coupler_readout_fidelity(double swap_transfer, double qubit_fidelity) {
  if (swap_transfer < 0.0 || swap_transfer > 1.0 || qubit_fidelity < 0.0 ||
      qubit_fidelity > 1.0)
    throw std::invalid_argument("coupler_readout_fidelity: inputs must be probabilities");
  return 0.5 + swap_transfer * (qubit_fidelity - 0.5);
}

}  // namespace aswap
