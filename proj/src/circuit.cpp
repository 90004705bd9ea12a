#include "aswap/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aswap {

void TransmonSpec::validate() const {
  if (max_frequency <= 0.0) throw std::invalid_argument("transmon: max_frequency must be > 0");
  if (anharmonicity > 0.0) throw std::invalid_argument("transmon: anharmonicity must be <= 0");
  if (flux_period <= 0.0) throw std::invalid_argument("transmon: flux_period must be > 0");
}

void ResonatorSpec::validate() const {
  if (frequency <= 0.0) throw std::invalid_argument("resonator: frequency must be > 0");
  if (linewidth <= 0.0) throw std::invalid_argument("resonator: linewidth must be > 0");
  if (qubit_coupling < 0.0) throw std::invalid_argument("resonator: qubit_coupling must be >= 0");
}

bool ResonatorSpec::dispersive_valid(double qubit_frequency) const {
  return std::abs(frequency - qubit_frequency) >= 10.0 * qubit_coupling;
}

void CircuitSpec::validate() const {
  q1.validate();
  q2.validate();
  coupler.validate();
  resonator.validate();
  if (g_1c <= 0.0 || g_2c <= 0.0) throw std::invalid_argument("circuit: g_1c and g_2c must be > 0");
  if (g_12 < 0.0) throw std::invalid_argument("circuit: g_12 must be >= 0");
  if (q1.flux_tunable || q2.flux_tunable) throw std::invalid_argument("circuit: q1 and q2 must be flux-insensitive");
  if (!coupler.flux_tunable) throw std::invalid_argument("circuit: coupler must be flux-tunable");
  if (levels_per_element != 2 && levels_per_element != 3)
    throw std::invalid_argument("circuit: levels_per_element must be 2 or 3");
}

int Basis::index(const std::vector<int>& occupation) const {
  int idx = 0;
  for (size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + occupation[k];
  return idx;
}

std::vector<int> Basis::occupation(int index) const {
  std::vector<int> occ(dims.size());
  for (int k = int(dims.size()) - 1; k >= 0; --k) {
    occ[k] = index % dims[k];
    index /= dims[k];
  }
  return occ;
}

int Basis::total_excitation(int index) const {
  auto occ = occupation(index);
  return std::accumulate(occ.begin(), occ.end(), 0);
}

std::string Basis::label(int index) const {
  auto occ = occupation(index);
  std::string s = "|";
  for (int n : occ) s += std::to_string(n);
  return s + ">";
}

int Basis::element(const std::string& name) const {
  for (size_t k = 0; k < element_names.size(); ++k)
    if (element_names[k] == name) return int(k);
  throw std::invalid_argument("basis: unknown element '" + name + "'");
}

Basis make_basis(const CircuitSpec& circuit, bool include_resonator, int resonator_levels) {
  Basis b;
  b.element_names = {"q1", "c", "q2"};
  b.dims = {circuit.levels_per_element, circuit.levels_per_element, circuit.levels_per_element};
  if (include_resonator) {
    b.element_names.push_back("r");
    b.dims.push_back(resonator_levels);
  }
  b.dim = 1;
  for (int d : b.dims) b.dim *= d;
  return b;
}

double coupler_frequency(const TransmonSpec& spec, double flux) {
  if (!spec.flux_tunable) throw std::domain_error("coupler_frequency: element is not flux-tunable");
  if (std::abs(flux) >= spec.flux_period / 2.0)
    throw std::domain_error("coupler_frequency: flux outside the principal branch");
  return spec.max_frequency * std::sqrt(std::abs(std::cos(M_PI * flux / spec.flux_period)));
}

double coupler_flux_for_frequency(const TransmonSpec& spec, double frequency) {
  if (!spec.flux_tunable) throw std::domain_error("coupler_flux_for_frequency: not flux-tunable");
  if (frequency <= 0.0 || frequency > spec.max_frequency)
    throw std::domain_error("coupler_flux_for_frequency: frequency outside (0, max]");
  double r = frequency / spec.max_frequency;
  return spec.flux_period / M_PI * std::acos(r * r);
}

double coupler_frequency_slope(const TransmonSpec& spec, double flux) {
  if (!spec.flux_tunable) return 0.0;
  double x = M_PI * flux / spec.flux_period;
  double c = std::cos(x);
  if (std::abs(c) < 1e-12) throw std::domain_error("coupler_frequency_slope: singular at half flux quantum");
  double sign = c > 0 ? 1.0 : -1.0;
  // d/dflux wmax*sqrt(|cos x|) = -wmax * pi/period * sign * sin(x) / (2 sqrt(|cos|))
  return -spec.max_frequency * M_PI / spec.flux_period * sign * std::sin(x) /
         (2.0 * std::sqrt(std::abs(c)));
}

double element_frequency(const TransmonSpec& spec, double flux) {
  return spec.flux_tunable ? coupler_frequency(spec, flux) : spec.max_frequency;
}

Eigen::MatrixXd build_hamiltonian(const CircuitSpec& circuit, double flux,
                                  bool include_resonator, int resonator_levels) {
  circuit.validate();
  Basis basis = make_basis(circuit, include_resonator, resonator_levels);
  const int ne = int(basis.dims.size());
  std::vector<double> freq = {element_frequency(circuit.q1, flux),
                              element_frequency(circuit.coupler, flux),
                              element_frequency(circuit.q2, flux)};
  std::vector<double> anh = {circuit.q1.anharmonicity, circuit.coupler.anharmonicity,
                             circuit.q2.anharmonicity};
  if (include_resonator) {
    freq.push_back(circuit.resonator.frequency);
    anh.push_back(0.0);
  }

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(basis.dim, basis.dim);
  for (int i = 0; i < basis.dim; ++i) {
    auto occ = basis.occupation(i);
    double e = 0.0;
    for (int k = 0; k < ne; ++k)
      e += freq[k] * occ[k] + 0.5 * anh[k] * occ[k] * (occ[k] - 1);
    H(i, i) = e;
  }

  // exchange couplings: pairs (element a, element b, g)
  struct Pair { int a, b; double g; };
  std::vector<Pair> pairs = {{0, 1, circuit.g_1c}, {1, 2, circuit.g_2c}, {0, 2, circuit.g_12}};
  if (include_resonator) pairs.push_back({0, 3, circuit.resonator.qubit_coupling});

  for (const auto& p : pairs) {
    if (p.g == 0.0) continue;
    for (int i = 0; i < basis.dim; ++i) {
      auto occ = basis.occupation(i);
      // a_a^dag a_b |occ>
      if (occ[p.a] + 1 < basis.dims[p.a] && occ[p.b] - 1 >= 0) {
        auto occ2 = occ;
        occ2[p.a] += 1;
        occ2[p.b] -= 1;
        int j = basis.index(occ2);
        double amp = p.g * std::sqrt(double(occ[p.a] + 1) * double(occ[p.b]));
        H(j, i) += amp;
        H(i, j) += amp;
      }
    }
  }
  return H;
}

std::vector<int> excitation_manifold(const Basis& basis, int n) {
  std::vector<int> idx;
  for (int i = 0; i < basis.dim; ++i)
    if (basis.total_excitation(i) == n) idx.push_back(i);
  return idx;
}

SpectrumScan eigenspectrum(const CircuitSpec& circuit, const std::vector<double>& flux_grid) {
  if (flux_grid.empty()) throw std::invalid_argument("eigenspectrum: empty flux grid");
  Basis basis = make_basis(circuit, false);
  std::vector<int> manifold = excitation_manifold(basis, 1);
  const int m = int(manifold.size());

  SpectrumScan scan;
  scan.flux_grid = flux_grid;
  scan.branches.reserve(flux_grid.size());
  scan.bare_labels.reserve(flux_grid.size());
  scan.tie_flagged.reserve(flux_grid.size());

  for (double flux : flux_grid) {
    Eigen::MatrixXd H = build_hamiltonian(circuit, flux);
    Eigen::MatrixXd Hm(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) Hm(a, b) = H(manifold[a], manifold[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hm);
    scan.branches.push_back(es.eigenvalues());

    // bare label of manifold state a = the excited element
    std::vector<std::string> bare_names(m);
    for (int a = 0; a < m; ++a) {
      auto occ = basis.occupation(manifold[a]);
      for (size_t k = 0; k < occ.size(); ++k)
        if (occ[k] == 1) bare_names[a] = basis.element_names[k];
    }
    std::vector<std::string> labels(m);
    bool tie = false;
    for (int b = 0; b < m; ++b) {
      Eigen::VectorXd w = es.eigenvectors().col(b).cwiseAbs2();
      int best = 0;
      for (int a = 1; a < m; ++a) {
        if (w[a] > w[best] + 1e-12) best = a;
        else if (std::abs(w[a] - w[best]) <= 1e-12 && w[a] > 0.25) tie = true;
      }
      labels[b] = bare_names[best];
    }
    scan.bare_labels.push_back(std::move(labels));
    scan.tie_flagged.push_back(tie);
  }
  return scan;
}

std::vector<Anticrossing> locate_anticrossings(const SpectrumScan& scan) {
  std::vector<Anticrossing> out;
  const int nb = scan.branch_count();
  const int nf = int(scan.flux_grid.size());
  for (int b = 0; b + 1 < nb; ++b) {
    for (int i = 1; i + 1 < nf; ++i) {
      auto gap_at = [&](int k) { return scan.branches[k][b + 1] - scan.branches[k][b]; };
      double g0 = gap_at(i - 1), g1 = gap_at(i), g2 = gap_at(i + 1);
      if (g1 < g0 && g1 < g2) {
        // parabolic refinement through the three points
        double x0 = scan.flux_grid[i - 1], x1 = scan.flux_grid[i], x2 = scan.flux_grid[i + 1];
        double d1 = (g2 - g0) / (x2 - x0);
        double d2 = ((g2 - g1) / (x2 - x1) - (g1 - g0) / (x1 - x0)) / (0.5 * (x2 - x0));
        Anticrossing ac;
        if (d2 > 0) {
          double dx = -d1 / d2;
          ac.flux = x1 + dx;
          ac.gap = g1 + d1 * dx + 0.5 * d2 * dx * dx;
        } else {
          ac.flux = x1;
          ac.gap = g1;
        }
        ac.lower_branch = b;
        out.push_back(ac);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.flux < b.flux; });
  return out;
}

double dressed_mixing_angle(double delta_qc, double g) {
  if (g <= 0.0) throw std::domain_error("dressed_mixing_angle: g must be > 0");
  double x = delta_qc / 2.0 - std::sqrt(delta_qc * delta_qc / 4.0 + g * g);
  return std::atan2(g, x);
}

}  // namespace aswap
