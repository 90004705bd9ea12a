#include "aswap/fitting.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

namespace aswap {

double FitResult::parameter(const std::string& name) const {
  for (size_t i = 0; i < parameter_names.size(); ++i)
    if (parameter_names[i] == name) return parameters[i];
  throw std::out_of_range("fit: unknown parameter '" + name + "'");
}

double FitResult::uncertainty(const std::string& name) const {
  for (size_t i = 0; i < parameter_names.size(); ++i)
    if (parameter_names[i] == name) return uncertainties[i];
  throw std::out_of_range("fit: unknown parameter '" + name + "'");
}

namespace {

Eigen::MatrixXd numeric_jacobian(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals,
    const std::vector<double>& p, const std::vector<double>& r0) {
  const size_t np = p.size(), nr = r0.size();
  Eigen::MatrixXd J(nr, np);
  for (size_t j = 0; j < np; ++j) {
    double h = 1e-7 * (1.0 + std::abs(p[j]));
    auto pp = p;
    pp[j] += h;
    auto rp = residuals(pp);
    pp[j] = p[j] - h;
    auto rm = residuals(pp);
    for (size_t i = 0; i < nr; ++i) J(Eigen::Index(i), Eigen::Index(j)) = (rp[i] - rm[i]) / (2.0 * h);
  }
  return J;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

FitResult levenberg_marquardt(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals,
    std::vector<double> p, const std::vector<std::string>& names,
    const std::string& model_name) {
  FitResult fit;
  fit.model_name = model_name;
  fit.parameter_names = names;

  auto r = residuals(p);
  double cost = norm2(r);
  double lambda = 1e-3;
  const int max_iter = 200;
  bool ok = false;

  for (int iter = 0; iter < max_iter; ++iter) {
    fit.iterations = iter + 1;
    Eigen::MatrixXd J = numeric_jacobian(residuals, p, r);
    Eigen::VectorXd rv = Eigen::Map<Eigen::VectorXd>(r.data(), Eigen::Index(r.size()));
    Eigen::MatrixXd JtJ = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * rv;
    if (!JtJ.allFinite() || !g.allFinite()) break;

    bool accepted = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::MatrixXd A = JtJ;
      for (Eigen::Index k = 0; k < A.rows(); ++k)
        A(k, k) += lambda * std::max(JtJ(k, k), 1e-12);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
      if (ldlt.info() != Eigen::Success) { lambda *= 5.0; continue; }
      Eigen::VectorXd delta = ldlt.solve(-g);
      if (!delta.allFinite()) { lambda *= 5.0; continue; }
      std::vector<double> pn = p;
      for (size_t j = 0; j < p.size(); ++j) pn[j] += delta[Eigen::Index(j)];
      auto rn = residuals(pn);
      double cn = norm2(rn);
      if (std::isfinite(cn) && cn <= cost) {
        double pnorm = 0.0;
        for (double x : p) pnorm += x * x;
        bool small_step = delta.norm() < 1e-12 * (1.0 + std::sqrt(pnorm));
        bool small_gain = cost - cn < 1e-14 * (1.0 + cost);
        p = std::move(pn);
        r = std::move(rn);
        cost = cn;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (small_step || small_gain) ok = true;
        break;
      }
      lambda *= 5.0;
    }
    if (!accepted) { ok = cost < 1e-20; break; }
    if (ok) break;
  }

  fit.parameters = p;
  fit.residual_norm = std::sqrt(cost);
  fit.converged = ok && std::isfinite(cost);

  // covariance from J^T J at the solution
  fit.uncertainties.assign(p.size(), std::numeric_limits<double>::infinity());
  if (fit.converged && r.size() > p.size()) {
    Eigen::MatrixXd J = numeric_jacobian(residuals, p, r);
    // equilibrate columns so the inversion sees a correlation-like matrix
    // regardless of how differently the parameters are scaled
    Eigen::VectorXd scale(J.cols());
    bool degenerate = false;
    for (Eigen::Index j = 0; j < J.cols(); ++j) {
      double n = J.col(j).norm();
      if (n <= 0.0 || !std::isfinite(n)) degenerate = true;
      scale[j] = n;
    }
    if (!degenerate) {
      Eigen::MatrixXd Jn = J * scale.cwiseInverse().asDiagonal();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(Jn.transpose() * Jn);
      if (lu.isInvertible()) {
        double s2 = cost / double(r.size() - p.size());
        Eigen::MatrixXd cov = lu.inverse() * s2;
        for (size_t j = 0; j < p.size(); ++j) {
          double v = cov(Eigen::Index(j), Eigen::Index(j)) / (scale[Eigen::Index(j)] * scale[Eigen::Index(j)]);
          fit.uncertainties[j] = v >= 0 ? std::sqrt(v) : std::numeric_limits<double>::infinity();
        }
      } else {
        degenerate = true;
      }
    }
    if (degenerate) {
      fit.converged = false;
      fit.warnings.push_back("singular Jacobian");
    }
  }
  return fit;
}

namespace {

struct Spectrum {
  double frequency = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
};

// coarse DFT peak over the resolvable frequency band
Spectrum dft_peak(const std::vector<double>& x, const std::vector<double>& y, double mean) {
  const size_t n = x.size();
  double span = x.back() - x.front();
  Spectrum best;
  for (size_t k = 1; k < n; ++k) {
    double f = double(k) / (2.0 * span);  // half-bin grid up to Nyquist
    std::complex<double> s = 0.0;
    for (size_t i = 0; i < n; ++i)
      s += (y[i] - mean) * std::polar(1.0, -2.0 * M_PI * f * x[i]);
    if (std::abs(s) > best.amplitude) {
      best.amplitude = std::abs(s);
      best.frequency = f;
      best.phase = std::arg(s);
    }
  }
  best.amplitude *= 2.0 / double(n);
  return best;
}

}  // namespace

FitResult fit_damped_cosine(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 8)
    throw std::invalid_argument("fit_damped_cosine: need >= 8 points");
  double mean = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= double(y.size());
  const std::vector<std::string> names = {"amplitude", "decay_time", "frequency", "phase", "offset"};
  if (std::sqrt(var) < 1e-9 * (1.0 + std::abs(mean))) {
    FitResult flat;
    flat.model_name = "damped_cosine";
    flat.parameter_names = names;
    flat.parameters = {0.0, 0.0, 0.0, 0.0, mean};
    flat.uncertainties.assign(5, std::numeric_limits<double>::infinity());
    flat.converged = false;
    flat.warnings.push_back("constant input: frequency unidentifiable");
    return flat;
  }

  Spectrum pk = dft_peak(x, y, mean);
  double span = x.back() - x.front();
  std::vector<double> p0 = {pk.amplitude, 2.0 * span, pk.frequency, pk.phase, mean};

  auto model = [&](const std::vector<double>& p) {
    std::vector<double> r(x.size());
    for (size_t i = 0; i < x.size(); ++i)
      r[i] = p[0] * std::exp(-x[i] / p[1]) * std::cos(2.0 * M_PI * p[2] * x[i] + p[3]) + p[4] - y[i];
    return r;
  };
  FitResult fit = levenberg_marquardt(model, p0, names, "damped_cosine");
  // canonical form: positive amplitude and frequency
  if (fit.parameters[0] < 0) {
    fit.parameters[0] = -fit.parameters[0];
    fit.parameters[3] += M_PI;
  }
  if (fit.parameters[2] < 0) {
    fit.parameters[2] = -fit.parameters[2];
    fit.parameters[3] = -fit.parameters[3];
  }
  fit.parameters[3] = std::remainder(fit.parameters[3], 2.0 * M_PI);
  return fit;
}

FitResult fit_exponential(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 8)
    throw std::invalid_argument("fit_exponential: need >= 8 points");
  const std::vector<std::string> names = {"amplitude", "decay_time", "offset"};
  double c0 = y.back();
  double a0 = y.front() - c0;
  if (std::abs(a0) < 1e-9 * (1.0 + std::abs(c0))) {
    FitResult flat;
    flat.model_name = "exponential";
    flat.parameter_names = names;
    flat.parameters = {0.0, 0.0, c0};
    flat.uncertainties.assign(3, std::numeric_limits<double>::infinity());
    flat.converged = false;
    flat.warnings.push_back("no decay visible");
    return flat;
  }

  // log-linear slope from points still well above the baseline
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int np = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double d = (y[i] - c0) / a0;
    if (d > 0.05) {
      double ly = std::log(d);
      sx += x[i]; sy += ly; sxx += x[i] * x[i]; sxy += x[i] * ly;
      ++np;
    }
  }
  double t0 = x.back() - x.front();
  if (np >= 3) {
    double slope = (double(np) * sxy - sx * sy) / (double(np) * sxx - sx * sx);
    if (slope < -1e-12) t0 = -1.0 / slope;
  }

  auto model = [&](const std::vector<double>& p) {
    std::vector<double> r(x.size());
    for (size_t i = 0; i < x.size(); ++i)
      r[i] = p[0] * std::exp(-x[i] / p[1]) + p[2] - y[i];
    return r;
  };
  return levenberg_marquardt(model, {a0, t0, c0}, names, "exponential");
}

}  // namespace aswap
