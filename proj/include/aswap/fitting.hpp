#pragma once

#include <functional>
#include <string>
#include <vector>

namespace aswap {

struct FitResult {
  std::string model_name;
  std::vector<std::string> parameter_names;
  std::vector<double> parameters;
  std::vector<double> uncertainties;  // one sigma
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> warnings;

  double parameter(const std::string& name) const;
  double uncertainty(const std::string& name) const;
};

/// Levenberg-Marquardt with numeric Jacobian; deterministic, 200-iteration cap.
FitResult levenberg_marquardt(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals,
    std::vector<double> initial, const std::vector<std::string>& names,
    const std::string& model_name);

/// A exp(-t/T) cos(2 pi f t + phi) + C
FitResult fit_damped_cosine(const std::vector<double>& x, const std::vector<double>& y);

/// A exp(-t/T) + C
FitResult fit_exponential(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace aswap
