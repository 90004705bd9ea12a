#pragma once

#include <string>
#include <vector>

namespace aswap {

enum class EdgeShape { Cosine, Linear, Step };

EdgeShape edge_shape_from_string(const std::string& name);
std::string to_string(EdgeShape shape);

struct Segment {
  std::string name;   // "rise", "hold", "fall"
  size_t begin = 0;   // inclusive sample index
  size_t end = 0;     // exclusive
};

/// Sampled flux waveform. samples[i] is the flux at t = i * sample_period.
struct FluxPulse {
  double sample_period = 0.5;  // ns
  std::vector<double> samples;
  std::vector<Segment> segments;

  double duration() const { return double(samples.size()) * sample_period; }
  const Segment* segment(const std::string& name) const;
  void validate() const;
};

/// Step-response distortion model: h(t) = dc_gain * (1 + sum a_k exp(-t/tau_k)).
struct DistortionModel {
  struct Term {
    double amplitude = 0.0;      // dimensionless
    double time_constant = 0.0;  // ns
  };
  std::vector<Term> terms;
  double dc_gain = 1.0;

  void validate() const;
  double step_response(double t) const;  // t >= 0
  double max_time_constant() const;
};

/// Cascade of first-order rational sections y[n] = b0 x[n] + b1 x[n-1] + a1 y[n-1].
struct PredistortionFilter {
  struct Section {
    double b0 = 1.0, b1 = 0.0, a1 = 0.0;
  };
  std::vector<Section> sections;
  double sample_period = 0.5;  // ns

  void validate() const;
  std::vector<double> apply(const std::vector<double>& x) const;
  FluxPulse apply(const FluxPulse& pulse) const;
};

/// Flattop pulse flux_low -> flux_high -> flux_low with shaped edges.
FluxPulse make_flattop(double flux_low, double flux_high, double rise, double hold,
                       double fall, EdgeShape edge_shape, double sample_period);

/// LTI response whose step response is exactly the model's, extended past the
/// input by 5x the longest time constant.
FluxPulse apply_distortion(const FluxPulse& pulse, const DistortionModel& model);

/// Exact discrete-time inverse of the distortion on the sample grid.
PredistortionFilter design_predistortion(const DistortionModel& model, double sample_period);

struct CorrectionReport {
  double max_abs_error = 0.0;
  double settling_time = 0.0;  // ns; first time after which |error| stays < 1e-4
  bool settled = false;
};

CorrectionReport verify_correction(const DistortionModel& model,
                                   const PredistortionFilter& filter,
                                   const FluxPulse& probe);

}  // namespace aswap
