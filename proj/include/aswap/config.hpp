#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aswap/circuit.hpp"
#include "aswap/dynamics.hpp"
#include "aswap/protocols.hpp"
#include "aswap/pulse.hpp"

namespace aswap {

struct GridSpec {
  double min = 0.0;
  double max = 1.0;
  int points = 101;

  std::vector<double> values() const;
};

struct CoarseScanParams {
  GridSpec flux{0.0, 0.45, 201};
};

struct SpectroscopyParams {
  GridSpec flux{0.25, 0.42, 41};
  GridSpec frequency{3.9, 5.6, 121};  // GHz
  bool time_domain = false;
};

struct AswapParams {
  double edge_ns = 50.0;
  std::string edge_shape = "cosine";
  double span_ghz = 0.7;  // +/- around the q1 anticrossing
};

struct RabiParams {
  double amplitude_mhz = 10.0;
  GridSpec duration{0.0, 400.0, 81};  // ns
};

struct T1Params {
  GridSpec delay{0.0, 30000.0, 61};  // ns
};

struct RamseyParams {
  double detuning_mhz = 2.0;
  GridSpec delay{0.0, 2000.0, 81};  // ns
};

struct DistortionCalibParams {
  GridSpec tau_delay{0.0, 2400.0, 9};  // ns
  DistortionRamseyOptions options;
};

struct ChiScanParams {
  double chi_mhz = -0.45;      // bare dispersive shift fed to the closed form
  GridSpec delta_qc{-0.7, 0.7, 29};  // GHz
  bool with_numeric = true;
};

struct HistogramParams {
  double snr = 2.43;
  int shots = 100000;
};

struct RunConfig {
  CircuitSpec circuit;
  std::optional<DistortionModel> distortion;
  bool design_filter = false;  // derive the predistortion filter from the model
  std::optional<PredistortionFilter> predistortion;  // explicit sections
  LindbladSpec lindblad;
  uint64_t seed = 1;
  std::string output_dir = "out";

  CoarseScanParams coarse_scan;
  SpectroscopyParams spectroscopy;
  AswapParams aswap;
  RabiParams rabi;
  T1Params t1;
  RamseyParams ramsey;
  DistortionCalibParams distortion_calib;
  ChiScanParams chi_scan;
  HistogramParams histogram;

  void validate() const;
};

/// Defaults reproduce the bundled fixture circuit end-to-end.
RunConfig default_config();

/// Strict YAML load: unknown keys are an error with line diagnostics.
RunConfig load_config(const std::string& path);

/// Deterministic canonical serialization (independent of the input layout).
std::string canonical_dump(const RunConfig& config);

/// FNV-1a hash of the canonical dump (includes the seed), as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace aswap
