#include "aswap/config.hpp"

#include <yaml-cpp/yaml.h>

#include <set>
#include <sstream>
#include <stdexcept>

#include "aswap/csv.hpp"

namespace aswap {

std::vector<double> GridSpec::values() const {
  if (points < 1) throw std::invalid_argument("grid: points must be >= 1");
  if (points == 1) return {min};
  std::vector<double> v(size_t(points), 0.0);
  for (int i = 0; i < points; ++i)
    v[size_t(i)] = min + (max - min) * double(i) / double(points - 1);
  return v;
}

void RunConfig::validate() const {
  circuit.validate();
  if (distortion) distortion->validate();
  if (predistortion) predistortion->validate();
  lindblad.validate();
  if (design_filter && !distortion)
    throw std::invalid_argument("config: design_filter requires a distortion model");
  if (design_filter && predistortion)
    throw std::invalid_argument("config: give either design_filter or explicit predistortion sections");
  if (histogram.shots < 1000) throw std::invalid_argument("config: histogram.shots must be >= 1000");
}

RunConfig default_config() {
  RunConfig c;
  c.circuit = default_circuit();
  c.distortion = DistortionModel{{{0.05, 800.0}}, 1.0};
  c.lindblad.element_rates["c"] = {10000.0, 4000.0};
  return c;
}

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
  std::ostringstream os;
  os << "config: " << message;
  if (node.Mark().line >= 0) os << " (line " << node.Mark().line + 1 << ")";
  throw std::runtime_error(os.str());
}

void check_keys(const YAML::Node& node, const std::string& scope,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(node, "expected a map at '" + scope + "'");
  for (const auto& kv : node) {
    std::string key = kv.first.as<std::string>();
    if (!allowed.count(key))
      fail(kv.first, "unknown key '" + scope + "." + key + "'");
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (!node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    fail(node[key], std::string("bad value for '") + key + "'");
  }
}

void read_transmon(const YAML::Node& node, const std::string& scope, TransmonSpec& t) {
  if (!node) return;
  check_keys(node, scope, {"frequency", "max_frequency", "anharmonicity", "flux_period"});
  read(node, "frequency", t.max_frequency);
  read(node, "max_frequency", t.max_frequency);
  read(node, "anharmonicity", t.anharmonicity);
  read(node, "flux_period", t.flux_period);
}

void read_grid(const YAML::Node& node, const std::string& scope, GridSpec& g) {
  if (!node) return;
  check_keys(node, scope, {"min", "max", "points"});
  read(node, "min", g.min);
  read(node, "max", g.max);
  read(node, "points", g.points);
}

void read_ramsey_options(const YAML::Node& node, const std::string& scope,
                         DistortionRamseyOptions& o) {
  if (!node) return;
  check_keys(node, scope,
             {"pre_pulse_amplitude", "pre_pulse_duration", "hold_frequency", "edge_ns",
              "hold_ns", "edge_shape", "sample_period", "slope_threshold"});
  read(node, "pre_pulse_amplitude", o.pre_pulse_amplitude);
  read(node, "pre_pulse_duration", o.pre_pulse_duration);
  read(node, "hold_frequency", o.hold_frequency);
  read(node, "edge_ns", o.edge_ns);
  read(node, "hold_ns", o.hold_ns);
  read(node, "sample_period", o.sample_period);
  read(node, "slope_threshold", o.slope_threshold);
  if (node["edge_shape"]) o.edge_shape = edge_shape_from_string(node["edge_shape"].as<std::string>());
}

}  // namespace

RunConfig load_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw std::runtime_error("config: cannot open '" + path + "'");
  } catch (const YAML::ParserException& e) {
    throw std::runtime_error(std::string("config: parse error: ") + e.what());
  }

  RunConfig c = default_config();
  check_keys(root, "",
             {"circuit", "distortion", "predistortion", "lindblad", "seed", "output_dir",
              "coarse_scan", "spectroscopy", "aswap", "rabi", "t1", "ramsey",
              "distortion_calib", "chi_scan", "histogram"});

  if (auto n = root["circuit"]) {
    check_keys(n, "circuit",
               {"q1", "q2", "coupler", "g_1c", "g_2c", "g_12", "resonator", "levels_per_element"});
    read_transmon(n["q1"], "circuit.q1", c.circuit.q1);
    read_transmon(n["q2"], "circuit.q2", c.circuit.q2);
    read_transmon(n["coupler"], "circuit.coupler", c.circuit.coupler);
    read(n, "g_1c", c.circuit.g_1c);
    read(n, "g_2c", c.circuit.g_2c);
    read(n, "g_12", c.circuit.g_12);
    read(n, "levels_per_element", c.circuit.levels_per_element);
    if (auto r = n["resonator"]) {
      check_keys(r, "circuit.resonator", {"frequency", "linewidth", "qubit_coupling"});
      read(r, "frequency", c.circuit.resonator.frequency);
      read(r, "linewidth", c.circuit.resonator.linewidth);
      read(r, "qubit_coupling", c.circuit.resonator.qubit_coupling);
    }
  }

  if (auto n = root["distortion"]) {
    if (n.IsNull()) {
      c.distortion.reset();
    } else {
      check_keys(n, "distortion", {"dc_gain", "terms"});
      DistortionModel m;
      read(n, "dc_gain", m.dc_gain);
      if (auto terms = n["terms"]) {
        if (!terms.IsSequence()) fail(terms, "'distortion.terms' must be a sequence");
        for (const auto& t : terms) {
          check_keys(t, "distortion.terms[]", {"amplitude", "time_constant"});
          DistortionModel::Term term;
          read(t, "amplitude", term.amplitude);
          read(t, "time_constant", term.time_constant);
          m.terms.push_back(term);
        }
      }
      c.distortion = m;
    }
  }

  if (auto n = root["predistortion"]) {
    check_keys(n, "predistortion", {"design_from_model", "sample_period", "sections"});
    read(n, "design_from_model", c.design_filter);
    if (auto secs = n["sections"]) {
      if (!secs.IsSequence()) fail(secs, "'predistortion.sections' must be a sequence");
      PredistortionFilter f;
      read(n, "sample_period", f.sample_period);
      for (const auto& s : secs) {
        check_keys(s, "predistortion.sections[]", {"b0", "b1", "a1"});
        PredistortionFilter::Section sec;
        read(s, "b0", sec.b0);
        read(s, "b1", sec.b1);
        read(s, "a1", sec.a1);
        f.sections.push_back(sec);
      }
      c.predistortion = f;
    }
  }

  if (auto n = root["lindblad"]) {
    c.lindblad.element_rates.clear();
    for (const auto& kv : n) {
      std::string name = kv.first.as<std::string>();
      if (name != "q1" && name != "c" && name != "q2")
        fail(kv.first, "unknown lindblad element '" + name + "'");
      check_keys(kv.second, "lindblad." + name, {"t1", "t_phi"});
      LindbladSpec::Rates r;
      read(kv.second, "t1", r.t1);
      read(kv.second, "t_phi", r.t_phi);
      c.lindblad.element_rates[name] = r;
    }
  }

  read(root, "seed", c.seed);
  read(root, "output_dir", c.output_dir);

  if (auto n = root["coarse_scan"]) {
    check_keys(n, "coarse_scan", {"flux"});
    read_grid(n["flux"], "coarse_scan.flux", c.coarse_scan.flux);
  }
  if (auto n = root["spectroscopy"]) {
    check_keys(n, "spectroscopy", {"flux", "frequency", "time_domain"});
    read_grid(n["flux"], "spectroscopy.flux", c.spectroscopy.flux);
    read_grid(n["frequency"], "spectroscopy.frequency", c.spectroscopy.frequency);
    read(n, "time_domain", c.spectroscopy.time_domain);
  }
  if (auto n = root["aswap"]) {
    check_keys(n, "aswap", {"edge_ns", "edge_shape", "span_ghz"});
    read(n, "edge_ns", c.aswap.edge_ns);
    read(n, "edge_shape", c.aswap.edge_shape);
    read(n, "span_ghz", c.aswap.span_ghz);
  }
  if (auto n = root["rabi"]) {
    check_keys(n, "rabi", {"amplitude_mhz", "duration"});
    read(n, "amplitude_mhz", c.rabi.amplitude_mhz);
    read_grid(n["duration"], "rabi.duration", c.rabi.duration);
  }
  if (auto n = root["t1"]) {
    check_keys(n, "t1", {"delay"});
    read_grid(n["delay"], "t1.delay", c.t1.delay);
  }
  if (auto n = root["ramsey"]) {
    check_keys(n, "ramsey", {"detuning_mhz", "delay"});
    read(n, "detuning_mhz", c.ramsey.detuning_mhz);
    read_grid(n["delay"], "ramsey.delay", c.ramsey.delay);
  }
  if (auto n = root["distortion_calib"]) {
    check_keys(n, "distortion_calib", {"tau_delay", "options"});
    read_grid(n["tau_delay"], "distortion_calib.tau_delay", c.distortion_calib.tau_delay);
    read_ramsey_options(n["options"], "distortion_calib.options", c.distortion_calib.options);
  }
  if (auto n = root["chi_scan"]) {
    check_keys(n, "chi_scan", {"chi_mhz", "delta_qc", "with_numeric"});
    read(n, "chi_mhz", c.chi_scan.chi_mhz);
    read_grid(n["delta_qc"], "chi_scan.delta_qc", c.chi_scan.delta_qc);
    read(n, "with_numeric", c.chi_scan.with_numeric);
  }
  if (auto n = root["histogram"]) {
    check_keys(n, "histogram", {"snr", "shots"});
    read(n, "snr", c.histogram.snr);
    read(n, "shots", c.histogram.shots);
  }

  c.validate();
  return c;
}

namespace {

void dump_transmon(std::ostringstream& os, const char* name, const TransmonSpec& t) {
  os << name << ':' << format_double(t.max_frequency) << ',' << format_double(t.anharmonicity)
     << ',' << (t.flux_tunable ? 1 : 0) << ',' << format_double(t.flux_period) << '\n';
}

void dump_grid(std::ostringstream& os, const char* name, const GridSpec& g) {
  os << name << ':' << format_double(g.min) << ',' << format_double(g.max) << ',' << g.points
     << '\n';
}

}  // namespace

std::string canonical_dump(const RunConfig& c) {
  std::ostringstream os;
  dump_transmon(os, "q1", c.circuit.q1);
  dump_transmon(os, "q2", c.circuit.q2);
  dump_transmon(os, "coupler", c.circuit.coupler);
  os << "g:" << format_double(c.circuit.g_1c) << ',' << format_double(c.circuit.g_2c) << ','
     << format_double(c.circuit.g_12) << '\n';
  os << "resonator:" << format_double(c.circuit.resonator.frequency) << ','
     << format_double(c.circuit.resonator.linewidth) << ','
     << format_double(c.circuit.resonator.qubit_coupling) << '\n';
  os << "levels:" << c.circuit.levels_per_element << '\n';
  if (c.distortion) {
    os << "distortion:" << format_double(c.distortion->dc_gain);
    for (const auto& t : c.distortion->terms)
      os << ',' << format_double(t.amplitude) << ':' << format_double(t.time_constant);
    os << '\n';
  }
  os << "design_filter:" << (c.design_filter ? 1 : 0) << '\n';
  if (c.predistortion) {
    os << "predistortion:" << format_double(c.predistortion->sample_period);
    for (const auto& s : c.predistortion->sections)
      os << ',' << format_double(s.b0) << ':' << format_double(s.b1) << ':' << format_double(s.a1);
    os << '\n';
  }
  for (const auto& [name, r] : c.lindblad.element_rates)
    os << "lindblad." << name << ':' << format_double(r.t1) << ',' << format_double(r.t_phi)
       << '\n';
  os << "seed:" << c.seed << '\n';
  dump_grid(os, "coarse_scan.flux", c.coarse_scan.flux);
  dump_grid(os, "spectroscopy.flux", c.spectroscopy.flux);
  dump_grid(os, "spectroscopy.frequency", c.spectroscopy.frequency);
  os << "spectroscopy.time_domain:" << (c.spectroscopy.time_domain ? 1 : 0) << '\n';
  os << "aswap:" << format_double(c.aswap.edge_ns) << ',' << c.aswap.edge_shape << ','
     << format_double(c.aswap.span_ghz) << '\n';
  os << "rabi:" << format_double(c.rabi.amplitude_mhz) << '\n';
  dump_grid(os, "rabi.duration", c.rabi.duration);
  dump_grid(os, "t1.delay", c.t1.delay);
  os << "ramsey:" << format_double(c.ramsey.detuning_mhz) << '\n';
  dump_grid(os, "ramsey.delay", c.ramsey.delay);
  dump_grid(os, "distortion_calib.tau_delay", c.distortion_calib.tau_delay);
  const auto& o = c.distortion_calib.options;
  os << "distortion_calib.options:" << format_double(o.pre_pulse_amplitude) << ','
     << format_double(o.pre_pulse_duration) << ',' << format_double(o.hold_frequency) << ','
     << format_double(o.edge_ns) << ',' << format_double(o.hold_ns) << ','
     << to_string(o.edge_shape) << ',' << format_double(o.sample_period) << ','
     << format_double(o.slope_threshold) << '\n';
  os << "chi_scan:" << format_double(c.chi_scan.chi_mhz) << ','
     << (c.chi_scan.with_numeric ? 1 : 0) << '\n';
  dump_grid(os, "chi_scan.delta_qc", c.chi_scan.delta_qc);
  os << "histogram:" << format_double(c.histogram.snr) << ',' << c.histogram.shots << '\n';
  return os.str();
}

std::string config_hash(const RunConfig& config) {
  std::string dump = canonical_dump(config);
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace aswap
