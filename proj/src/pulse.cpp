#include "aswap/pulse.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace aswap {

EdgeShape edge_shape_from_string(const std::string& name) {
  if (name == "cosine") return EdgeShape::Cosine;
  if (name == "linear") return EdgeShape::Linear;
  if (name == "step") return EdgeShape::Step;
  throw std::invalid_argument("unknown edge shape '" + name + "'");
}

std::string to_string(EdgeShape shape) {
  switch (shape) {
    case EdgeShape::Cosine: return "cosine";
    case EdgeShape::Linear: return "linear";
    default: return "step";
  }
}

const Segment* FluxPulse::segment(const std::string& name) const {
  for (const auto& s : segments)
    if (s.name == name) return &s;
  return nullptr;
}

void FluxPulse::validate() const {
  if (sample_period <= 0.0) throw std::invalid_argument("pulse: sample_period must be > 0");
  if (samples.empty()) throw std::invalid_argument("pulse: no samples");
  size_t prev_end = 0;
  for (const auto& s : segments) {
    if (s.begin < prev_end || s.end < s.begin || s.end > samples.size())
      throw std::invalid_argument("pulse: segment markers overlap or out of bounds");
    prev_end = s.end;
  }
}

void DistortionModel::validate() const {
  for (const auto& t : terms)
    if (t.time_constant <= 0.0)
      throw std::invalid_argument("distortion: time constants must be > 0");
  // step response must stay positive; check at t=0 and asymptotically
  if (step_response(0.0) <= 0.0 || dc_gain <= 0.0)
    throw std::invalid_argument("distortion: step response not positive");
}

double DistortionModel::step_response(double t) const {
  double h = 1.0;
  for (const auto& term : terms) h += term.amplitude * std::exp(-t / term.time_constant);
  return dc_gain * h;
}

double DistortionModel::max_time_constant() const {
  double m = 0.0;
  for (const auto& t : terms) m = std::max(m, t.time_constant);
  return m;
}

void PredistortionFilter::validate() const {
  for (const auto& s : sections)
    if (std::abs(s.a1) >= 1.0)
      throw std::invalid_argument("predistortion: unstable section (|a1| >= 1)");
}

std::vector<double> PredistortionFilter::apply(const std::vector<double>& x) const {
  validate();
  std::vector<double> y = x;
  for (const auto& s : sections) {
    double xp = 0.0, yp = 0.0;
    for (double& v : y) {
      double xn = v;
      v = s.b0 * xn + s.b1 * xp + s.a1 * yp;
      xp = xn;
      yp = v;
    }
  }
  return y;
}

FluxPulse PredistortionFilter::apply(const FluxPulse& pulse) const {
  if (std::abs(pulse.sample_period - sample_period) > 1e-12)
    throw std::invalid_argument("predistortion: sample period mismatch");
  FluxPulse out = pulse;
  out.samples = apply(pulse.samples);
  return out;
}

namespace {

double edge_value(EdgeShape shape, double s) {
  switch (shape) {
    case EdgeShape::Cosine: return 0.5 * (1.0 - std::cos(M_PI * s));
    case EdgeShape::Linear: return s;
    default: return s >= 1.0 ? 1.0 : 0.0;
  }
}

size_t duration_samples(double duration, double dt, const char* what) {
  double n = duration / dt;
  size_t ni = size_t(std::llround(n));
  if (std::abs(double(ni) * dt - duration) > dt * (1.0 + 1e-9))
    throw std::invalid_argument(std::string("make_flattop: sample_period does not divide ") + what);
  return ni;
}

}  // namespace

FluxPulse make_flattop(double flux_low, double flux_high, double rise, double hold,
                       double fall, EdgeShape edge_shape, double sample_period) {
  if (rise < 0 || fall < 0) throw std::invalid_argument("make_flattop: negative edge duration");
  if (hold <= 0) throw std::invalid_argument("make_flattop: hold must be > 0");
  if (sample_period <= 0) throw std::invalid_argument("make_flattop: sample_period must be > 0");

  size_t nr = duration_samples(rise, sample_period, "rise");
  size_t nh = duration_samples(hold, sample_period, "hold");
  size_t nf = duration_samples(fall, sample_period, "fall");
  if (nh < 1) throw std::invalid_argument("make_flattop: hold shorter than one sample");
  if (edge_shape == EdgeShape::Step) nr = nf = 0;

  FluxPulse p;
  p.sample_period = sample_period;
  double span = flux_high - flux_low;

  // rise: interpolates from flux_low; a zero-length edge becomes a single
  // flux_low sample so the pulse starts and ends at flux_low.
  size_t rise_begin = 0;
  if (nr == 0) {
    p.samples.push_back(flux_low);
  } else {
    for (size_t i = 0; i < nr; ++i)
      p.samples.push_back(flux_low + span * edge_value(edge_shape, double(i) * sample_period / rise));
  }
  size_t hold_begin = p.samples.size();
  for (size_t i = 0; i < nh; ++i) p.samples.push_back(flux_high);
  size_t fall_begin = p.samples.size();
  if (nf == 0) {
    p.samples.push_back(flux_low);
  } else {
    for (size_t i = 1; i <= nf; ++i)
      p.samples.push_back(flux_high - span * edge_value(edge_shape, double(i) * sample_period / fall));
  }
  p.segments = {{"rise", rise_begin, hold_begin},
                {"hold", hold_begin, fall_begin},
                {"fall", fall_begin, p.samples.size()}};
  p.validate();
  return p;
}

FluxPulse apply_distortion(const FluxPulse& pulse, const DistortionModel& model) {
  pulse.validate();
  model.validate();
  size_t pad = size_t(std::ceil(5.0 * model.max_time_constant() / pulse.sample_period));
  size_t n = pulse.samples.size() + pad;

  FluxPulse out;
  out.sample_period = pulse.sample_period;
  out.segments = pulse.segments;
  out.samples.resize(n);

  // per-term state: s_k[n] = decay_k * s_k[n-1] + a_k * (u[n] - u[n-1]);
  // y[n] = dc_gain * (u[n] + sum_k s_k[n]); the response to a unit step is
  // exactly the sampled step response h(n * dt).
  const size_t nt = model.terms.size();
  std::vector<double> decay(nt), state(nt, 0.0);
  for (size_t k = 0; k < nt; ++k)
    decay[k] = std::exp(-pulse.sample_period / model.terms[k].time_constant);

  double prev = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double u = i < pulse.samples.size() ? pulse.samples[i] : pulse.samples.back();
    double du = u - prev;
    prev = u;
    double y = u;
    for (size_t k = 0; k < nt; ++k) {
      state[k] = decay[k] * state[k] + model.terms[k].amplitude * du;
      y += state[k];
    }
    out.samples[i] = model.dc_gain * y;
  }
  return out;
}

PredistortionFilter design_predistortion(const DistortionModel& model, double sample_period) {
  model.validate();
  if (sample_period <= 0) throw std::invalid_argument("design_predistortion: bad sample_period");

  PredistortionFilter f;
  f.sample_period = sample_period;
  const size_t K = model.terms.size();
  if (K == 0) {
    f.sections.push_back({1.0 / model.dc_gain, 0.0, 0.0});
    return f;
  }

  std::vector<double> p(K);
  for (size_t k = 0; k < K; ++k)
    p[k] = std::exp(-sample_period / model.terms[k].time_constant);

  // numerator polynomial of the distortion in u = z^-1:
  //   N(u) = prod_k (1 - p_k u) + sum_k a_k (1 - u) prod_{j != k} (1 - p_j u)
  auto poly_mul = [](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
  };
  std::vector<double> denom = {1.0};
  for (size_t k = 0; k < K; ++k) denom = poly_mul(denom, {1.0, -p[k]});
  std::vector<double> num = denom;
  for (size_t k = 0; k < K; ++k) {
    std::vector<double> term = {model.terms[k].amplitude, -model.terms[k].amplitude};
    for (size_t j = 0; j < K; ++j)
      if (j != k) term = poly_mul(term, {1.0, -p[j]});
    for (size_t m = 0; m < term.size(); ++m) num[m] += term[m];
  }

  // roots of N(u) via companion matrix; inverse poles are r_k = 1/u_k
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(K, K);
  for (size_t i = 0; i + 1 < K; ++i) companion(i + 1, i) = 1.0;
  for (size_t i = 0; i < K; ++i) companion(i, K - 1) = -num[i] / num[K];
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion);

  std::vector<double> r(K);
  for (size_t k = 0; k < K; ++k) {
    std::complex<double> u = es.eigenvalues()[Eigen::Index(k)];
    if (std::abs(u.imag()) > 1e-9 * (1.0 + std::abs(u.real())))
      throw std::runtime_error("design_predistortion: complex inverse pole; cannot factor into first-order sections");
    r[k] = 1.0 / u.real();
    if (std::abs(r[k]) >= 1.0)
      throw std::runtime_error("design_predistortion: unstable inverse for term " + std::to_string(k) +
                               " (|a1| >= 1)");
  }

  double n0 = num[0];  // = 1 + sum a_k
  for (size_t k = 0; k < K; ++k) {
    double g = (k == 0) ? 1.0 / (model.dc_gain * n0) : 1.0;
    f.sections.push_back({g, -g * p[k], r[k]});
  }
  f.validate();
  return f;
}

CorrectionReport verify_correction(const DistortionModel& model,
                                   const PredistortionFilter& filter,
                                   const FluxPulse& probe) {
  // extend the probe past both the model's and the filter's settling
  // horizons so the comparison window is free of end effects
  double horizon = model.max_time_constant();
  for (const auto& sec : filter.sections)
    if (sec.a1 != 0.0 && std::abs(sec.a1) < 1.0)
      horizon = std::max(horizon, -probe.sample_period / std::log(std::abs(sec.a1)));
  FluxPulse extended = probe;
  size_t pad = size_t(std::ceil(5.0 * horizon / probe.sample_period));
  extended.samples.resize(probe.samples.size() + pad, probe.samples.back());

  FluxPulse corrected = apply_distortion(filter.apply(extended), model);
  CorrectionReport rep;
  size_t last_bad = 0;
  bool any_bad = false;
  for (size_t i = 0; i < extended.samples.size(); ++i) {
    double ideal = i < probe.samples.size() ? probe.samples[i] : probe.samples.back();
    double err = std::abs(corrected.samples[i] - ideal);
    rep.max_abs_error = std::max(rep.max_abs_error, err);
    if (err >= 1e-4) {
      last_bad = i;
      any_bad = true;
    }
  }
  if (!any_bad) {
    rep.settling_time = 0.0;
    rep.settled = true;
  } else if (last_bad + 1 < extended.samples.size()) {
    rep.settling_time = double(last_bad + 1) * probe.sample_period;
    rep.settled = true;
  } else {
    rep.settling_time = extended.duration();
    rep.settled = false;
  }
  return rep;
}

}  // namespace aswap
