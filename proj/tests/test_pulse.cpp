#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "aswap/pulse.hpp"

using namespace aswap;

namespace {

const DistortionModel kFixture{{{0.05, 800.0}}, 1.0};

FluxPulse step_pulse(double amplitude, size_t n, double dt) {
  FluxPulse p;
  p.sample_period = dt;
  p.samples.assign(n, amplitude);
  return p;
}

}  // namespace

TEST_CASE("make_flattop: rectangular pulse has exactly two values") {
  FluxPulse p = make_flattop(0.0, 0.3, 0.0, 20.0, 0.0, EdgeShape::Step, 0.5);
  std::set<double> distinct(p.samples.begin(), p.samples.end());
  CHECK(distinct == std::set<double>{0.0, 0.3});
  CHECK(p.samples.front() == 0.0);
  CHECK(p.samples.back() == 0.0);
}

TEST_CASE("make_flattop: cosine rise passes through the midpoint") {
  FluxPulse p = make_flattop(0.1, 0.3, 50.0, 20.0, 50.0, EdgeShape::Cosine, 0.5);
  const Segment* rise = p.segment("rise");
  REQUIRE(rise != nullptr);
  size_t mid = rise->begin + (rise->end - rise->begin) / 2;
  CHECK(p.samples[mid] == doctest::Approx(0.2).epsilon(1e-6));
  const Segment* hold = p.segment("hold");
  REQUIRE(hold != nullptr);
  for (size_t i = hold->begin; i < hold->end; ++i) CHECK(p.samples[i] == 0.3);
}

TEST_CASE("make_flattop: duration and validation") {
  FluxPulse p = make_flattop(0.0, 0.2, 50.0, 100.0, 50.0, EdgeShape::Linear, 0.5);
  CHECK(std::abs(p.duration() - 200.0) <= 0.5 + 1e-12);
  CHECK_NOTHROW(p.validate());
  CHECK_THROWS(make_flattop(0.0, 0.2, 50.0, 0.1, 50.0, EdgeShape::Cosine, 0.5));
}

TEST_CASE("edge shape names round-trip") {
  for (EdgeShape s : {EdgeShape::Cosine, EdgeShape::Linear, EdgeShape::Step})
    CHECK(edge_shape_from_string(to_string(s)) == s);
  CHECK_THROWS(edge_shape_from_string("gaussian"));
}

TEST_CASE("apply_distortion: identity model returns the input padded flat") {
  DistortionModel identity;
  FluxPulse p = make_flattop(0.0, 0.2, 10.0, 30.0, 10.0, EdgeShape::Cosine, 0.5);
  FluxPulse out = apply_distortion(p, identity);
  REQUIRE(out.samples.size() >= p.samples.size());
  for (size_t i = 0; i < p.samples.size(); ++i)
    CHECK(out.samples[i] == doctest::Approx(p.samples[i]).epsilon(1e-14));
  for (size_t i = p.samples.size(); i < out.samples.size(); ++i)
    CHECK(out.samples[i] == doctest::Approx(p.samples.back()).epsilon(1e-14));
}

TEST_CASE("apply_distortion: unit step follows the closed-form step response") {
  double dt = 0.5;
  FluxPulse p = step_pulse(1.0, 4000, dt);
  FluxPulse out = apply_distortion(p, kFixture);
  // one tau after the edge: 1 + a/e
  size_t k = size_t(800.0 / dt);
  CHECK(out.samples[k] == doctest::Approx(1.0 + 0.05 / std::exp(1.0)).epsilon(1e-9));
  for (size_t i : {size_t(10), size_t(400), size_t(3000)})
    CHECK(out.samples[i] ==
          doctest::Approx(kFixture.step_response(double(i) * dt)).epsilon(1e-9));
}

TEST_CASE("apply_distortion: switched-off pulse leaves a long exponential tail") {
  double dt = 0.5;
  double tau0 = 1000.0;
  FluxPulse p;
  p.sample_period = dt;
  p.samples.assign(size_t(tau0 / dt), 1.0);
  p.samples.resize(size_t(tau0 / dt) + 2000, 0.0);
  FluxPulse out = apply_distortion(p, kFixture);
  // tail = h(t) - h(t - tau0) after the switch-off
  for (double t : {1200.0, 1800.0, 2400.0}) {
    size_t i = size_t(t / dt);
    double expected = kFixture.step_response(t) - kFixture.step_response(t - tau0);
    CHECK(out.samples[i] == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::abs(out.samples[i]) > 1e-3);
  }
}

TEST_CASE("apply_distortion: linearity, shift invariance, dc gain, causality") {
  DistortionModel model{{{0.05, 800.0}, {0.02, 150.0}}, 1.3};
  double dt = 0.5;
  FluxPulse a = make_flattop(0.0, 0.2, 10.0, 30.0, 10.0, EdgeShape::Cosine, dt);
  FluxPulse b = make_flattop(0.0, -0.1, 5.0, 40.0, 5.0, EdgeShape::Linear, dt);
  REQUIRE(b.samples.size() == a.samples.size());

  FluxPulse combo = a;
  for (size_t i = 0; i < combo.samples.size(); ++i)
    combo.samples[i] = 2.0 * a.samples[i] - 3.0 * b.samples[i];
  FluxPulse ya = apply_distortion(a, model), yb = apply_distortion(b, model);
  FluxPulse yc = apply_distortion(combo, model);
  for (size_t i = 0; i < yc.samples.size(); ++i)
    CHECK(yc.samples[i] ==
          doctest::Approx(2.0 * ya.samples[i] - 3.0 * yb.samples[i]).epsilon(1e-12));

  // shift by k samples shifts the output by k samples
  size_t k = 7;
  FluxPulse shifted;
  shifted.sample_period = dt;
  shifted.samples.assign(k, 0.0);
  shifted.samples.insert(shifted.samples.end(), a.samples.begin(), a.samples.end());
  FluxPulse ys = apply_distortion(shifted, model);
  for (size_t i = 0; i + k < ys.samples.size() && i < ya.samples.size(); ++i)
    CHECK(ys.samples[i + k] == doctest::Approx(ya.samples[i]).epsilon(1e-12));

  // constant maps to dc_gain * constant once the startup transient has decayed
  FluxPulse flat = step_pulse(0.25, 100, dt);
  FluxPulse yflat = apply_distortion(flat, model);
  CHECK(std::abs(yflat.samples.back() - 0.25 * 1.3) < 2e-4);
  // causality: changing later samples leaves earlier outputs untouched
  FluxPulse tail_changed = a;
  tail_changed.samples.back() += 0.1;
  FluxPulse yt = apply_distortion(tail_changed, model);
  for (size_t i = 0; i + 1 < a.samples.size(); ++i)
    CHECK(yt.samples[i] == doctest::Approx(ya.samples[i]).epsilon(1e-14));
}

TEST_CASE("distortion model validation") {
  CHECK_NOTHROW(kFixture.validate());
  DistortionModel bad{{{0.05, -1.0}}, 1.0};
  CHECK_THROWS(bad.validate());
  // step response must stay positive
  DistortionModel negative{{{-1.2, 500.0}}, 1.0};
  CHECK_THROWS(negative.validate());
}

TEST_CASE("design_predistortion: identity model gives the identity filter") {
  DistortionModel identity;
  PredistortionFilter f = design_predistortion(identity, 0.5);
  REQUIRE(f.sections.size() == 1);
  CHECK(f.sections[0].b0 == doctest::Approx(1.0));
  CHECK(f.sections[0].b1 == doctest::Approx(0.0));
  CHECK(f.sections[0].a1 == doctest::Approx(0.0));
}

TEST_CASE("design_predistortion: round-trip step error settles below 1e-4") {
  double dt = 0.5;
  for (const DistortionModel& model :
       {kFixture, DistortionModel{{{0.05, 800.0}, {0.02, 150.0}}, 1.0}}) {
    PredistortionFilter f = design_predistortion(model, dt);
    CHECK_NOTHROW(f.validate());
    for (const auto& s : f.sections) CHECK(std::abs(s.a1) < 1.0);
    FluxPulse step = step_pulse(1.0, 8000, dt);
    FluxPulse corrected = apply_distortion(f.apply(step), model);
    for (size_t i = 10; i < step.samples.size(); ++i)
      CHECK(std::abs(corrected.samples[i] - 1.0) < 1e-4);
  }
}

TEST_CASE("verify_correction: matched, mismatched, and absent filters") {
  double dt = 0.5;
  FluxPulse probe = step_pulse(1.0, 6000, dt);

  PredistortionFilter matched = design_predistortion(kFixture, dt);
  CorrectionReport good = verify_correction(kFixture, matched, probe);
  CHECK(good.max_abs_error < 1e-10);
  CHECK(good.settled);

  DistortionModel faster{{{0.05, 400.0}}, 1.0};
  CorrectionReport wrong = verify_correction(faster, matched, probe);
  CHECK(wrong.max_abs_error > 1e-3);

  PredistortionFilter identity = design_predistortion(DistortionModel{}, dt);
  CorrectionReport none = verify_correction(kFixture, identity, probe);
  CHECK(none.max_abs_error == doctest::Approx(0.05).epsilon(0.02));
}
