#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "dvspix/stimulus.hpp"

using namespace dvspix;

namespace {

Frame const_frame(int w, int h, double v) {
  return Frame{w, h, std::vector<double>(static_cast<std::size_t>(w) * h, v)};
}

}  // namespace

TEST_CASE("bt709_luma weights the channels") {
  CHECK(bt709_luma(255, 255, 255) == doctest::Approx(255.0).epsilon(1e-12));
  CHECK(bt709_luma(0, 0, 0) == 0.0);
  CHECK(bt709_luma(255, 0, 0) == doctest::Approx(54.213).epsilon(1e-12));
  CHECK(bt709_luma(0, 255, 0) == doctest::Approx(182.376).epsilon(1e-12));
  CHECK(bt709_luma(0, 0, 255) == doctest::Approx(18.411).epsilon(1e-12));
  CHECK_THROWS_AS(bt709_luma(-1, 0, 0), std::domain_error);
  CHECK_THROWS_AS(bt709_luma(0, 256, 0), std::domain_error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<> ch(0.0, 255.0);
  for (int i = 0; i < 100; ++i) {
    const double r = ch(rng), g = ch(rng), b = ch(rng);
    const double y = bt709_luma(r, g, b);
    CHECK(y >= 0.0);
    CHECK(y <= 255.0 + 1e-9);
    // raising any channel cannot lower the luma
    CHECK(bt709_luma(std::min(r + 10.0, 255.0), g, b) >= y - 1e-12);
  }
}

TEST_CASE("interpolate_frames keeps originals and fills linearly") {
  FrameSequence seq;
  seq.frames = {const_frame(2, 2, 0.0), const_frame(2, 2, 100.0)};
  seq.timestamps = {0.0, 1.0};

  const FrameSequence out = interpolate_frames(seq, 10);
  REQUIRE(out.frames.size() == 11);
  REQUIRE(out.timestamps.size() == 11);
  CHECK(out.timestamps.front() == 0.0);
  CHECK(out.timestamps.back() == 1.0);
  CHECK(out.frames.front().pixels == seq.frames.front().pixels);
  CHECK(out.frames.back().pixels == seq.frames.back().pixels);
  CHECK(out.timestamps[5] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.frames[5].at(0, 0) == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(out.frames[1].at(1, 1) == doctest::Approx(10.0).epsilon(1e-12));

  // every interpolated value stays inside the endpoint hull
  for (const Frame& f : out.frames)
    for (double v : f.pixels) {
      CHECK(v >= 0.0);
      CHECK(v <= 100.0);
    }

  CHECK(interpolate_frames(seq, 1).frames.size() == 2);
  CHECK_THROWS_AS(interpolate_frames(seq, 0), std::invalid_argument);
}

TEST_CASE("frame sequence validation") {
  FrameSequence seq;
  seq.frames = {const_frame(2, 2, 1.0)};
  seq.timestamps = {0.0};
  CHECK_THROWS_AS(seq.validate(), std::invalid_argument);

  seq.frames.push_back(const_frame(3, 2, 1.0));
  seq.timestamps.push_back(1.0);
  CHECK_THROWS_AS(seq.validate(), std::invalid_argument);

  seq.frames[1] = const_frame(2, 2, 1.0);
  seq.timestamps = {0.0, 0.0};
  CHECK_THROWS_AS(seq.validate(), std::invalid_argument);

  seq.timestamps = {0.0, 1.0};
  CHECK_NOTHROW(seq.validate());
}

TEST_CASE("trace_from_frames interpolates one pixel through time") {
  FrameSequence seq;
  seq.frames = {const_frame(2, 1, 10.0), const_frame(2, 1, 20.0), const_frame(2, 1, 30.0)};
  seq.frames[1].pixels[1] = 40.0;
  seq.timestamps = {0.0, 1.0, 2.0};

  const LumaTrace t0 = trace_from_frames(seq, 0, 0);
  CHECK(t0.size() == 3);
  CHECK(t0.value_at(0.5) == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(t0.value_at(2.0) == doctest::Approx(30.0).epsilon(1e-12));

  const LumaTrace t1 = trace_from_frames(seq, 1, 0);
  CHECK(t1.value_at(1.0) == doctest::Approx(40.0).epsilon(1e-12));

  CHECK_THROWS_AS(trace_from_frames(seq, 2, 0), std::out_of_range);
  CHECK_THROWS_AS(trace_from_frames(seq, 0, 1), std::out_of_range);
}

TEST_CASE("interpolation does not move the trace at original timestamps") {
  FrameSequence seq;
  seq.frames = {const_frame(2, 2, 12.0), const_frame(2, 2, 60.0), const_frame(2, 2, 31.0)};
  seq.timestamps = {0.0, 0.4, 1.1};
  const FrameSequence dense = interpolate_frames(seq, 8);
  const LumaTrace sparse_trace = trace_from_frames(seq, 1, 1);
  const LumaTrace dense_trace = trace_from_frames(dense, 1, 1);
  for (double t : {0.0, 0.15, 0.4, 0.7, 1.1})
    CHECK(dense_trace.value_at(t) == doctest::Approx(sparse_trace.value_at(t)).epsilon(1e-12));
}

TEST_CASE("synth_ramp spans the requested line") {
  RampStimulus ramp{10.0, 50.0, 1.0};
  const LumaTrace trace = synth_ramp(ramp);
  CHECK(trace.t_begin() == 0.0);
  CHECK(trace.t_end() == 1.0);
  CHECK(trace.value_at(0.0) == doctest::Approx(10.0));
  CHECK(trace.value_at(1.0) == doctest::Approx(60.0));
  CHECK(trace.value_at(0.5) == doctest::Approx(35.0));
  CHECK(trace.slope_at(0.3) == doctest::Approx(50.0));

  const LumaTrace flat = synth_ramp(RampStimulus{10.0, 0.0, 2.0});
  CHECK(flat.value_at(1.7) == doctest::Approx(10.0));

  CHECK_THROWS_AS(synth_ramp(RampStimulus{-1.0, 50.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(synth_ramp(RampStimulus{10.0, 50.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(synth_ramp(RampStimulus{10.0, -20.0, 1.0}), std::invalid_argument);
}

TEST_CASE("LumaTrace rejects malformed breakpoints and out-of-range queries") {
  CHECK_THROWS_AS(LumaTrace({0.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(LumaTrace({0.0, 0.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(LumaTrace({0.0, 1.0}, {1.0, -2.0}), std::invalid_argument);
  const LumaTrace trace({0.0, 1.0}, {5.0, 6.0});
  CHECK_THROWS_AS(trace.value_at(-0.1), std::out_of_range);
  CHECK_THROWS_AS(trace.value_at(1.1), std::out_of_range);
}

TEST_CASE("mean_over agrees with a dense Riemann sum") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<> luma(0.0, 200.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> times, values;
    double t = 0.0;
    for (int i = 0; i < 8; ++i) {
      times.push_back(t);
      values.push_back(luma(rng));
      t += std::uniform_real_distribution<>(0.1, 1.0)(rng);
    }
    const LumaTrace trace(times, values);
    const double a = trace.t_begin() + 0.05, b = trace.t_end() - 0.07;
    const int n = 200000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += trace.value_at(a + (b - a) * (i + 0.5) / n);
    CHECK(trace.mean_over(a, b) == doctest::Approx(acc / n).epsilon(1e-6));
  }
}

TEST_CASE("slope_at is right-continuous at breakpoints") {
  const LumaTrace trace({0.0, 1.0, 2.0}, {0.0, 10.0, 10.0});
  CHECK(trace.slope_at(0.0) == doctest::Approx(10.0));
  CHECK(trace.slope_at(1.0) == doctest::Approx(0.0));
  CHECK(trace.slope_at(2.0) == doctest::Approx(0.0));
}
