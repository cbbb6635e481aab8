#include "dvspix/stimulus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dvspix {

void FrameSequence::validate() const {
  if (frames.size() < 2) throw std::invalid_argument("FrameSequence: need at least two frames");
  if (timestamps.size() != frames.size())
    throw std::invalid_argument("FrameSequence: one timestamp per frame required");
  const int w = frames.front().width;
  const int h = frames.front().height;
  if (w <= 0 || h <= 0) throw std::invalid_argument("FrameSequence: empty frames");
  for (const Frame& f : frames) {
    if (f.width != w || f.height != h)
      throw std::invalid_argument("FrameSequence: frame dimensions differ");
    if (f.pixels.size() != static_cast<std::size_t>(w) * h)
      throw std::invalid_argument("FrameSequence: pixel buffer size mismatch");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i)
    if (timestamps[i] <= timestamps[i - 1])
      throw std::invalid_argument("FrameSequence: timestamps must be strictly increasing");
}

LumaTrace::LumaTrace(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() < 2) throw std::invalid_argument("LumaTrace: need at least two breakpoints");
  if (times_.size() != values_.size())
    throw std::invalid_argument("LumaTrace: times/values size mismatch");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (times_[i] <= times_[i - 1])
      throw std::invalid_argument("LumaTrace: breakpoint times must be strictly increasing");
  for (double v : values_)
    if (!(v >= 0.0)) throw std::invalid_argument("LumaTrace: luma must be non-negative");
}

std::size_t LumaTrace::segment_at(double t) const {
  if (!covers(t)) throw std::out_of_range("LumaTrace: time outside breakpoints");
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t idx = static_cast<std::size_t>(it - times_.begin());
  if (idx == 0) return 0;                      // t == t_begin
  if (idx >= times_.size()) return times_.size() - 2;  // t == t_end
  return idx - 1;
}

double LumaTrace::value_at(double t) const {
  const std::size_t s = segment_at(t);
  const double t0 = times_[s], t1 = times_[s + 1];
  const double w = (t - t0) / (t1 - t0);
  return values_[s] + w * (values_[s + 1] - values_[s]);
}

double LumaTrace::slope_at(double t) const {
  const std::size_t s = segment_at(t);
  return (values_[s + 1] - values_[s]) / (times_[s + 1] - times_[s]);
}

double LumaTrace::mean_over(double t1, double t2) const {
  if (t2 <= t1) throw std::invalid_argument("LumaTrace::mean_over: need t2 > t1");
  if (!covers(t1) || !covers(t2)) throw std::out_of_range("LumaTrace::mean_over: outside trace");
  // Trapezoid integral, exact on the piecewise-linear curve.
  double integral = 0.0;
  double t_prev = t1;
  double v_prev = value_at(t1);
  for (std::size_t i = segment_at(t1) + 1; i < times_.size() && times_[i] < t2; ++i) {
    integral += 0.5 * (v_prev + values_[i]) * (times_[i] - t_prev);
    t_prev = times_[i];
    v_prev = values_[i];
  }
  integral += 0.5 * (v_prev + value_at(t2)) * (t2 - t_prev);
  return integral / (t2 - t1);
}

void RampStimulus::validate() const {
  if (l_start < 0.0) throw std::invalid_argument("RampStimulus: l_start must be >= 0");
  if (duration <= 0.0) throw std::invalid_argument("RampStimulus: duration must be > 0");
  if (l_start + mu * duration < 0.0)
    throw std::invalid_argument("RampStimulus: ramp reaches negative luma");
}

double bt709_luma(double r, double g, double b) {
  for (double c : {r, g, b})
    if (c < 0.0 || c > 255.0) throw std::domain_error("bt709_luma: channel outside [0, 255]");
  return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}

FrameSequence interpolate_frames(const FrameSequence& seq, int factor) {
  if (factor < 1) throw std::invalid_argument("interpolate_frames: factor must be >= 1");
  seq.validate();
  if (factor == 1) return seq;
  FrameSequence out;
  const std::size_t n = seq.frames.size();
  out.frames.reserve((n - 1) * factor + 1);
  out.timestamps.reserve((n - 1) * factor + 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Frame& a = seq.frames[i];
    const Frame& b = seq.frames[i + 1];
    const double ta = seq.timestamps[i], tb = seq.timestamps[i + 1];
    out.frames.push_back(a);
    out.timestamps.push_back(ta);
    for (int k = 1; k < factor; ++k) {
      const double w = static_cast<double>(k) / factor;
      Frame mid{a.width, a.height, std::vector<double>(a.pixels.size())};
      for (std::size_t j = 0; j < a.pixels.size(); ++j)
        mid.pixels[j] = a.pixels[j] + w * (b.pixels[j] - a.pixels[j]);
      out.frames.push_back(std::move(mid));
      out.timestamps.push_back(ta + w * (tb - ta));
    }
  }
  out.frames.push_back(seq.frames.back());
  out.timestamps.push_back(seq.timestamps.back());
  return out;
}

LumaTrace trace_from_frames(const FrameSequence& seq, int x, int y) {
  seq.validate();
  if (x < 0 || x >= seq.width() || y < 0 || y >= seq.height())
    throw std::out_of_range("trace_from_frames: pixel outside frame");
  std::vector<double> values;
  values.reserve(seq.frames.size());
  for (const Frame& f : seq.frames) values.push_back(f.at(x, y));
  return LumaTrace(seq.timestamps, std::move(values));
}

LumaTrace synth_ramp(const RampStimulus& ramp) {
  ramp.validate();
  return LumaTrace({0.0, ramp.duration}, {ramp.l_start, ramp.l_start + ramp.mu * ramp.duration});
}

}  // namespace dvspix
