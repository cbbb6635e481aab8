#include "dvspix/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace dvspix {

namespace {

double phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

std::uint64_t TriggerTimeHistogram::total() const {
  std::uint64_t n = 0;
  for (std::uint64_t c : counts) n += c;
  return n;
}

std::uint64_t TriggerTimeHistogram::peak() const {
  std::uint64_t m = 0;
  for (std::uint64_t c : counts) m = std::max(m, c);
  return m;
}

void CellGrid::validate() const {
  if (mu_centers.empty() || l_centers.empty())
    throw std::invalid_argument("CellGrid: centers must be non-empty");
  if (half_width_frac <= 0.0 || half_width_frac >= 1.0)
    throw std::invalid_argument("CellGrid: half_width_frac must be in (0, 1)");
  for (const auto& centers : {mu_centers, l_centers}) {
    for (double c : centers)
      if (c <= 0.0) throw std::invalid_argument("CellGrid: centers must be > 0");
    for (std::size_t i = 1; i < centers.size(); ++i) {
      if (centers[i] <= centers[i - 1])
        throw std::invalid_argument("CellGrid: centers must be strictly increasing");
      if (centers[i - 1] * (1.0 + half_width_frac) > centers[i] * (1.0 - half_width_frac))
        throw std::invalid_argument("CellGrid: cells overlap at this half width");
    }
  }
}

namespace {

std::optional<std::size_t> center_index(double v, const std::vector<double>& centers,
                                        double hw) {
  // Cells are disjoint; a linear scan would do, but bisect on the lower edges.
  auto it = std::upper_bound(centers.begin(), centers.end(), v,
                             [hw](double value, double c) { return value < c * (1.0 - hw); });
  if (it == centers.begin()) return std::nullopt;
  const std::size_t i = static_cast<std::size_t>(it - centers.begin()) - 1;
  if (v >= centers[i] * (1.0 - hw) && v < centers[i] * (1.0 + hw)) return i;
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> CellGrid::mu_index(double mu) const {
  return center_index(mu, mu_centers, half_width_frac);
}

std::optional<std::size_t> CellGrid::l_index(double l) const {
  return center_index(l, l_centers, half_width_frac);
}

std::vector<IntervalSample> intervals_from_events(
    const std::vector<EventRecord>& events,
    const std::function<const LumaTrace&(int x, int y)>& trace_for, std::size_t* skipped) {
  std::vector<IntervalSample> out;
  if (skipped) *skipped = 0;
  struct Key {
    int x, y;
    bool operator==(const Key& o) const { return x == o.x && y == o.y; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.y)) << 32) |
                                        static_cast<std::uint32_t>(k.x));
    }
  };
  std::unordered_map<Key, double, KeyHash> last_t;
  last_t.reserve(1024);
  for (const EventRecord& ev : events) {
    const LumaTrace& trace = trace_for(ev.x, ev.y);
    if (!trace.covers(ev.t)) {
      if (skipped) ++*skipped;
      continue;
    }
    const Key key{ev.x, ev.y};
    auto [it, fresh] = last_t.try_emplace(key, ev.t);
    if (fresh) continue;
    const double t1 = it->second;
    const double t2 = ev.t;
    it->second = t2;
    if (t2 <= t1) continue;  // duplicate or out-of-order pair, no interval
    const double dt = t2 - t1;
    const double mu = (trace.value_at(t2) - trace.value_at(t1)) / dt;
    out.push_back(IntervalSample{dt, mu, trace.mean_over(t1, t2)});
  }
  return out;
}

std::optional<std::size_t> bin_index(double value, const std::vector<double>& edges) {
  if (edges.size() < 2) throw std::invalid_argument("bin_index: need at least two edges");
  if (value < edges.front() || value >= edges.back()) return std::nullopt;
  auto it = std::upper_bound(edges.begin(), edges.end(), value);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

BinnedSamples bin_samples(const std::vector<IntervalSample>& samples,
                          const std::vector<double>& mu_edges,
                          const std::vector<double>& l_edges) {
  for (const auto& edges : {mu_edges, l_edges}) {
    if (edges.size() < 2) throw std::invalid_argument("bin_samples: need at least two edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
      if (edges[i] <= edges[i - 1])
        throw std::invalid_argument("bin_samples: edges must be strictly increasing");
  }
  BinnedSamples out;
  for (const IntervalSample& s : samples) {
    const auto mi = bin_index(s.mu, mu_edges);
    const auto li = bin_index(s.l_avg, l_edges);
    if (!mi || !li) {
      ++out.rejected;
      continue;
    }
    out.cells[{*mi, *li}].push_back(s);
  }
  return out;
}

TriggerTimeHistogram build_histogram(const std::vector<double>& dts, double bin_width) {
  if (dts.empty()) throw std::invalid_argument("build_histogram: no samples");
  if (bin_width <= 0.0) throw std::invalid_argument("build_histogram: bin_width must be > 0");
  double max_dt = 0.0;
  for (double dt : dts) {
    if (dt <= 0.0) throw std::invalid_argument("build_histogram: intervals must be > 0");
    max_dt = std::max(max_dt, dt);
  }
  TriggerTimeHistogram hist;
  hist.bin_width = bin_width;
  hist.origin = 0.0;
  hist.counts.assign(static_cast<std::size_t>(max_dt / bin_width) + 1, 0);
  for (double dt : dts) {
    auto idx = static_cast<std::size_t>(dt / bin_width);
    if (idx >= hist.counts.size()) idx = hist.counts.size() - 1;
    ++hist.counts[idx];
  }
  return hist;
}

GapMeasure detect_gap(const TriggerTimeHistogram& hist, double floor_fraction) {
  if (hist.counts.empty()) throw std::invalid_argument("detect_gap: empty histogram");
  if (floor_fraction < 0.0 || floor_fraction >= 1.0)
    throw std::invalid_argument("detect_gap: floor_fraction must be in [0, 1)");
  const std::uint64_t peak = hist.peak();
  if (peak == 0) throw std::invalid_argument("detect_gap: histogram holds no counts");
  const double floor = floor_fraction * static_cast<double>(peak);
  std::size_t run = 0;
  while (run < hist.counts.size() && static_cast<double>(hist.counts[run]) <= floor) ++run;
  return GapMeasure{hist.origin, static_cast<double>(run) * hist.bin_width};
}

IGFit fit_inverse_gaussian(const std::vector<double>& samples, double shift) {
  if (samples.size() < 2) throw std::invalid_argument("fit_inverse_gaussian: need >= 2 samples");
  double sum = 0.0;
  for (double x : samples) {
    if (x <= shift)
      throw std::invalid_argument("fit_inverse_gaussian: every sample must exceed the shift");
    sum += x - shift;
  }
  const double n = static_cast<double>(samples.size());
  const double mean = sum / n;
  double recip = 0.0;
  for (double x : samples) recip += 1.0 / (x - shift) - 1.0 / mean;
  IGFit fit;
  fit.mean = mean;
  fit.shift = shift;
  fit.shape = recip > 0.0 ? n / recip : std::numeric_limits<double>::infinity();
  if (std::isinf(fit.shape)) {
    fit.log_likelihood = std::numeric_limits<double>::infinity();
    return fit;
  }
  double ll = 0.0;
  for (double x : samples) {
    const double y = x - shift;
    ll += 0.5 * std::log(fit.shape / (2.0 * std::numbers::pi * y * y * y)) -
          fit.shape * (y - mean) * (y - mean) / (2.0 * mean * mean * y);
  }
  fit.log_likelihood = ll;
  return fit;
}

double inverse_gaussian_pdf(double x, double mean, double shape) {
  if (mean <= 0.0 || shape <= 0.0)
    throw std::domain_error("inverse_gaussian_pdf: mean and shape must be > 0");
  if (x <= 0.0) return 0.0;
  return std::sqrt(shape / (2.0 * std::numbers::pi * x * x * x)) *
         std::exp(-shape * (x - mean) * (x - mean) / (2.0 * mean * mean * x));
}

double inverse_gaussian_cdf(double x, double mean, double shape) {
  if (mean <= 0.0 || shape <= 0.0)
    throw std::domain_error("inverse_gaussian_cdf: mean and shape must be > 0");
  if (x <= 0.0) return 0.0;
  const double r = std::sqrt(shape / x);
  return phi(r * (x / mean - 1.0)) +
         std::exp(2.0 * shape / mean) * phi(-r * (x / mean + 1.0));
}

ProductSummary product_check(const DiscontinuityReport& report) {
  ProductSummary s;
  double sum = 0.0;
  for (const CellStats& c : report.cells)
    if (c.gap.gap_length > 0.0) {
      sum += c.product;
      ++s.cells_used;
    }
  if (s.cells_used == 0)
    throw std::invalid_argument("product_check: no cell has a positive gap");
  s.mean_product = sum / static_cast<double>(s.cells_used);
  for (const CellStats& c : report.cells)
    if (c.gap.gap_length > 0.0)
      s.max_rel_deviation = std::max(
          s.max_rel_deviation, std::abs(c.product - s.mean_product) / s.mean_product);
  return s;
}

DiscontinuityReport analyze_cells(const std::vector<IntervalSample>& samples,
                                  const CellGrid& grid, double bin_width,
                                  double floor_fraction) {
  grid.validate();
  if (bin_width <= 0.0) throw std::invalid_argument("analyze_cells: bin_width must be > 0");
  DiscontinuityReport report;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> dts;
  for (const IntervalSample& s : samples) {
    const auto mi = grid.mu_index(s.mu);
    const auto li = grid.l_index(s.l_avg);
    if (!mi || !li) {
      ++report.samples_rejected;
      continue;
    }
    dts[{*mi, *li}].push_back(s.dt);
    ++report.samples_assigned;
  }
  for (std::size_t mi = 0; mi < grid.mu_centers.size(); ++mi) {
    for (std::size_t li = 0; li < grid.l_centers.size(); ++li) {
      const auto it = dts.find({mi, li});
      if (it == dts.end()) continue;
      const std::vector<double>& cell_dts = it->second;
      CellStats cell;
      cell.mu_center = grid.mu_centers[mi];
      cell.l_center = grid.l_centers[li];
      cell.n_samples = cell_dts.size();
      cell.histogram = build_histogram(cell_dts, bin_width);
      cell.gap = detect_gap(cell.histogram, floor_fraction);
      cell.product = cell.gap.gap_length * cell.mu_center;
      cell.fit_raw = fit_inverse_gaussian(cell_dts, 0.0);
      // The shifted fit sees the intervals past the measured gap; stray
      // sub-floor samples inside the gap are excluded rather than fatal.
      if (cell.gap.gap_length > 0.0) {
        std::vector<double> past_gap;
        past_gap.reserve(cell_dts.size());
        for (double dt : cell_dts)
          if (dt > cell.gap.gap_length) past_gap.push_back(dt);
        cell.fit_shifted = past_gap.size() >= 2
                               ? fit_inverse_gaussian(past_gap, cell.gap.gap_length)
                               : cell.fit_raw;
      } else {
        cell.fit_shifted = cell.fit_raw;
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace dvspix
