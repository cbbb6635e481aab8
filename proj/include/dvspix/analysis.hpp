#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "dvspix/simulator.hpp"
#include "dvspix/stimulus.hpp"

// Event-stream statistics: inter-event interval extraction, (mu, L) cell
// binning, trigger-time histograms, leading-gap detection and shifted
// inverse-Gaussian fits.

namespace dvspix {

struct IntervalSample {
  double dt = 0.0;     // s, inter-event interval of one pixel
  double mu = 0.0;     // units/s, secant luma speed over the interval
  double l_avg = 0.0;  // mean luma over the interval
};

struct TriggerTimeHistogram {
  double bin_width = 0.0;
  double origin = 0.0;  // left edge of bin 0
  std::vector<std::uint64_t> counts;

  [[nodiscard]] std::uint64_t total() const;
  [[nodiscard]] std::uint64_t peak() const;
};

struct IGFit {
  double mean = 0.0;
  double shape = 0.0;
  double shift = 0.0;           // fixed offset subtracted before fitting
  double log_likelihood = 0.0;  // of the shifted samples
};

struct GapMeasure {
  double gap_start = 0.0;   // histogram origin
  double gap_length = 0.0;  // s, zero when bin 0 is already occupied
};

struct CellStats {
  double mu_center = 0.0;
  double l_center = 0.0;
  std::size_t n_samples = 0;
  GapMeasure gap;
  double product = 0.0;  // gap_length * mu_center
  IGFit fit_raw;         // shift 0
  IGFit fit_shifted;     // shift = measured gap_length
  TriggerTimeHistogram histogram;
};

struct DiscontinuityReport {
  std::vector<CellStats> cells;       // grid order: mu-major, then l
  std::size_t samples_assigned = 0;
  std::size_t samples_rejected = 0;   // outside every cell
};

struct ProductSummary {
  double mean_product = 0.0;
  double max_rel_deviation = 0.0;
  std::size_t cells_used = 0;  // cells with a positive gap
};

// (mu, L) analysis cells: intervals [center*(1-hw), center*(1+hw)) on both
// axes. Centers must be positive, increasing and non-overlapping.
struct CellGrid {
  std::vector<double> mu_centers;
  std::vector<double> l_centers;
  double half_width_frac = 0.10;

  void validate() const;
  [[nodiscard]] std::optional<std::size_t> mu_index(double mu) const;
  [[nodiscard]] std::optional<std::size_t> l_index(double l) const;
};

/// Per-pixel inter-event intervals with secant speed and mean luma read off
/// the stimulus trace. Events outside the trace span are skipped (counted in
/// *skipped). The stream may hold many pixels in any time order; pairing is
/// per pixel, in stream order.
[[nodiscard]] std::vector<IntervalSample> intervals_from_events(
    const std::vector<EventRecord>& events,
    const std::function<const LumaTrace&(int x, int y)>& trace_for,
    std::size_t* skipped = nullptr);

struct BinnedSamples {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<IntervalSample>> cells;
  std::size_t rejected = 0;
};

/// Half-open binning of samples on consecutive [edges[i], edges[i+1]) bins;
/// a value sitting on an interior edge lands in the upper bin. Out-of-range
/// samples are counted, never dropped silently.
[[nodiscard]] BinnedSamples bin_samples(const std::vector<IntervalSample>& samples,
                                        const std::vector<double>& mu_edges,
                                        const std::vector<double>& l_edges);

/// Bin index for consecutive half-open bins, std::nullopt outside.
[[nodiscard]] std::optional<std::size_t> bin_index(double value,
                                                   const std::vector<double>& edges);

/// Fixed-width counts from the origin 0 up to the largest sample.
[[nodiscard]] TriggerTimeHistogram build_histogram(const std::vector<double>& dts,
                                                   double bin_width);

/// Leading empty region: the run of bins from the origin whose counts stay at
/// or below floor_fraction * peak, ended by the first bin above the floor.
[[nodiscard]] GapMeasure detect_gap(const TriggerTimeHistogram& hist,
                                    double floor_fraction);

/// Maximum-likelihood inverse-Gaussian fit of samples - shift. Every sample
/// must exceed the shift. Degenerate (all-equal) input yields an infinite
/// shape.
[[nodiscard]] IGFit fit_inverse_gaussian(const std::vector<double>& samples,
                                         double shift = 0.0);

/// Inverse-Gaussian density, for fit overlays and tests.
[[nodiscard]] double inverse_gaussian_pdf(double x, double mean, double shape);

/// Inverse-Gaussian distribution function.
[[nodiscard]] double inverse_gaussian_cdf(double x, double mean, double shape);

/// Gap-speed products over the cells with a positive gap.
[[nodiscard]] ProductSummary product_check(const DiscontinuityReport& report);

/// Full per-cell statistics for interval samples on a grid.
[[nodiscard]] DiscontinuityReport analyze_cells(const std::vector<IntervalSample>& samples,
                                                const CellGrid& grid, double bin_width,
                                                double floor_fraction);

}  // namespace dvspix
