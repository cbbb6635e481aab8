#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

// Pixel front-end model: log photoreceptor, source follower, switched-cap
// differencing amplifier and cascode-isolated photodiode node. All voltages
// in volts, currents in amperes, charge in coulombs, time in seconds.

namespace dvspix {

enum class Polarity : std::uint8_t { Off = 0, On = 1, None = 2 };

struct PixelParams {
  double theta_on = 0.075;        // V, ON comparator level
  double theta_off = 0.075;       // V, OFF comparator level
  double gain_diff = 20.0;        // differencing amplifier closed-loop gain
  double kappa_sf = 0.7;          // source follower subthreshold slope
  double kappa_fb = 0.7;          // feedback transistor subthreshold slope
  double v_thermal = 0.025;       // V, kT/q
  double gain_cascode = 50.0;     // cascode isolation gain
  double c_junction = 1e-12;      // F, photodiode junction capacitance
  double k_photo = 1e-10;         // A per 8-bit luma unit
  double delta_q_e = 1.0714285714285715e-16;  // C, parasitic charge per event
  double r_shunt = std::numeric_limits<double>::infinity();  // idealized open
  double r_series = 0.0;                                     // idealized short

  /// Throws std::invalid_argument on any out-of-range field.
  void validate() const;

  /// Contrast threshold in log-luma units for the given comparator level.
  [[nodiscard]] double contrast_threshold(double theta) const;
  [[nodiscard]] double contrast_threshold_on() const { return contrast_threshold(theta_on); }
  [[nodiscard]] double contrast_threshold_off() const { return contrast_threshold(theta_off); }
};

/// Photocurrent for a luma value (linear photodiode response).
[[nodiscard]] double luma_to_photocurrent(double luma, const PixelParams& p);

/// Differencing amplifier output swing for a photocurrent step, relative to
/// the last reset. Negative for increasing current.
[[nodiscard]] double delta_vd(double i_old, double i_new, const PixelParams& p);

/// Comparator decision on the differencing amplifier output. Boundary values
/// trigger.
[[nodiscard]] Polarity threshold_classify(double v_d, const PixelParams& p);

/// Photodiode node swing coupled through the cascode from a photoreceptor
/// output swing.
[[nodiscard]] double delta_vpd_from_vp(double delta_vp, const PixelParams& p);

/// Charge displaced on the junction capacitance by a photodiode node swing.
[[nodiscard]] double charge_delta(double delta_vpd, const PixelParams& p);

/// Time for the photocurrent step to supply the parasitic event charge.
/// Returns 0 when no charge is owed, +inf when the step is zero but charge
/// is owed (no event can complete).
[[nodiscard]] double event_delay(double delta_i_pd, const PixelParams& p);

/// Empirical per-event time delay for a stimulus change speed.
[[nodiscard]] double delay_from_speed(double mu, double k_delay);

/// Least-squares k from (mu, measured gap) observations under gap = k / mu.
[[nodiscard]] double calibrate_k_delay(const std::vector<std::pair<double, double>>& obs);

/// Parasitic charge implied by a comparator level and the signal chain gains.
[[nodiscard]] double delta_q_from_threshold(double theta, const PixelParams& p);

/// True when delta_q_e matches the charge implied by both comparator levels.
[[nodiscard]] bool delta_q_consistent(const PixelParams& p, double rel_tol = 1e-9);

}  // namespace dvspix
