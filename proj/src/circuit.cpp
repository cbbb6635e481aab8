#include "dvspix/circuit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dvspix {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("PixelParams: ") + what);
}

}  // namespace

void PixelParams::validate() const {
  require(theta_on > 0.0, "theta_on must be > 0");
  require(theta_off > 0.0, "theta_off must be > 0");
  require(gain_diff > 0.0, "gain_diff must be > 0");
  require(kappa_sf > 0.0 && kappa_sf <= 1.0, "kappa_sf must be in (0, 1]");
  require(kappa_fb > 0.0 && kappa_fb <= 1.0, "kappa_fb must be in (0, 1]");
  require(v_thermal > 0.0, "v_thermal must be > 0");
  require(gain_cascode > 0.0, "gain_cascode must be > 0");
  require(c_junction > 0.0, "c_junction must be > 0");
  require(k_photo > 0.0, "k_photo must be > 0");
  require(delta_q_e >= 0.0, "delta_q_e must be >= 0");
  require(std::isinf(r_shunt) && r_shunt > 0.0, "r_shunt is modeled only at its idealized +inf");
  require(r_series == 0.0, "r_series is modeled only at its idealized 0");
}

double PixelParams::contrast_threshold(double theta) const {
  return theta * kappa_fb / (gain_diff * v_thermal * kappa_sf);
}

double luma_to_photocurrent(double luma, const PixelParams& p) {
  if (luma < 0.0) throw std::domain_error("luma_to_photocurrent: negative luma");
  return p.k_photo * luma;
}

double delta_vd(double i_old, double i_new, const PixelParams& p) {
  if (i_old <= 0.0 || i_new <= 0.0)
    throw std::domain_error("delta_vd: photocurrents must be positive");
  const double gain = p.gain_diff * p.v_thermal * p.kappa_sf / p.kappa_fb;
  return -gain * std::log(i_new / i_old);
}

Polarity threshold_classify(double v_d, const PixelParams& p) {
  if (v_d >= p.theta_off) return Polarity::Off;
  if (v_d <= -p.theta_on) return Polarity::On;
  return Polarity::None;
}

double delta_vpd_from_vp(double delta_vp, const PixelParams& p) {
  if (p.gain_cascode <= 0.0)
    throw std::domain_error("delta_vpd_from_vp: gain_cascode must be > 0");
  return -delta_vp / p.gain_cascode;
}

double charge_delta(double delta_vpd, const PixelParams& p) {
  return delta_vpd * p.c_junction;
}

double event_delay(double delta_i_pd, const PixelParams& p) {
  if (p.delta_q_e == 0.0) return 0.0;
  const double di = std::abs(delta_i_pd);
  if (di == 0.0) return std::numeric_limits<double>::infinity();
  return p.delta_q_e / di;
}

double delay_from_speed(double mu, double k_delay) {
  if (mu <= 0.0) throw std::domain_error("delay_from_speed: mu must be > 0");
  if (k_delay <= 0.0) throw std::domain_error("delay_from_speed: k_delay must be > 0");
  return k_delay / mu;
}

double calibrate_k_delay(const std::vector<std::pair<double, double>>& obs) {
  if (obs.empty()) throw std::invalid_argument("calibrate_k_delay: no observations");
  double num = 0.0;
  double den = 0.0;
  for (const auto& [mu, gap] : obs) {
    if (mu <= 0.0 || gap <= 0.0)
      throw std::invalid_argument("calibrate_k_delay: mu and gap must be > 0");
    num += gap / mu;
    den += 1.0 / (mu * mu);
  }
  return num / den;
}

double delta_q_from_threshold(double theta, const PixelParams& p) {
  // Comparator swing referred back to the photodiode node: theta over the
  // differencing gain and source follower, then through the cascode.
  const double dvp = theta / (p.gain_diff * p.kappa_sf);
  return p.c_junction * dvp / p.gain_cascode;
}

bool delta_q_consistent(const PixelParams& p, double rel_tol) {
  for (double theta : {p.theta_on, p.theta_off}) {
    const double want = delta_q_from_threshold(theta, p);
    if (std::abs(p.delta_q_e - want) > rel_tol * want) return false;
  }
  return true;
}

}  // namespace dvspix
