#include "dvspix/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dvspix {

double RandomStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RandomStream::inverse_gaussian(double mean, double shape) {
  if (mean <= 0.0 || shape <= 0.0)
    throw std::domain_error("inverse_gaussian: mean and shape must be > 0");
  const double z = normal();
  const double w = mean * z * z;
  const double cand =
      mean + (mean / (2.0 * shape)) * (w - std::sqrt(w * (4.0 * shape + w)));
  const double u = uniform();
  if (u <= mean / (mean + cand)) return cand;
  return mean * mean / cand;
}

}  // namespace dvspix
