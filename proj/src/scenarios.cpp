#include "mcfi/scenarios.hpp"

#include <algorithm>
#include <cmath>

namespace mcfi {

StripProfile strip_profile_from_string(const std::string& name) {
  if (name == "ramp") return StripProfile::Ramp;
  if (name == "multi_peak") return StripProfile::MultiPeak;
  throw ConfigError("unknown strip profile '" + name + "' (expected ramp or multi_peak)");
}

std::string to_string(StripProfile profile) {
  return profile == StripProfile::Ramp ? "ramp" : "multi_peak";
}

double ramp_alpha(double y) {
  if (std::abs(y) > 0.8) return 1.0;
  return y <= 0.0 ? 1.0 + (y + 0.8) / 0.8 : 1.0 + (0.8 - y) / 0.8;
}

namespace {

// Upper half of the multi-peak profile, 0 <= y <= 0.8.
double multi_peak_half(double y) {
  if (y < 0.16) return 1.0 + (3.0 - 1.0) / 0.16 * y;
  if (y < 0.32) return 3.0 - (3.0 - 0.6) / 0.16 * (y - 0.16);
  if (y < 0.48) return 0.6 + (2.0 - 0.6) / 0.16 * (y - 0.32);
  if (y < 0.64) return 2.0 - (2.0 - 0.6) / 0.16 * (y - 0.48);
  return 0.6 + (1.0 - 0.6) / 0.16 * (y - 0.64);
}

}  // namespace

double multi_peak_alpha(double y) {
  if (std::abs(y) > 0.8) return 1.0;
  return multi_peak_half(std::abs(y));
}

DesignVector smooth_strips(const DesignVector& values, double sigma_strips) {
  if (!(sigma_strips > 0.0)) throw ConfigError("smoothing width must be positive");
  const int n = static_cast<int>(values.size());
  const int half = static_cast<int>(std::ceil(3.0 * sigma_strips));
  Vector kernel(2 * half + 1);
  for (int k = -half; k <= half; ++k) kernel[k + half] = std::exp(-0.5 * k * k / (sigma_strips * sigma_strips));
  kernel /= kernel.sum();
  DesignVector out(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = -half; k <= half; ++k) acc += kernel[k + half] * values[std::clamp(i + k, 0, n - 1)];
    out[i] = acc;
  }
  return out;
}

DesignVector strip_profile(const Strips2D& strips, StripProfile profile) {
  DesignVector v(strips.count);
  for (int s = 0; s < strips.count; ++s) {
    const double y = strips.strip_center(s);
    v[s] = profile == StripProfile::Ramp ? ramp_alpha(y) : multi_peak_alpha(y);
  }
  if (profile == StripProfile::MultiPeak) {
    // Three strips wide; 0.048 for the default band.
    v = smooth_strips(v, 3.0);
  }
  return v;
}

}  // namespace mcfi
