#pragma once

#include <string>

#include "mcfi/model.hpp"

namespace mcfi {

/// Named strip profiles for the 2D problem.
enum class StripProfile {
  /// 1 at the band edges rising linearly to 2 at y = 0.
  Ramp,
  /// Symmetric piecewise-linear multi-peak profile between 0.6 and 3.0,
  /// smoothed across strips.
  MultiPeak,
};

StripProfile strip_profile_from_string(const std::string& name);
std::string to_string(StripProfile profile);

/// Unsmoothed profile value at height y (1 outside the band).
double ramp_alpha(double y);
double multi_peak_alpha(double y);

/// Discrete Gaussian smoothing over strip indices. The kernel has standard
/// deviation `sigma_strips`, is truncated at 3 sigma and renormalized, and
/// indices past either end are clamped to the end strip.
DesignVector smooth_strips(const DesignVector& values, double sigma_strips);

/// Strip values for a named profile, sampled at strip centers. MultiPeak is
/// smoothed with sigma = 3 strips; Ramp is returned as sampled.
DesignVector strip_profile(const Strips2D& strips, StripProfile profile);

}  // namespace mcfi
