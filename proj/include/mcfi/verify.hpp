#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcfi/pipeline.hpp"

namespace mcfi {

/// Step used by the forward-difference oracle.
inline constexpr double kDefaultFdStep = 1e-6;

struct GradCheckRow {
  /// Zero-based design index.
  int component = 0;
  std::string label;
  double adjoint = 0.0;
  double fd = 0.0;
  double abs_diff = 0.0;
  /// |adjoint - fd| / |fd|; NaN when fd == 0 (only abs_diff is meaningful).
  double rel_err = 0.0;
  /// False when the perturbed run failed; `error` says why.
  bool valid = true;
  std::string error;
};

struct GradCheckReport {
  std::vector<GradCheckRow> rows;
  double h_fd = kDefaultFdStep;
  std::string objective;
  std::string design;
  double objective_value = 0.0;
  /// Wall times in seconds: one full objective evaluation, one adjoint
  /// gradient, and all perturbed evaluations together.
  double forward_seconds = 0.0;
  double adjoint_seconds = 0.0;
  double fd_seconds = 0.0;

  /// Largest relative error over valid rows with a nonzero FD value.
  double max_rel_err() const;
  /// True when every row is valid and within `threshold` (relative error,
  /// or absolute difference for zero-FD rows).
  bool passes(double threshold) const;
};

/// "alpha_c_<1-based index>".
std::string component_label(int component);

/// Describes the parameterization ("gaussian_bumps(4)", "strips(100)").
std::string describe(const DesignSpec& spec);

/// [f(x + h e_i) - f(x)] / h for the listed components (all when empty).
/// Entries not listed are left at zero.
DesignVector fd_gradient(const std::function<double(const DesignVector&)>& f, const DesignVector& x,
                         double h, std::span<const int> components = {});

struct FdGradient {
  DesignVector values;
  /// One entry per listed component: empty on success.
  std::vector<std::string> errors;
};

/// Forward differences of the full pipeline around a solved baseline; every
/// perturbed run reuses the baseline dt sequence and aligns to the same
/// targets.
FdGradient fd_gradient(const InversionProblem& problem, const ForwardSolution& baseline, double h,
                       std::span<const int> components = {});

/// Adjoint versus forward-difference comparison at `x`. An empty component
/// list checks every design variable.
GradCheckReport grad_check(const InversionProblem& problem, const DesignVector& x,
                           double h = kDefaultFdStep, std::span<const int> components = {});

/// Serializes a report: one comment header line, then
/// component,adjoint,fd,abs_diff,rel_err.
void write_report_csv(std::ostream& out, const GradCheckReport& report, const std::string& config_hash);

struct LinearizationResult {
  bool passed = true;
  double worst_rel_err = 0.0;
  int trials = 0;
  int skipped = 0;
};

/// Randomized dot-product tests of both transpose products against central
/// differences of the spatial residual.
LinearizationResult linearization_check(const StateVector& state, const NodalField& alpha, const Grid& grid,
                                        const SolverConfig& config, int trials, std::uint64_t seed,
                                        double tolerance = 1e-6);

/// Same test for caller-chosen (direction, weight) pairs. A pair with a zero
/// vector is skipped.
LinearizationResult linearization_check(const StateVector& state, const NodalField& alpha, const Grid& grid,
                                        const SolverConfig& config,
                                        std::span<const std::pair<StateVector, StateVector>> pairs,
                                        double tolerance = 1e-6);

}  // namespace mcfi
