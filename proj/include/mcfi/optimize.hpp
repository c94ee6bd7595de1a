#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcfi/pipeline.hpp"

namespace mcfi {

struct OptimizeOptions {
  int max_iterations = 200;
  /// Bound on the infinity norm of the projected gradient.
  double gradient_tolerance = 1e-10;
  /// Stop when an accepted step lowers f by less than this (relative to
  /// max(1, |f|)); also the "target reached" level at a non-differentiable
  /// minimum.
  double objective_tolerance = 1e-12;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  int memory = 10;
  /// Largest infinity-norm move of the first (unscaled) step, as a fraction
  /// of the widest bound interval.
  double initial_step_fraction = 0.1;

  void validate() const;
};

enum class Termination {
  GradientTolerance,
  ObjectiveTolerance,
  ReachedTarget,
  MaxIterations,
  LineSearchFailure,
  EvaluationFailure,
};

std::string to_string(Termination reason);

struct IterationRecord {
  int iteration = 0;
  double f = 0.0;
  double grad_inf_norm = 0.0;
  /// Accepted line-search step (0 for the starting point).
  double step = 0.0;
  DesignVector x;
};

struct OptimizeHistory {
  std::vector<IterationRecord> records;
  Termination reason = Termination::MaxIterations;
  std::string message;
  std::vector<std::string> warnings;

  bool converged() const;
};

struct OptimizeResult {
  DesignVector x;
  double f = 0.0;
  OptimizeHistory history;
};

/// Objective oracle. `gradient` is called only right after `value` at the
/// same point, so implementations may reuse state from that evaluation.
struct Objective {
  std::function<double(const DesignVector&)> value;
  std::function<DesignVector()> gradient;
};

/// Projected limited-memory BFGS with Armijo backtracking inside the box
/// [lower, upper]. The quasi-Newton memory is dropped whenever the set of
/// active bounds changes.
OptimizeResult minimize(const Objective& objective, const DesignVector& x0, const Vector& lower,
                        const Vector& upper, const OptimizeOptions& options = {},
                        const std::function<void(const IterationRecord&)>& on_iteration = {});

/// Same, with values from the forward pipeline and gradients from the adjoint.
OptimizeResult minimize(const InversionProblem& problem, const DesignVector& x0,
                        const OptimizeOptions& options = {},
                        const std::function<void(const IterationRecord&)>& on_iteration = {});

/// iter,f,grad_inf_norm,step,x_0..x_{n-1} with a header comment carrying the
/// termination reason.
void write_history_csv(std::ostream& out, const OptimizeHistory& history, const std::string& config_hash);

}  // namespace mcfi
