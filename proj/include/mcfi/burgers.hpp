#pragma once

#include <span>

#include "mcfi/model.hpp"

namespace mcfi {

enum class DtPolicy {
  /// dt = cfl * min(dx,dy) / (max|u0| + max|v0|) for every step.
  FixedFromInitial,
  /// dt recomputed from the current state with the same formula.
  AdaptiveCfl,
};

struct SolverConfig {
  double viscosity = 5e-4;
  /// Steepness of the tanh upwind selector.
  double beta = 20.0;
  double cfl = 0.5;
  DtPolicy dt_policy = DtPolicy::FixedFromInitial;
  double t_end = 2.5;

  static SolverConfig burgers1d();
  static SolverConfig burgers2d();
  void validate() const;
};

/// 0.5 * (1 + tanh(beta * w)); weight of the backward difference.
double smooth_selector(double w, double beta);
double smooth_selector_derivative(double w, double beta);

/// Semi-discrete right-hand side r_s(u; alpha). Boundary rows are zero.
StateVector spatial_residual(const StateVector& state, const NodalField& alpha, const Grid& grid,
                             const SolverConfig& config);

/// Two-pulse (1D) or normalized two-packet (2D) initial condition.
StateVector initial_condition(const Grid& grid);

/// Step size the dt policy selects for `state`.
double stable_time_step(const StateVector& state, const Grid& grid, const SolverConfig& config);

/// Forward-Euler march to config.t_end. A non-empty `frozen_dt` replaces the
/// dt policy with that exact step sequence.
Trajectory simulate(const NodalField& alpha, const Grid& grid, const SolverConfig& config,
                    const StateVector& ic, std::span<const double> frozen_dt = {});

Trajectory simulate(const DesignSpec& spec, const DesignVector& x, const Grid& grid,
                    const SolverConfig& config, const StateVector& ic,
                    std::span<const double> frozen_dt = {});

/// (d r_s / d u)^T y at `state`, including the selector derivatives.
StateVector jacobian_transpose_product(const StateVector& state, const NodalField& alpha,
                                       const Grid& grid, const SolverConfig& config,
                                       const StateVector& y);

/// (d r_s / d alpha)^T y, one value per node.
NodalField design_jacobian_transpose_product(const StateVector& state, const Grid& grid,
                                             const SolverConfig& config, const StateVector& y);

/// Accumulating variants used inside the adjoint sweep: out += scale * (...).
void add_jacobian_transpose_product(const double* state, const double* alpha, const Grid& grid,
                                    const SolverConfig& config, const double* y, double scale,
                                    double* out);
void add_design_jacobian_transpose_product(const double* state, const Grid& grid,
                                           const SolverConfig& config, const double* y,
                                           double scale, double* out);

}  // namespace mcfi
