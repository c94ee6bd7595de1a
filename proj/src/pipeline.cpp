#include "mcfi/pipeline.hpp"

#include "mcfi/adjoint.hpp"

namespace mcfi {

InversionProblem::InversionProblem(Grid grid, SolverConfig solver, DesignSpec design,
                                   StateVector initial_state, ObjectiveSpec objective)
    : grid_(std::move(grid)),
      solver_(solver),
      design_(std::move(design)),
      initial_state_(std::move(initial_state)),
      objective_(std::move(objective)) {
  solver_.validate();
  objective_.validate();
  if (design_.dimension() != grid_.dimension()) {
    throw DimensionError("design parameterization does not match the grid dimension");
  }
  if (initial_state_.size() != grid_.state_size()) {
    throw DimensionError("initial state does not match the grid");
  }
}

void InversionProblem::set_objective(ObjectiveSpec objective) {
  objective.validate();
  objective_ = std::move(objective);
}

ForwardSolution InversionProblem::solve(const DesignVector& x, std::span<const double> frozen_dt) const {
  if (x.size() != design_.size()) {
    throw DimensionError("design vector has " + std::to_string(x.size()) + " entries, expected " +
                         std::to_string(design_.size()));
  }
  ForwardSolution sol;
  sol.x = x;
  sol.alpha = alpha_field_from_design(design_, x, grid_);
  sol.trajectory = simulate(sol.alpha, grid_, solver_, initial_state_, frozen_dt);
  sol.snapshots = center(sol.trajectory);
  const int m = objective_.modes_required();
  if (m > 0) {
    sol.pod = compute_pod(sol.snapshots, m);
    sol.modes = align_to_targets(objective_, sol.pod.modes);
  }
  sol.objective = evaluate(objective_, sol.snapshots.mean, sol.modes);
  return sol;
}

double InversionProblem::objective(const DesignVector& x, std::span<const double> frozen_dt) const {
  return solve(x, frozen_dt).objective;
}

DesignVector InversionProblem::gradient(const ForwardSolution& solution) const {
  return total_gradient(design_, grid_, solver_, objective_, solution);
}

}  // namespace mcfi
