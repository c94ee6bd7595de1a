#pragma once

#include <span>
#include <string>
#include <vector>

#include "mcfi/burgers.hpp"
#include "mcfi/objectives.hpp"
#include "mcfi/pod.hpp"

namespace mcfi {

/// Everything one objective evaluation produces, kept for the adjoint.
struct ForwardSolution {
  DesignVector x;
  NodalField alpha;
  Trajectory trajectory;
  CenteredSnapshots snapshots;
  /// Canonical-sign modes and the full thin spectrum.
  PodResult pod;
  /// pod.modes after alignment to the objective's targets.
  std::vector<SingularTriplet> modes;
  double objective = 0.0;
};

/// simulate -> center -> compute_modes -> align -> evaluate for one design.
class InversionProblem {
 public:
  InversionProblem(Grid grid, SolverConfig solver, DesignSpec design, StateVector initial_state,
                   ObjectiveSpec objective);

  ForwardSolution solve(const DesignVector& x, std::span<const double> frozen_dt = {}) const;
  double objective(const DesignVector& x, std::span<const double> frozen_dt = {}) const;
  /// Adjoint gradient at a solved point.
  DesignVector gradient(const ForwardSolution& solution) const;

  const Grid& grid() const { return grid_; }
  const SolverConfig& solver() const { return solver_; }
  const DesignSpec& design() const { return design_; }
  const StateVector& initial_state() const { return initial_state_; }
  const ObjectiveSpec& objective_spec() const { return objective_; }
  void set_objective(ObjectiveSpec objective);

 private:
  Grid grid_;
  SolverConfig solver_;
  DesignSpec design_;
  StateVector initial_state_;
  ObjectiveSpec objective_;
};

}  // namespace mcfi
