#pragma once

#include <random>

#include "mcfi/pipeline.hpp"

namespace mcfi::test {

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale);
}

inline double rel_diff(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

/// Small 1D problem: short horizon so tests stay fast.
inline InversionProblem small_problem_1d(ObjectiveKind kind, int nodes = 41, double t_end = 0.4) {
  const Grid grid = Grid::line(nodes);
  SolverConfig cfg = SolverConfig::burgers1d();
  cfg.t_end = t_end;
  const DesignSpec design = DesignSpec::gaussian_bumps();
  const StateVector ic = initial_condition(grid);

  DesignVector target_x(4);
  target_x << 0.25, -0.15, 0.05, 0.15;
  const Trajectory tt = simulate(design, target_x, grid, cfg, ic);
  const CenteredSnapshots tc = center(tt);
  const auto tm = compute_modes(tc, 3);

  ObjectiveSpec obj;
  obj.kind = kind;
  obj.mode_count = 2;
  obj.lambda = 0.7;
  for (const auto& t : tm) {
    obj.targets.modes.push_back(t.phi);
    obj.targets.sigmas.push_back(t.sigma);
  }
  obj.targets.mean = tc.mean;
  return InversionProblem(grid, cfg, design, ic, obj);
}

/// Small 2D problem with a handful of strips.
inline InversionProblem small_problem_2d(ObjectiveKind kind, int n = 15, double t_end = 0.15) {
  const Grid grid = Grid::square(n, n);
  SolverConfig cfg = SolverConfig::burgers2d();
  cfg.t_end = t_end;
  Strips2D strips;
  strips.count = 5;
  const DesignSpec design = DesignSpec::strips(strips);
  const StateVector ic = initial_condition(grid);

  DesignVector target_x(5);
  target_x << 0.8, 1.6, 2.4, 1.2, 0.9;
  const Trajectory tt = simulate(design, target_x, grid, cfg, ic);
  const CenteredSnapshots tc = center(tt);
  const auto tm = compute_modes(tc, 3);

  ObjectiveSpec obj;
  obj.kind = kind;
  obj.mode_count = 2;
  for (const auto& t : tm) {
    obj.targets.modes.push_back(t.phi);
    obj.targets.sigmas.push_back(t.sigma);
  }
  obj.targets.mean = tc.mean;
  return InversionProblem(grid, cfg, design, ic, obj);
}

}  // namespace mcfi::test
