#include "mcfi/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mcfi {

SolverConfig SolverConfig::burgers1d() {
  return SolverConfig{5e-4, 20.0, 0.5, DtPolicy::FixedFromInitial, 2.5};
}

SolverConfig SolverConfig::burgers2d() {
  return SolverConfig{1e-4, 20.0, 0.4, DtPolicy::AdaptiveCfl, 1.0};
}

void SolverConfig::validate() const {
  if (!(viscosity > 0.0)) throw ConfigError("viscosity must be positive");
  if (!(beta > 0.0)) throw ConfigError("selector steepness beta must be positive");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("CFL number must lie in (0, 1]");
  if (!(t_end > 0.0)) throw ConfigError("end time must be positive");
}

double smooth_selector(double w, double beta) { return 0.5 * (1.0 + std::tanh(beta * w)); }

double smooth_selector_derivative(double w, double beta) {
  const double t = std::tanh(beta * w);
  return 0.5 * beta * (1.0 - t * t);
}

namespace {

void check_lengths(const StateVector& state, const NodalField& alpha, const Grid& grid) {
  if (state.size() != grid.state_size()) {
    throw DimensionError("state length " + std::to_string(state.size()) + " does not match grid (" +
                         std::to_string(grid.state_size()) + ")");
  }
  if (alpha.size() != grid.node_count()) {
    throw DimensionError("alpha field length does not match the grid");
  }
}

void residual_1d(const double* u, const double* alpha, const Grid& g, const SolverConfig& c,
                 double* r) {
  const int n = g.nx();
  const double h = g.dx();
  const double inv_h = 1.0 / h;
  const double nu_h2 = c.viscosity / (h * h);
  r[0] = 0.0;
  r[n - 1] = 0.0;
  for (int i = 1; i < n - 1; ++i) {
    const double ui = u[i];
    const double w = smooth_selector(ui, c.beta);
    const double back = (ui - u[i - 1]) * inv_h;
    const double fwd = (u[i + 1] - ui) * inv_h;
    r[i] = -alpha[i] * ui * (w * back + (1.0 - w) * fwd) + nu_h2 * (u[i + 1] - 2.0 * ui + u[i - 1]);
  }
}

void residual_2d(const double* state, const double* alpha, const Grid& g, const SolverConfig& c,
                 double* r) {
  const int nx = g.nx();
  const int ny = g.ny();
  const int n = nx * ny;
  const double ihx = 1.0 / g.dx();
  const double ihy = 1.0 / g.dy();
  const double nux = c.viscosity * ihx * ihx;
  const double nuy = c.viscosity * ihy * ihy;
  const double* u = state;
  const double* v = state + n;
  std::fill(r, r + 2 * n, 0.0);
  for (int j = 1; j < ny - 1; ++j) {
    for (int i = 1; i < nx - 1; ++i) {
      const int k = j * nx + i;
      const double uk = u[k];
      const double vk = v[k];
      const double wx = smooth_selector(uk, c.beta);
      const double wy = smooth_selector(vk, c.beta);
      const double a = alpha[k];
      for (int comp = 0; comp < 2; ++comp) {
        const double* q = comp == 0 ? u : v;
        const double qk = q[k];
        const double dx = wx * (qk - q[k - 1]) * ihx + (1.0 - wx) * (q[k + 1] - qk) * ihx;
        const double dy = wy * (qk - q[k - nx]) * ihy + (1.0 - wy) * (q[k + nx] - qk) * ihy;
        const double lap = nux * (q[k + 1] - 2.0 * qk + q[k - 1]) + nuy * (q[k + nx] - 2.0 * qk + q[k - nx]);
        r[comp * n + k] = -a * (uk * dx + vk * dy) + lap;
      }
    }
  }
}

void residual_into(const StateVector& state, const NodalField& alpha, const Grid& grid,
                   const SolverConfig& config, double* r) {
  if (grid.dimension() == 1) {
    residual_1d(state.data(), alpha.data(), grid, config, r);
  } else {
    residual_2d(state.data(), alpha.data(), grid, config, r);
  }
}

}  // namespace

StateVector spatial_residual(const StateVector& state, const NodalField& alpha, const Grid& grid,
                             const SolverConfig& config) {
  check_lengths(state, alpha, grid);
  if (!state.allFinite()) throw NumericError("spatial_residual: non-finite state");
  StateVector r(state.size());
  residual_into(state, alpha, grid, config, r.data());
  return r;
}

StateVector initial_condition(const Grid& grid) {
  StateVector u = StateVector::Zero(grid.state_size());
  constexpr double two_pi = 6.283185307179586476925286766559;
  if (grid.dimension() == 1) {
    for (int i = 0; i < grid.nx(); ++i) {
      const double x = grid.x(i);
      u[i] = std::exp(-(x + 0.7) * (x + 0.7) / 0.05) - 0.8 * std::exp(-(x - 0.7) * (x - 0.7) / 0.05) +
             0.25 * std::sin(two_pi * x);
    }
    return u;
  }
  constexpr double xl = -0.9, yl = 0.1, xr = 0.9, yr = -0.1, radius = 0.7;
  const double r2 = radius * radius;
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const double x = grid.x(i);
      const double y = grid.y(j);
      const double left = std::exp(-((x - xl) * (x - xl) + (y - yl) * (y - yl)) / r2);
      const double right = std::exp(-((x - xr) * (x - xr) + (y - yr) * (y - yr)) / r2);
      u[grid.node(i, j)] = 4.0 * left - 4.0 * right;
    }
  }
  const auto n = grid.node_count();
  const double peak = u.head(n).cwiseAbs().maxCoeff();
  if (peak > 0.0) u.head(n) /= peak;
  return u;
}

double stable_time_step(const StateVector& state, const Grid& grid, const SolverConfig& config) {
  const auto n = grid.node_count();
  double speed = state.head(n).cwiseAbs().maxCoeff();
  double h = grid.dx();
  if (grid.dimension() == 2) {
    speed += state.tail(n).cwiseAbs().maxCoeff();
    h = std::min(grid.dx(), grid.dy());
  }
  return config.cfl * h / (speed + 1e-8);
}

Trajectory simulate(const NodalField& alpha, const Grid& grid, const SolverConfig& config,
                    const StateVector& ic, std::span<const double> frozen_dt) {
  config.validate();
  check_lengths(ic, alpha, grid);

  std::vector<double> dts;
  if (!frozen_dt.empty()) {
    dts.assign(frozen_dt.begin(), frozen_dt.end());
  } else {
    // The step count is known up front only for the fixed policy; the
    // adaptive path grows the list as it marches.
    const double fixed = stable_time_step(ic, grid, config);
    double t = 0.0;
    const double stop = config.t_end * (1.0 - 1e-12);
    if (config.dt_policy == DtPolicy::FixedFromInitial) {
      while (t < stop) {
        double dt = fixed;
        if (t + dt >= stop) dt = config.t_end - t;
        dts.push_back(dt);
        t += dt;
      }
    }
  }

  const bool adaptive = frozen_dt.empty() && config.dt_policy == DtPolicy::AdaptiveCfl;
  std::vector<StateVector> adaptive_states;

  Trajectory traj;
  traj.initial_state = ic;
  if (!adaptive) traj.snapshots.resize(ic.size(), static_cast<Eigen::Index>(dts.size()));

  StateVector u = ic;
  StateVector r(ic.size());
  const double stop = config.t_end * (1.0 - 1e-12);
  double t = 0.0;
  for (int step = 0;; ++step) {
    double dt;
    if (adaptive) {
      if (!(t < stop)) break;
      dt = stable_time_step(u, grid, config);
      if (t + dt >= stop) dt = config.t_end - t;
      dts.push_back(dt);
    } else {
      if (step >= static_cast<int>(dts.size())) break;
      dt = dts[step];
    }
    residual_into(u, alpha, grid, config, r.data());
    u += dt * r;
    t += dt;
    if (!u.allFinite()) {
      throw DivergenceError(step + 1, "simulation diverged at step " + std::to_string(step + 1));
    }
    if (adaptive) {
      adaptive_states.push_back(u);
    } else {
      traj.snapshots.col(step) = u;
    }
  }
  if (adaptive) {
    traj.snapshots.resize(ic.size(), static_cast<Eigen::Index>(adaptive_states.size()));
    for (std::size_t k = 0; k < adaptive_states.size(); ++k) {
      traj.snapshots.col(static_cast<Eigen::Index>(k)) = adaptive_states[k];
    }
  }
  traj.dt = std::move(dts);
  return traj;
}

Trajectory simulate(const DesignSpec& spec, const DesignVector& x, const Grid& grid,
                    const SolverConfig& config, const StateVector& ic,
                    std::span<const double> frozen_dt) {
  return simulate(alpha_field_from_design(spec, x, grid), grid, config, ic, frozen_dt);
}

void add_jacobian_transpose_product(const double* s, const double* alpha, const Grid& grid,
                                    const SolverConfig& c, const double* y, double scale,
                                    double* out) {
  const double beta = c.beta;
  if (grid.dimension() == 1) {
    const int n = grid.nx();
    const double ih = 1.0 / grid.dx();
    const double nu_h2 = c.viscosity * ih * ih;
    for (int i = 1; i < n - 1; ++i) {
      const double yi = scale * y[i];
      if (yi == 0.0) continue;
      const double ui = s[i];
      const double w = smooth_selector(ui, beta);
      const double dw = smooth_selector_derivative(ui, beta);
      const double back = (ui - s[i - 1]) * ih;
      const double fwd = (s[i + 1] - ui) * ih;
      const double ca = -alpha[i] * yi;
      const double diag = w * back + (1.0 - w) * fwd + ui * (dw * (back - fwd) + (2.0 * w - 1.0) * ih);
      out[i - 1] += ca * (-ui * w * ih) + nu_h2 * yi;
      out[i + 1] += ca * (ui * (1.0 - w) * ih) + nu_h2 * yi;
      out[i] += ca * diag - 2.0 * nu_h2 * yi;
    }
    return;
  }

  const int nx = grid.nx();
  const int ny = grid.ny();
  const int n = nx * ny;
  const double ihx = 1.0 / grid.dx();
  const double ihy = 1.0 / grid.dy();
  const double nux = c.viscosity * ihx * ihx;
  const double nuy = c.viscosity * ihy * ihy;
  const double* u = s;
  const double* v = s + n;
  for (int j = 1; j < ny - 1; ++j) {
    for (int i = 1; i < nx - 1; ++i) {
      const int k = j * nx + i;
      const double uk = u[k];
      const double vk = v[k];
      const double wx = smooth_selector(uk, beta);
      const double wy = smooth_selector(vk, beta);
      const double dwx = smooth_selector_derivative(uk, beta);
      const double dwy = smooth_selector_derivative(vk, beta);
      const double a = alpha[k];
      for (int comp = 0; comp < 2; ++comp) {
        const double yk = scale * y[comp * n + k];
        if (yk == 0.0) continue;
        const double* q = comp == 0 ? u : v;
        double* o = out + comp * n;
        const double qk = q[k];
        const double bx = (qk - q[k - 1]) * ihx;
        const double fx = (q[k + 1] - qk) * ihx;
        const double by = (qk - q[k - nx]) * ihy;
        const double fy = (q[k + nx] - qk) * ihy;
        const double ca = -a * yk;
        o[k - 1] += ca * (-uk * wx * ihx) + nux * yk;
        o[k + 1] += ca * (uk * (1.0 - wx) * ihx) + nux * yk;
        o[k - nx] += ca * (-vk * wy * ihy) + nuy * yk;
        o[k + nx] += ca * (vk * (1.0 - wy) * ihy) + nuy * yk;
        o[k] += ca * (uk * (2.0 * wx - 1.0) * ihx + vk * (2.0 * wy - 1.0) * ihy) -
                2.0 * (nux + nuy) * yk;
        // Coefficient dependence on the local velocity (advecting speed and
        // selector weight).
        out[k] += ca * (wx * bx + (1.0 - wx) * fx + uk * dwx * (bx - fx));
        out[n + k] += ca * (wy * by + (1.0 - wy) * fy + vk * dwy * (by - fy));
      }
    }
  }
}

StateVector jacobian_transpose_product(const StateVector& state, const NodalField& alpha,
                                       const Grid& grid, const SolverConfig& config,
                                       const StateVector& y) {
  check_lengths(state, alpha, grid);
  if (y.size() != state.size()) throw DimensionError("adjoint vector length does not match state");
  StateVector out = StateVector::Zero(state.size());
  add_jacobian_transpose_product(state.data(), alpha.data(), grid, config, y.data(), 1.0, out.data());
  return out;
}

void add_design_jacobian_transpose_product(const double* s, const Grid& grid,
                                           const SolverConfig& c, const double* y, double scale,
                                           double* out) {
  if (grid.dimension() == 1) {
    const int n = grid.nx();
    const double ih = 1.0 / grid.dx();
    for (int i = 1; i < n - 1; ++i) {
      const double ui = s[i];
      const double w = smooth_selector(ui, c.beta);
      const double adv = ui * (w * (ui - s[i - 1]) + (1.0 - w) * (s[i + 1] - ui)) * ih;
      out[i] -= scale * adv * y[i];
    }
    return;
  }
  const int nx = grid.nx();
  const int ny = grid.ny();
  const int n = nx * ny;
  const double ihx = 1.0 / grid.dx();
  const double ihy = 1.0 / grid.dy();
  const double* u = s;
  const double* v = s + n;
  for (int j = 1; j < ny - 1; ++j) {
    for (int i = 1; i < nx - 1; ++i) {
      const int k = j * nx + i;
      const double uk = u[k];
      const double vk = v[k];
      const double wx = smooth_selector(uk, c.beta);
      const double wy = smooth_selector(vk, c.beta);
      double acc = 0.0;
      for (int comp = 0; comp < 2; ++comp) {
        const double* q = comp == 0 ? u : v;
        const double qk = q[k];
        const double dx = (wx * (qk - q[k - 1]) + (1.0 - wx) * (q[k + 1] - qk)) * ihx;
        const double dy = (wy * (qk - q[k - nx]) + (1.0 - wy) * (q[k + nx] - qk)) * ihy;
        acc += (uk * dx + vk * dy) * y[comp * n + k];
      }
      out[k] -= scale * acc;
    }
  }
}

NodalField design_jacobian_transpose_product(const StateVector& state, const Grid& grid,
                                             const SolverConfig& config, const StateVector& y) {
  if (state.size() != grid.state_size() || y.size() != state.size()) {
    throw DimensionError("design_jacobian_transpose_product: length mismatch");
  }
  NodalField out = NodalField::Zero(grid.node_count());
  add_design_jacobian_transpose_product(state.data(), grid, config, y.data(), 1.0, out.data());
  return out;
}

}  // namespace mcfi
