#include "mcfi/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>

#include "mcfi/csv.hpp"
#include "mcfi/optimize.hpp"
#include "mcfi/verify.hpp"

namespace mcfi {

namespace fs = std::filesystem;

namespace {

// Files written by one command; removed again unless the command commits.
class OutputSet {
 public:
  explicit OutputSet(const fs::path& dir) : dir_(dir) { fs::create_directories(dir_); }
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
  }

  fs::path add(const std::string& name) {
    written_.push_back(dir_ / name);
    return written_.back();
  }
  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  bool committed_ = false;
};

// Coordinate columns followed by one column per field (u/v pairs in 2D).
void write_state_fields(const fs::path& path, const Grid& grid, const std::vector<std::string>& names,
                        const std::vector<StateVector>& fields, const std::string& hash,
                        const std::string& extra = {}) {
  const int n = grid.node_count();
  const bool two_d = grid.dimension() == 2;
  std::vector<std::string> cols{"x"};
  if (two_d) cols.push_back("y");
  for (const auto& name : names) {
    if (two_d) {
      cols.push_back(name + "_u");
      cols.push_back(name + "_v");
    } else {
      cols.push_back(name);
    }
  }
  Matrix data(n, cols.size());
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const int k = grid.node(i, j);
      int c = 0;
      data(k, c++) = grid.x(i);
      if (two_d) data(k, c++) = grid.y(j);
      for (const auto& f : fields) {
        data(k, c++) = f[k];
        if (two_d) data(k, c++) = f[n + k];
      }
    }
  }
  write_csv(path, cols, data, hash, extra);
}

void write_design(const fs::path& path, const RunConfig& config, const DesignVector& x, const std::string& hash) {
  Matrix data(x.size(), 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    data(i, 0) = static_cast<double>(i + 1);
    data(i, 1) = config.scenario == Scenario::Burgers1D ? config.bumps.centers[i]
                                                        : config.strips.strip_center(static_cast<int>(i));
    data(i, 2) = x[i];
  }
  const std::string where = config.scenario == Scenario::Burgers1D ? "center" : "y";
  write_csv(path, {"component", where, "alpha_c"}, data, hash);
}

int column_index(const CsvTable& t, const std::string& name, const fs::path& path) {
  auto it = std::find(t.columns.begin(), t.columns.end(), name);
  if (it == t.columns.end()) throw ConfigError("'" + path.string() + "' has no column '" + name + "'");
  return static_cast<int>(it - t.columns.begin());
}

std::string modes_label(int i) { return "phi_" + std::to_string(i + 1); }

std::vector<StateVector> leading_phis(const std::vector<SingularTriplet>& modes) {
  std::vector<StateVector> out;
  for (const auto& t : modes) out.push_back(t.phi);
  return out;
}

std::vector<std::string> mode_names(std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(modes_label(static_cast<int>(i)));
  return out;
}

// Nearest completed step to t; ties go to the earlier step.
int nearest_step(const std::vector<double>& times, double t) {
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return static_cast<int>(times.size()) - 1;
  const int hi = static_cast<int>(it - times.begin());
  return (times[hi] - t < t - times[hi - 1]) ? hi : hi - 1;
}

}  // namespace

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error) || dynamic_cast<const DimensionError*>(&error) ||
      dynamic_cast<const fs::filesystem_error*>(&error)) {
    return kExitConfig;
  }
  return kExitNumeric;
}

StateVector read_state_field(const fs::path& path, const Grid& grid, const std::string& name) {
  if (!fs::exists(path)) throw ConfigError("target file '" + path.string() + "' does not exist");
  const CsvTable t = read_csv(path);
  const int n = grid.node_count();
  if (t.data.rows() != n) {
    throw DimensionError("'" + path.string() + "' has " + std::to_string(t.data.rows()) + " rows, expected " +
                         std::to_string(n));
  }
  StateVector out(grid.state_size());
  if (grid.dimension() == 1) {
    out = t.data.col(column_index(t, name, path));
  } else {
    out.head(n) = t.data.col(column_index(t, name + "_u", path));
    out.tail(n) = t.data.col(column_index(t, name + "_v", path));
  }
  if (!out.allFinite()) throw ConfigError("'" + path.string() + "' contains empty or non-finite values");
  return out;
}

ObjectiveTargets generate_targets(const RunConfig& config, const DesignVector& design, int modes) {
  const Grid grid = config.grid();
  const Trajectory traj = simulate(config.design(), design, grid, config.solver, config.initial_condition());
  const CenteredSnapshots snaps = center(traj);
  ObjectiveTargets t;
  t.mean = snaps.mean;
  for (const auto& m : compute_modes(snaps, modes)) {
    t.modes.push_back(m.phi);
    t.sigmas.push_back(m.sigma);
  }
  return t;
}

ResolvedTargets resolve_targets(const RunConfig& config) {
  ResolvedTargets r;
  switch (config.target_source) {
    case TargetSource::Design:
      r.design = config.target_design;
      break;
    case TargetSource::Profile:
      r.design = strip_profile(config.strips, config.target_profile);
      break;
    case TargetSource::Files: {
      const Grid grid = config.grid();
      const fs::path& dir = config.target_dir;
      const CsvTable sig = read_csv(dir / "target_sigma.csv");
      const int sc = column_index(sig, "sigma", dir / "target_sigma.csv");
      const int m = std::min<int>(config.target_modes, static_cast<int>(sig.data.rows()));
      for (int i = 0; i < m; ++i) {
        r.targets.modes.push_back(
            read_state_field(dir / ("target_mode_" + std::to_string(i + 1) + ".csv"), grid, "phi"));
        r.targets.sigmas.push_back(sig.data(i, sc));
      }
      if (fs::exists(dir / "target_mean.csv")) r.targets.mean = read_state_field(dir / "target_mean.csv", grid, "mean");
      if (fs::exists(dir / "alpha_target.csv")) {
        const CsvTable a = read_csv(dir / "alpha_target.csv");
        const DesignVector x = a.data.col(column_index(a, "alpha_c", dir / "alpha_target.csv"));
        if (x.size() == config.design_size()) r.design = x;
      }
      return r;
    }
  }
  r.targets = generate_targets(config, *r.design, config.target_modes);
  return r;
}

ObjectiveSpec make_objective(const RunConfig& config, ObjectiveTargets targets) {
  ObjectiveSpec spec;
  spec.kind = config.objective;
  spec.mode_count = config.mode_count;
  spec.lambda = config.lambda;
  spec.targets = std::move(targets);
  spec.validate();
  return spec;
}

InversionProblem make_problem(const RunConfig& config, ObjectiveTargets targets) {
  return InversionProblem(config.grid(), config.solver, config.design(), config.initial_condition(),
                          make_objective(config, std::move(targets)));
}

std::vector<int> grad_check_components(const RunConfig& config) {
  if (!config.fd_components.empty()) return config.fd_components;
  std::vector<int> all(config.design_size());
  std::iota(all.begin(), all.end(), 0);
  if (config.fd_sample == 0) return all;
  std::mt19937_64 rng(config.seed);
  // Partial Fisher-Yates with an explicit draw so the order is portable.
  for (int i = 0; i < config.fd_sample; ++i) {
    const auto span = static_cast<std::uint64_t>(all.size() - i);
    std::swap(all[i], all[i + static_cast<int>(rng() % span)]);
  }
  all.resize(config.fd_sample);
  std::sort(all.begin(), all.end());
  return all;
}

int cmd_forward(const RunConfig& config, std::ostream& log) {
  const Grid grid = config.grid();
  const Trajectory traj = simulate(config.design(), config.initial_design, grid, config.solver, config.initial_condition());

  std::vector<double> times(traj.steps() + 1, 0.0);
  for (int k = 0; k < traj.steps(); ++k) times[k + 1] = times[k] + traj.dt[k];

  OutputSet out(config.output_dir);
  const std::string& h = config.hash;
  std::vector<std::string> names;
  std::vector<StateVector> states;
  Matrix tt(config.output_times.size(), 4);
  for (std::size_t i = 0; i < config.output_times.size(); ++i) {
    const int step = nearest_step(times, config.output_times[i]);
    names.push_back("u_" + std::to_string(i));
    states.push_back(traj.state(step));
    tt.row(i) << static_cast<double>(i), config.output_times[i], static_cast<double>(step), times[step];
  }
  write_state_fields(out.add("snapshots.csv"), grid, names, states, h);
  write_csv(out.add("times.csv"), {"index", "requested", "step", "t"}, tt, h);

  Matrix dt(traj.steps(), 3);
  for (int k = 0; k < traj.steps(); ++k) dt.row(k) << static_cast<double>(k + 1), traj.dt[k], times[k + 1];
  write_csv(out.add("dt_sequence.csv"), {"step", "dt", "t"}, dt, h);

  if (grid.dimension() == 2) {
    const int n = grid.node_count();
    for (std::size_t i = 0; i < states.size(); ++i) {
      const StateVector& s = states[i];
      Matrix m(n, 3);
      for (int j = 0; j < grid.ny(); ++j) {
        for (int c = 0; c < grid.nx(); ++c) {
          const int k = grid.node(c, j);
          m.row(k) << grid.x(c), grid.y(j), std::hypot(s[k], s[n + k]);
        }
      }
      write_csv(out.add("magnitude_" + std::to_string(i) + ".csv"), {"x", "y", "magnitude"}, m, h,
                "t=" + format_double(tt(i, 3)));
    }
  }
  out.commit();
  log << "forward: " << traj.steps() << " steps to t=" << format_double(times.back()) << ", "
      << config.output_times.size() << " output time(s) in " << config.output_dir.string() << '\n';
  return kExitOk;
}

int cmd_make_target(const RunConfig& config, std::ostream& log) {
  if (config.target_source == TargetSource::Files) {
    throw ConfigError("make-target needs target.source = design or profile");
  }
  const ResolvedTargets r = resolve_targets(config);
  const Grid grid = config.grid();
  const std::string& h = config.hash;

  OutputSet out(config.output_dir);
  Matrix sig(r.targets.sigmas.size(), 2);
  for (std::size_t i = 0; i < r.targets.modes.size(); ++i) {
    write_state_fields(out.add("target_mode_" + std::to_string(i + 1) + ".csv"), grid, {"phi"},
                       {r.targets.modes[i]}, h, "mode=" + std::to_string(i + 1));
    sig.row(i) << static_cast<double>(i + 1), r.targets.sigmas[i];
  }
  write_csv(out.add("target_sigma.csv"), {"mode", "sigma"}, sig, h);
  write_state_fields(out.add("target_mean.csv"), grid, {"mean"}, {r.targets.mean}, h);
  write_design(out.add("alpha_target.csv"), config, *r.design, h);
  const NodalField alpha = alpha_field_from_design(config.design(), *r.design, grid);
  Matrix a(grid.node_count(), grid.dimension() + 1);
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const int k = grid.node(i, j);
      a(k, 0) = grid.x(i);
      if (grid.dimension() == 2) a(k, 1) = grid.y(j);
      a(k, grid.dimension()) = alpha[k];
    }
  }
  write_csv(out.add("alpha_nodal_target.csv"),
            grid.dimension() == 2 ? std::vector<std::string>{"x", "y", "alpha"} : std::vector<std::string>{"x", "alpha"},
            a, h);
  out.commit();
  log << "make-target: " << r.targets.modes.size() << " mode(s), sigma_1=" << format_double(r.targets.sigmas.front())
      << " in " << config.output_dir.string() << '\n';
  return kExitOk;
}

int cmd_grad_check(const RunConfig& config, std::ostream& log) {
  const InversionProblem problem = make_problem(config, resolve_targets(config).targets);
  const auto comps = grad_check_components(config);
  const GradCheckReport report = grad_check(problem, config.initial_design, config.fd_step, comps);

  OutputSet out(config.output_dir);
  {
    std::ofstream f(out.add("report.csv"));
    if (!f) throw ConfigError("cannot write report.csv in '" + config.output_dir.string() + "'");
    write_report_csv(f, report, config.hash);
  }
  out.commit();

  log << "grad-check: " << report.objective << " on " << report.design << ", f=" << format_double(report.objective_value)
      << ", h=" << format_double(report.h_fd) << '\n';
  for (const auto& r : report.rows) {
    log << "  " << r.label << "  adjoint=" << format_double(r.adjoint) << "  fd=" << format_double(r.fd)
        << "  rel_err=" << (r.valid ? format_double(r.rel_err) : "invalid: " + r.error) << '\n';
  }
  log << "  max rel_err=" << format_double(report.max_rel_err()) << "  forward " << report.forward_seconds
      << " s, adjoint " << report.adjoint_seconds << " s, fd " << report.fd_seconds << " s\n";
  if (!report.passes(config.threshold)) {
    log << "grad-check: threshold " << format_double(config.threshold) << " exceeded\n";
    return kExitThreshold;
  }
  return kExitOk;
}

int cmd_invert(const RunConfig& config, std::ostream& log) {
  const ResolvedTargets targets = resolve_targets(config);
  const InversionProblem problem = make_problem(config, targets.targets);
  const OptimizeResult res = minimize(problem, config.initial_design, config.optimize, [&](const IterationRecord& r) {
    log << "  iter " << r.iteration << "  f=" << format_double(r.f) << "  |pg|=" << format_double(r.grad_inf_norm)
        << std::endl;
  });
  for (const auto& w : res.history.warnings) log << "warning: " << w << '\n';

  const ForwardSolution initial = problem.solve(config.initial_design);
  const ForwardSolution optimized = problem.solve(res.x);
  const Grid grid = config.grid();
  const std::string& h = config.hash;

  OutputSet out(config.output_dir);
  {
    std::ofstream f(out.add("history.csv"));
    if (!f) throw ConfigError("cannot write history.csv in '" + config.output_dir.string() + "'");
    write_history_csv(f, res.history, h);
  }
  write_design(out.add("alpha_initial.csv"), config, config.initial_design, h);
  write_design(out.add("alpha_optimized.csv"), config, res.x, h);
  if (targets.design) write_design(out.add("alpha_target.csv"), config, *targets.design, h);
  if (!targets.targets.modes.empty()) {
    const std::size_t m = std::min(targets.targets.modes.size(), std::max<std::size_t>(1, optimized.modes.size()));
    std::vector<StateVector> target_modes(targets.targets.modes.begin(), targets.targets.modes.begin() + m);
    auto first = [&](const std::vector<SingularTriplet>& v) {
      auto phis = leading_phis(v);
      phis.resize(std::min(phis.size(), m));
      return phis;
    };
    write_state_fields(out.add("mode_initial.csv"), grid, mode_names(std::min(m, initial.modes.size())),
                       first(initial.modes), h);
    write_state_fields(out.add("mode_optimized.csv"), grid, mode_names(std::min(m, optimized.modes.size())),
                       first(optimized.modes), h);
    write_state_fields(out.add("mode_target.csv"), grid, mode_names(m), target_modes, h);
  }
  out.commit();

  log << "invert: " << to_string(res.history.reason) << " after " << res.history.records.back().iteration
      << " iteration(s), f=" << format_double(res.f);
  if (!res.history.message.empty()) log << " (" << res.history.message << ")";
  log << '\n';
  return res.history.converged() ? kExitOk : kExitThreshold;
}

int run_command(const std::string& command, const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    if (command == "forward") return cmd_forward(config, log);
    if (command == "make-target") return cmd_make_target(config, log);
    if (command == "grad-check") return cmd_grad_check(config, log);
    if (command == "invert") return cmd_invert(config, log);
    err << "error: unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << " (step " << e.step() << ")\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace mcfi
