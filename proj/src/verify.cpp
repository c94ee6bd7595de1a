#include "mcfi/verify.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <random>

#include "mcfi/adjoint.hpp"
#include "mcfi/csv.hpp"

namespace mcfi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<int> resolve_components(std::span<const int> components, int n) {
  std::vector<int> out;
  if (components.empty()) {
    for (int i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  for (int c : components) {
    if (c < 0 || c >= n) {
      throw DimensionError("component " + std::to_string(c + 1) + " is outside 1.." + std::to_string(n));
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

double GradCheckReport::max_rel_err() const {
  double worst = 0.0;
  for (const auto& r : rows) {
    if (r.valid && !std::isnan(r.rel_err)) worst = std::max(worst, r.rel_err);
  }
  return worst;
}

bool GradCheckReport::passes(double threshold) const {
  for (const auto& r : rows) {
    if (!r.valid) return false;
    const double err = std::isnan(r.rel_err) ? r.abs_diff : r.rel_err;
    if (!(err <= threshold)) return false;
  }
  return true;
}

std::string component_label(int component) { return "alpha_c_" + std::to_string(component + 1); }

std::string describe(const DesignSpec& spec) {
  return (spec.dimension() == 1 ? "gaussian_bumps(" : "strips(") + std::to_string(spec.size()) + ")";
}

DesignVector fd_gradient(const std::function<double(const DesignVector&)>& f, const DesignVector& x, double h,
                         std::span<const int> components) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  const double f0 = f(x);
  DesignVector g = DesignVector::Zero(x.size());
  for (int i : resolve_components(components, static_cast<int>(x.size()))) {
    DesignVector xp = x;
    xp[i] += h;
    g[i] = (f(xp) - f0) / h;
  }
  return g;
}

FdGradient fd_gradient(const InversionProblem& problem, const ForwardSolution& baseline, double h,
                       std::span<const int> components) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  const auto comps = resolve_components(components, static_cast<int>(baseline.x.size()));
  FdGradient out;
  out.values = DesignVector::Zero(baseline.x.size());
  for (int i : comps) {
    DesignVector xp = baseline.x;
    xp[i] += h;
    try {
      const double fp = problem.objective(xp, baseline.trajectory.dt);
      out.values[i] = (fp - baseline.objective) / h;
      out.errors.emplace_back();
    } catch (const NumericError& e) {
      out.values[i] = NAN;
      out.errors.emplace_back(e.what());
    }
  }
  return out;
}

GradCheckReport grad_check(const InversionProblem& problem, const DesignVector& x, double h,
                           std::span<const int> components) {
  GradCheckReport report;
  report.h_fd = h;
  report.objective = to_string(problem.objective_spec().kind);
  report.design = describe(problem.design());

  auto t0 = Clock::now();
  const ForwardSolution base = problem.solve(x);
  report.forward_seconds = seconds_since(t0);
  report.objective_value = base.objective;

  t0 = Clock::now();
  const DesignVector adj = problem.gradient(base);
  report.adjoint_seconds = seconds_since(t0);

  const auto comps = resolve_components(components, static_cast<int>(x.size()));
  t0 = Clock::now();
  const FdGradient fd = fd_gradient(problem, base, h, comps);
  report.fd_seconds = seconds_since(t0);

  for (std::size_t k = 0; k < comps.size(); ++k) {
    const int i = comps[k];
    GradCheckRow row;
    row.component = i;
    row.label = component_label(i);
    row.adjoint = adj[i];
    row.fd = fd.values[i];
    row.valid = fd.errors[k].empty();
    row.error = fd.errors[k];
    row.abs_diff = std::abs(row.adjoint - row.fd);
    row.rel_err = row.fd == 0.0 ? NAN : row.abs_diff / std::abs(row.fd);
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_report_csv(std::ostream& out, const GradCheckReport& report, const std::string& config_hash) {
  out << header_comment(config_hash, "h_fd=" + format_double(report.h_fd) + " objective=" + report.objective +
                                         " design=" + report.design)
      << '\n';
  out << "component,adjoint,fd,abs_diff,rel_err\n";
  for (const auto& r : report.rows) {
    out << r.label << ',' << format_double(r.adjoint) << ',' << format_double(r.fd) << ','
        << format_double(r.valid ? r.abs_diff : NAN) << ',' << format_double(r.valid ? r.rel_err : NAN) << '\n';
  }
}

namespace {

struct DotTest {
  double rel_err = 0.0;
  bool skipped = false;
};

DotTest compare(double lhs, double rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (scale == 0.0) return {0.0, false};
  return {std::abs(lhs - rhs) / scale, false};
}

// <(r(u + e d) - r(u - e d)) / 2e, y> against <d, J^T y>.
DotTest state_dot_test(const StateVector& u, const NodalField& a, const Grid& g, const SolverConfig& c,
                       const StateVector& d, const StateVector& y) {
  if (d.isZero(0.0) || y.isZero(0.0)) return {0.0, true};
  const double eps = 1e-6 * std::max(1.0, u.cwiseAbs().maxCoeff()) / d.cwiseAbs().maxCoeff();
  const StateVector jd = (spatial_residual(u + eps * d, a, g, c) - spatial_residual(u - eps * d, a, g, c)) / (2 * eps);
  return compare(jd.dot(y), d.dot(jacobian_transpose_product(u, a, g, c, y)));
}

DotTest design_dot_test(const StateVector& u, const NodalField& a, const Grid& g, const SolverConfig& c,
                        const NodalField& da, const StateVector& y) {
  if (da.isZero(0.0) || y.isZero(0.0)) return {0.0, true};
  const double eps = 1e-6 * std::max(1.0, a.cwiseAbs().maxCoeff()) / da.cwiseAbs().maxCoeff();
  const StateVector jd = (spatial_residual(u, a + eps * da, g, c) - spatial_residual(u, a - eps * da, g, c)) / (2 * eps);
  return compare(jd.dot(y), da.dot(design_jacobian_transpose_product(u, g, c, y)));
}

void record(LinearizationResult& r, const DotTest& t, double tol) {
  ++r.trials;
  if (t.skipped) {
    ++r.skipped;
    return;
  }
  r.worst_rel_err = std::max(r.worst_rel_err, t.rel_err);
  if (!(t.rel_err <= tol)) r.passed = false;
}

}  // namespace

LinearizationResult linearization_check(const StateVector& state, const NodalField& alpha, const Grid& grid,
                                        const SolverConfig& config, int trials, std::uint64_t seed,
                                        double tolerance) {
  if (trials < 1) throw ConfigError("linearization check needs at least one trial");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto draw = [&](Eigen::Index n) {
    Vector v(n);
    for (auto& e : v) e = nd(rng);
    return v;
  };
  LinearizationResult r;
  for (int t = 0; t < trials; ++t) {
    const StateVector d = draw(state.size());
    const StateVector y = draw(state.size());
    const NodalField da = draw(alpha.size());
    record(r, state_dot_test(state, alpha, grid, config, d, y), tolerance);
    record(r, design_dot_test(state, alpha, grid, config, da, y), tolerance);
  }
  return r;
}

LinearizationResult linearization_check(const StateVector& state, const NodalField& alpha, const Grid& grid,
                                        const SolverConfig& config,
                                        std::span<const std::pair<StateVector, StateVector>> pairs,
                                        double tolerance) {
  LinearizationResult r;
  for (const auto& [d, y] : pairs) record(r, state_dot_test(state, alpha, grid, config, d, y), tolerance);
  return r;
}

}  // namespace mcfi
