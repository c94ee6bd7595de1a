#include "mcfi/optimize.hpp"

#include <cmath>
#include <deque>
#include <optional>
#include <ostream>

#include "mcfi/csv.hpp"

namespace mcfi {

void OptimizeOptions::validate() const {
  if (max_iterations < 0) throw ConfigError("optimizer iteration cap must be non-negative");
  if (!(gradient_tolerance > 0.0) || !(objective_tolerance > 0.0)) {
    throw ConfigError("optimizer tolerances must be positive");
  }
  if (!(armijo > 0.0 && armijo < 1.0)) throw ConfigError("Armijo constant must lie in (0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("backtracking factor must lie in (0, 1)");
  if (max_backtracks < 1) throw ConfigError("at least one backtracking step is required");
  if (memory < 0) throw ConfigError("quasi-Newton memory must be non-negative");
  if (!(initial_step_fraction > 0.0)) throw ConfigError("initial step fraction must be positive");
}

std::string to_string(Termination reason) {
  switch (reason) {
    case Termination::GradientTolerance: return "gradient_tolerance";
    case Termination::ObjectiveTolerance: return "objective_tolerance";
    case Termination::ReachedTarget: return "reached_target";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::LineSearchFailure: return "line_search_failure";
    case Termination::EvaluationFailure: return "evaluation_failure";
  }
  return "unknown";
}

bool OptimizeHistory::converged() const {
  return reason == Termination::GradientTolerance || reason == Termination::ObjectiveTolerance ||
         reason == Termination::ReachedTarget;
}

namespace {

DesignVector clamp(const DesignVector& x, const Vector& lo, const Vector& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Bounds that hold x and push against the descent direction -g.
std::vector<bool> active_set(const DesignVector& x, const DesignVector& g, const Vector& lo, const Vector& hi) {
  std::vector<bool> a(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) a[i] = (x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0);
  return a;
}

struct Pair {
  Vector s, y;
  double rho;
};

// Two-loop recursion on the free components.
DesignVector lbfgs_direction(const DesignVector& g, const std::deque<Pair>& mem, const std::vector<bool>& active) {
  auto mask = [&](Vector v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (active[i]) v[i] = 0.0;
    return v;
  };
  Vector q = mask(g);
  std::vector<double> a(mem.size());
  for (std::size_t k = mem.size(); k-- > 0;) {
    a[k] = mem[k].rho * mem[k].s.dot(q);
    q -= a[k] * mem[k].y;
  }
  if (!mem.empty()) {
    const Pair& last = mem.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const double b = mem[k].rho * mem[k].y.dot(q);
    q += (a[k] - b) * mem[k].s;
  }
  return -mask(q);
}

}  // namespace

OptimizeResult minimize(const Objective& obj, const DesignVector& x0, const Vector& lower, const Vector& upper,
                        const OptimizeOptions& opt, const std::function<void(const IterationRecord&)>& on_iteration) {
  opt.validate();
  if (x0.size() != lower.size() || x0.size() != upper.size()) {
    throw DimensionError("starting point and bounds differ in length");
  }
  OptimizeResult res;
  OptimizeHistory& hist = res.history;

  DesignVector x = clamp(x0, lower, upper);
  if (x != x0) hist.warnings.push_back("starting point was outside the bounds and has been projected");
  double f = obj.value(x);
  if (!std::isfinite(f)) throw NumericError("objective is not finite at the starting point");

  auto record = [&](int it, const DesignVector& g, double step) {
    IterationRecord r;
    r.iteration = it;
    r.f = f;
    r.grad_inf_norm = (x - clamp(x - g, lower, upper)).cwiseAbs().maxCoeff();
    r.step = step;
    r.x = x;
    hist.records.push_back(r);
    if (on_iteration) on_iteration(r);
    return r.grad_inf_norm;
  };
  auto finish = [&](Termination why, std::string msg = {}) {
    hist.reason = why;
    hist.message = std::move(msg);
    res.x = x;
    res.f = f;
    return res;
  };

  DesignVector g;
  try {
    g = obj.gradient();
  } catch (const NonDifferentiableError& e) {
    IterationRecord r{0, f, 0.0, 0.0, x};
    hist.records.push_back(r);
    if (on_iteration) on_iteration(r);
    if (std::abs(f) <= opt.objective_tolerance) return finish(Termination::ReachedTarget, e.what());
    throw;
  }

  const double width = (upper - lower).maxCoeff();
  std::deque<Pair> memory;
  std::vector<bool> prev_active;
  bool stalled = false;

  double pg = record(0, g, 0.0);
  for (int it = 1;; ++it) {
    if (pg <= opt.gradient_tolerance) return finish(Termination::GradientTolerance);
    if (it > opt.max_iterations) return finish(Termination::MaxIterations);

    const auto active = active_set(x, g, lower, upper);
    if (active != prev_active) memory.clear();
    prev_active = active;

    DesignVector d = lbfgs_direction(g, memory, active);
    if (!(g.dot(d) < 0.0)) {
      memory.clear();
      d = lbfgs_direction(g, memory, active);
    }
    double alpha = 1.0;
    if (memory.empty()) {
      const double dmax = d.cwiseAbs().maxCoeff();
      if (std::isfinite(width) && dmax > 0.0) alpha = std::min(1.0, opt.initial_step_fraction * width / dmax);
    }

    // Armijo backtracking along the projected path.
    std::optional<double> f_new;
    DesignVector x_new;
    std::string last_error;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt, alpha *= opt.backtrack) {
      x_new = clamp(x + alpha * d, lower, upper);
      if (x_new == x) break;
      try {
        const double ft = obj.value(x_new);
        if (std::isfinite(ft) && ft <= f + opt.armijo * g.dot(x_new - x)) {
          f_new = ft;
          break;
        }
      } catch (const NumericError& e) {
        last_error = e.what();
      }
    }
    if (!f_new) {
      if (!memory.empty()) {
        // Retry once from steepest descent before giving up.
        memory.clear();
        prev_active.clear();
        --it;
        continue;
      }
      return finish(Termination::LineSearchFailure,
                    last_error.empty() ? "no step satisfied the sufficient-decrease condition" : last_error);
    }

    const double f_old = f;
    const DesignVector s = x_new - x;
    x = x_new;
    f = *f_new;
    DesignVector g_new;
    try {
      g_new = obj.gradient();
    } catch (const NonDifferentiableError& e) {
      record(it, g, alpha);
      hist.records.back().grad_inf_norm = 0.0;
      if (std::abs(f) <= opt.objective_tolerance) return finish(Termination::ReachedTarget, e.what());
      return finish(Termination::EvaluationFailure, e.what());
    } catch (const NumericError& e) {
      record(it, g, alpha);
      return finish(Termination::EvaluationFailure, e.what());
    }
    const Vector y = g_new - g;
    g = std::move(g_new);
    const double sy = s.dot(y);
    if (opt.memory > 0 && sy > 1e-12 * s.norm() * y.norm()) {
      memory.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(memory.size()) > opt.memory) memory.pop_front();
    }
    pg = record(it, g, alpha);
    if (f_old - f <= opt.objective_tolerance * std::max(1.0, std::abs(f))) {
      if (pg <= opt.gradient_tolerance) return finish(Termination::GradientTolerance);
      // A stalled quasi-Newton step gets one steepest-descent retry first.
      if (!stalled) {
        stalled = true;
        memory.clear();
        prev_active.clear();
        continue;
      }
      return finish(Termination::ObjectiveTolerance);
    }
    stalled = false;
  }
}

OptimizeResult minimize(const InversionProblem& problem, const DesignVector& x0, const OptimizeOptions& options,
                        const std::function<void(const IterationRecord&)>& on_iteration) {
  std::optional<ForwardSolution> last;
  Objective obj;
  obj.value = [&](const DesignVector& x) {
    last.reset();
    last = problem.solve(x);
    return last->objective;
  };
  obj.gradient = [&]() { return problem.gradient(*last); };
  return minimize(obj, x0, problem.design().lower(), problem.design().upper(), options, on_iteration);
}

void write_history_csv(std::ostream& out, const OptimizeHistory& h, const std::string& config_hash) {
  out << header_comment(config_hash, "termination=" + to_string(h.reason)) << '\n';
  out << "iter,f,grad_inf_norm,step";
  const Eigen::Index n = h.records.empty() ? 0 : h.records.front().x.size();
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << i;
  out << '\n';
  for (const auto& r : h.records) {
    out << r.iteration << ',' << format_double(r.f) << ',' << format_double(r.grad_inf_norm) << ','
        << format_double(r.step);
    for (Eigen::Index i = 0; i < r.x.size(); ++i) out << ',' << format_double(r.x[i]);
    out << '\n';
  }
}

}  // namespace mcfi
