#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "mcfi/optimize.hpp"

using namespace mcfi;

namespace {

// f = 1/2 (x - c)^T H (x - c) with diagonal H.
struct Bowl {
  Vector c, h;
  DesignVector last;

  Objective objective() {
    Objective o;
    o.value = [this](const DesignVector& x) {
      last = x;
      return 0.5 * (x - c).cwiseProduct(h).dot(x - c);
    };
    o.gradient = [this]() -> DesignVector { return h.cwiseProduct(last - c); };
    return o;
  }
};

void check_history(const OptimizeHistory& hist, const Vector& lo, const Vector& hi) {
  REQUIRE_FALSE(hist.records.empty());
  for (std::size_t k = 0; k < hist.records.size(); ++k) {
    const auto& r = hist.records[k];
    CHECK(std::isfinite(r.f));
    CHECK((r.x.array() >= lo.array()).all());
    CHECK((r.x.array() <= hi.array()).all());
    if (k > 0) CHECK(r.f <= hist.records[k - 1].f);
  }
}

}  // namespace

TEST_CASE("options validation") {
  OptimizeOptions o;
  CHECK_NOTHROW(o.validate());
  o.backtrack = 1.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = {};
  o.gradient_tolerance = 0.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = {};
  o.armijo = 0.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = {};
  o.max_backtracks = 0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
}

TEST_CASE("bowl with one active bound converges to the projected minimizer") {
  Bowl b;
  b.c = Vector(3);
  b.c << 0.5, -2.0, 0.2;
  b.h = Vector(3);
  b.h << 1.0, 4.0, 0.5;
  const Vector lo = Vector::Constant(3, -1.0), hi = Vector::Constant(3, 1.0);
  const OptimizeResult r = minimize(b.objective(), Vector::Zero(3), lo, hi);
  CHECK(r.history.converged());
  CHECK(r.x[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(r.x[1] == -1.0);
  CHECK(r.x[2] == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(r.f == doctest::Approx(0.5 * 4.0 * 1.0).epsilon(1e-12));
  check_history(r.history, lo, hi);
}

TEST_CASE("ill-conditioned bowl without active bounds") {
  Bowl b;
  b.c = Vector::LinSpaced(6, -0.5, 0.5);
  b.h = Vector::LinSpaced(6, 1.0, 1000.0);
  const Vector lo = Vector::Constant(6, -2.0), hi = Vector::Constant(6, 2.0);
  const OptimizeResult r = minimize(b.objective(), Vector::Constant(6, 1.5), lo, hi);
  CHECK(r.history.converged());
  CHECK((r.x - b.c).cwiseAbs().maxCoeff() < 1e-7);
  check_history(r.history, lo, hi);
}

TEST_CASE("starting at the minimizer stops immediately") {
  Bowl b;
  b.c = Vector::Constant(2, 0.1);
  b.h = Vector::Ones(2);
  const OptimizeResult r = minimize(b.objective(), b.c, Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  CHECK(r.history.reason == Termination::GradientTolerance);
  CHECK(r.history.records.size() == 1);
}

TEST_CASE("starting point outside the bounds is projected with a warning") {
  Bowl b;
  b.c = Vector::Zero(2);
  b.h = Vector::Ones(2);
  const Vector lo = Vector::Constant(2, -1.0), hi = Vector::Constant(2, 1.0);
  const OptimizeResult r = minimize(b.objective(), Vector::Constant(2, 5.0), lo, hi);
  REQUIRE(r.history.warnings.size() == 1);
  CHECK(r.history.records.front().x == Vector::Constant(2, 1.0));
  check_history(r.history, lo, hi);
}

TEST_CASE("iteration cap is reported") {
  Bowl b;
  b.c = Vector::LinSpaced(4, -0.5, 0.5);
  b.h = Vector::LinSpaced(4, 1.0, 100.0);
  OptimizeOptions o;
  o.max_iterations = 2;
  const OptimizeResult r = minimize(b.objective(), Vector::Constant(4, 1.0), Vector::Constant(4, -2.0),
                                    Vector::Constant(4, 2.0), o);
  CHECK(r.history.reason == Termination::MaxIterations);
  CHECK(r.history.records.size() == 3);
  CHECK_FALSE(r.history.converged());
}

TEST_CASE("a failed evaluation inside the line search backtracks") {
  Bowl b;
  b.c = Vector::Constant(1, 0.9);
  b.h = Vector::Ones(1);
  Objective o = b.objective();
  auto inner = o.value;
  o.value = [&](const DesignVector& x) {
    if (x[0] > 0.95) throw NumericError("diverged");
    return inner(x);
  };
  OptimizeOptions opt;
  opt.initial_step_fraction = 1.0;
  const OptimizeResult r = minimize(o, Vector::Zero(1), Vector::Constant(1, -1.0), Vector::Constant(1, 1.0), opt);
  CHECK(r.history.converged());
  CHECK(r.x[0] == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("kink at the target counts as reached") {
  // f = |x - c| has no gradient at c.
  Vector c = Vector::Constant(1, 0.25);
  DesignVector last;
  Objective o;
  o.value = [&](const DesignVector& x) {
    last = x;
    return std::abs(x[0] - c[0]);
  };
  o.gradient = [&]() -> DesignVector {
    if (last[0] == c[0]) throw NonDifferentiableError("kink");
    return Vector::Constant(1, last[0] > c[0] ? 1.0 : -1.0);
  };
  const OptimizeResult r = minimize(o, c, Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
  CHECK(r.history.reason == Termination::ReachedTarget);
  CHECK(r.history.records.size() == 1);
}

TEST_CASE("small 1D inversion descends monotonically inside the bounds") {
  const InversionProblem p = test::small_problem_1d(ObjectiveKind::QuadraticMode);
  const OptimizeResult r = minimize(p, DesignVector::Zero(4));
  check_history(r.history, p.design().lower(), p.design().upper());
  CHECK(r.f < 1e-3 * r.history.records.front().f);

  DesignVector target(4);
  target << 0.25, -0.15, 0.05, 0.15;
  const OptimizeResult at = minimize(p, target);
  CHECK(at.history.records.size() <= 2);
  CHECK(at.history.converged());
}

TEST_CASE("history CSV layout") {
  OptimizeHistory h;
  h.reason = Termination::GradientTolerance;
  h.records.push_back({0, 1.0, 0.5, 0.0, Vector::Constant(2, 0.25)});
  h.records.push_back({1, 0.125, 1e-11, 1.0, Vector::Constant(2, -0.5)});
  std::ostringstream out;
  write_history_csv(out, h, "h1");
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.find("config_hash=h1") != std::string::npos);
  CHECK(line.find("termination=gradient_tolerance") != std::string::npos);
  std::getline(in, line);
  CHECK(line == "iter,f,grad_inf_norm,step,x_0,x_1");
  std::getline(in, line);
  CHECK(line == "0,1,0.5,0,0.25,0.25");
  std::getline(in, line);
  CHECK(line == "1,0.125,1e-11,1,-0.5,-0.5");
}

TEST_CASE("a stalled step is retried once before stopping on the objective tolerance") {
  Bowl b;
  b.c = Vector::Constant(2, 0.5);
  b.h = Vector::Ones(2);
  OptimizeOptions o;
  o.objective_tolerance = 10.0;
  const OptimizeResult r = minimize(b.objective(), Vector::Zero(2), Vector::Constant(2, -1.0),
                                    Vector::Constant(2, 1.0), o);
  CHECK(r.history.reason == Termination::ObjectiveTolerance);
  CHECK(r.history.records.size() == 3);
  CHECK(r.history.records[2].f < r.history.records[1].f);
}
