#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"

using namespace mcfi;

namespace {

StateVector random_state(std::mt19937_64& rng, const Grid& g) {
  return test::random_vector(rng, g.state_size(), 0.5);
}

NodalField random_alpha(std::mt19937_64& rng, const Grid& g) {
  std::uniform_real_distribution<double> d(0.2, 2.0);
  NodalField a(g.node_count());
  for (auto& v : a) v = d(rng);
  return a;
}

// Dense second-difference operator with frozen boundary rows.
Matrix dense_laplacian_1d(const Grid& g, double nu) {
  const int n = g.nx();
  Matrix d = Matrix::Zero(n, n);
  const double c = nu / (g.dx() * g.dx());
  for (int i = 1; i < n - 1; ++i) {
    d(i, i - 1) = c;
    d(i, i) = -2 * c;
    d(i, i + 1) = c;
  }
  return d;
}

}  // namespace

TEST_CASE("smooth selector") {
  CHECK(smooth_selector(0.0, 20.0) == 0.5);
  CHECK(smooth_selector(0.05, 20.0) == doctest::Approx(0.8807970779778823).epsilon(1e-15));
  CHECK(smooth_selector(1e3, 20.0) == 1.0);
  CHECK(smooth_selector(-1e3, 20.0) == 0.0);
  for (double w : {0.001, 0.013, 0.2, 1.7}) {
    CHECK(smooth_selector(-w, 20.0) == doctest::Approx(1.0 - smooth_selector(w, 20.0)).epsilon(1e-15));
    const double h = 1e-6;
    const double fd = (smooth_selector(w + h, 20.0) - smooth_selector(w - h, 20.0)) / (2 * h);
    CHECK(smooth_selector_derivative(w, 20.0) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("solver config validation") {
  SolverConfig c = SolverConfig::burgers1d();
  CHECK_NOTHROW(c.validate());
  c.viscosity = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SolverConfig::burgers2d();
  c.cfl = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SolverConfig::burgers2d();
  c.t_end = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SolverConfig::burgers1d();
  c.beta = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("residual of constant and linear states") {
  const SolverConfig cfg = SolverConfig::burgers1d();
  const Grid g = Grid::line(5);
  const NodalField ones = NodalField::Ones(5);
  CHECK(spatial_residual(StateVector::Constant(5, 0.7), ones, g, cfg).isZero(0.0));

  const Grid g2 = Grid::square(6, 5);
  CHECK(spatial_residual(StateVector::Constant(60, -0.3), NodalField::Ones(30), g2, SolverConfig::burgers2d())
            .isZero(0.0));

  // u = x with nu = 0: both one-sided differences equal 1, so r = -x.
  SolverConfig inviscid = cfg;
  inviscid.viscosity = 1e-300;
  StateVector u(5);
  for (int i = 0; i < 5; ++i) u[i] = g.x(i);
  const StateVector r = spatial_residual(u, ones, g, inviscid);
  CHECK(r[0] == 0.0);
  CHECK(r[4] == 0.0);
  for (int i = 1; i < 4; ++i) CHECK(r[i] == doctest::Approx(-g.x(i)).epsilon(1e-14));
}

TEST_CASE("pure diffusion matches dense operator") {
  std::mt19937_64 rng(3);
  const Grid g = Grid::line(17);
  const SolverConfig cfg = SolverConfig::burgers1d();
  const StateVector u = random_state(rng, g);
  const StateVector r = spatial_residual(u, NodalField::Zero(17), g, cfg);
  CHECK(test::rel_diff(r, dense_laplacian_1d(g, cfg.viscosity) * u) < 1e-14);

  // Symmetric operator: J^T y = J y.
  const StateVector y = random_state(rng, g);
  StateVector yi = y;
  yi[0] = yi[16] = 0.0;
  const StateVector jt = jacobian_transpose_product(u, NodalField::Zero(17), g, cfg, yi);
  CHECK(test::rel_diff(jt, dense_laplacian_1d(g, cfg.viscosity).transpose() * yi) < 1e-14);
}

TEST_CASE("non-finite state is rejected") {
  const Grid g = Grid::line(5);
  StateVector u = StateVector::Zero(5);
  u[2] = NAN;
  CHECK_THROWS_AS(spatial_residual(u, NodalField::Ones(5), g, SolverConfig::burgers1d()), NumericError);
  CHECK_THROWS_AS(spatial_residual(StateVector::Zero(4), NodalField::Ones(5), g, SolverConfig::burgers1d()),
                  DimensionError);
}

TEST_CASE("initial conditions") {
  const Grid g = Grid::line(161);
  const StateVector u = initial_condition(g);
  CHECK(u[80] == doctest::Approx(0.2 * std::exp(-9.8)).epsilon(1e-9));
  const double tail = std::exp(-0.09 / 0.05) - 0.8 * std::exp(-2.89 / 0.05);
  CHECK(u[0] == doctest::Approx(tail).epsilon(1e-12));

  const Grid s = Grid::square(51, 51);
  const StateVector w = initial_condition(s);
  CHECK(w.head(s.node_count()).cwiseAbs().maxCoeff() == 1.0);
  CHECK(w.tail(s.node_count()).isZero(0.0));
}

TEST_CASE("transpose products pass dot-product tests") {
  std::mt19937_64 rng(11);
  const double eps = 1e-6;
  for (const Grid& g : {Grid::line(23), Grid::square(9, 8)}) {
    const SolverConfig cfg = g.dimension() == 1 ? SolverConfig::burgers1d() : SolverConfig::burgers2d();
    for (int trial = 0; trial < 10; ++trial) {
      const StateVector u = random_state(rng, g);
      const NodalField a = random_alpha(rng, g);
      const StateVector d = random_state(rng, g);
      const StateVector y = random_state(rng, g);
      const StateVector jd =
          (spatial_residual(u + eps * d, a, g, cfg) - spatial_residual(u - eps * d, a, g, cfg)) / (2 * eps);
      const double lhs = jd.dot(y);
      const double rhs = d.dot(jacobian_transpose_product(u, a, g, cfg, y));
      CHECK(std::abs(lhs - rhs) <= 1e-6 * std::abs(lhs));

      const NodalField da = test::random_vector(rng, g.node_count());
      const StateVector ja =
          (spatial_residual(u, a + eps * da, g, cfg) - spatial_residual(u, a - eps * da, g, cfg)) / (2 * eps);
      const double lhs_a = ja.dot(y);
      const double rhs_a = da.dot(design_jacobian_transpose_product(u, g, cfg, y));
      CHECK(std::abs(lhs_a - rhs_a) <= 1e-6 * std::abs(lhs_a));
    }
  }
}

TEST_CASE("transpose products vanish for zero input") {
  std::mt19937_64 rng(5);
  const Grid g = Grid::square(7, 7);
  const SolverConfig cfg = SolverConfig::burgers2d();
  const StateVector u = random_state(rng, g);
  const StateVector z = StateVector::Zero(g.state_size());
  CHECK(jacobian_transpose_product(u, random_alpha(rng, g), g, cfg, z).isZero(0.0));
  CHECK(design_jacobian_transpose_product(u, g, cfg, z).isZero(0.0));
  CHECK(design_jacobian_transpose_product(StateVector::Constant(g.state_size(), 0.4), g, cfg,
                                          random_state(rng, g))
            .isZero(0.0));
}

TEST_CASE("1D baseline march") {
  const Grid g = Grid::line(161);
  const SolverConfig cfg = SolverConfig::burgers1d();
  const StateVector ic = initial_condition(g);
  const Trajectory t = simulate(NodalField::Constant(161, 0.1), g, cfg, ic);
  CHECK(t.steps() == 496);
  CHECK(t.dt[0] == doctest::Approx(5.0e-3).epsilon(0.02));
  for (int k = 0; k + 1 < t.steps(); ++k) CHECK(t.dt[k] == t.dt[0]);
  CHECK(t.dt.back() <= t.dt[0]);
  CHECK(t.time(t.steps()) == doctest::Approx(2.5).epsilon(1e-14));

  // Rebuilding the forward-Euler residual from the stored trajectory.
  double worst = 0.0;
  for (int k = 0; k < t.steps(); ++k) {
    const StateVector prev = t.state(k);
    const StateVector r = t.state(k + 1) - prev - t.dt[k] * spatial_residual(prev, NodalField::Constant(161, 0.1), g, cfg);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-13 * ic.cwiseAbs().maxCoeff());
}

TEST_CASE("2D initial step") {
  const Grid g = Grid::square(201, 201);
  const SolverConfig cfg = SolverConfig::burgers2d();
  const StateVector ic = initial_condition(g);
  CHECK(stable_time_step(ic, g, cfg) == doctest::Approx(4.0e-3).epsilon(1e-6));
}

TEST_CASE("zero initial condition stays zero") {
  const Grid g = Grid::square(9, 9);
  SolverConfig cfg = SolverConfig::burgers2d();
  cfg.t_end = 0.1;
  const Trajectory t = simulate(NodalField::Ones(81), g, cfg, StateVector::Zero(162));
  CHECK(t.snapshots.isZero(0.0));
  CHECK(t.time(t.steps()) == doctest::Approx(0.1));
}

TEST_CASE("frozen dt sequence is reused exactly") {
  const Grid g = Grid::square(11, 11);
  SolverConfig cfg = SolverConfig::burgers2d();
  cfg.t_end = 0.2;
  const StateVector ic = initial_condition(g);
  const Trajectory a = simulate(NodalField::Ones(121), g, cfg, ic);
  const Trajectory b = simulate(NodalField::Constant(121, 1.3), g, cfg, ic, a.dt);
  CHECK(b.dt == a.dt);
  CHECK(b.steps() == a.steps());
  const Trajectory c = simulate(NodalField::Ones(121), g, cfg, ic, a.dt);
  CHECK(c.snapshots == a.snapshots);
}

TEST_CASE("pure diffusion decays energy") {
  const Grid g = Grid::line(41);
  SolverConfig cfg = SolverConfig::burgers1d();
  cfg.viscosity = 1e-2;
  cfg.t_end = 0.5;
  const Trajectory t = simulate(NodalField::Zero(41), g, cfg, initial_condition(g));
  REQUIRE(t.dt[0] < 0.5 * g.dx() * g.dx() / cfg.viscosity);
  for (int k = 0; k < t.steps(); ++k) CHECK(t.state(k + 1).norm() <= t.state(k).norm());
}

TEST_CASE("divergence reports the step") {
  const Grid g = Grid::line(21);
  SolverConfig cfg = SolverConfig::burgers1d();
  cfg.viscosity = 1e4;  // far past the diffusion limit
  try {
    simulate(NodalField::Zero(21), g, cfg, initial_condition(g));
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() > 0);
  }
}
