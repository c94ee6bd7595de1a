#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace mcfi;

namespace {

struct Fixture {
  std::vector<SingularTriplet> triplets;
  Vector mean;
  int steps = 6;
  ObjectiveTargets targets;
};

Fixture make_fixture(std::mt19937_64& rng, int ns = 10) {
  Fixture f;
  for (int i = 0; i < 2; ++i) {
    SingularTriplet t;
    t.phi = test::random_vector(rng, ns).normalized();
    t.v = test::random_vector(rng, f.steps).normalized();
    t.sigma = 3.0 - i;
    t.index = i;
    f.triplets.push_back(t);
    Vector target = (t.phi + 0.3 * test::random_vector(rng, ns)).normalized();
    f.targets.modes.push_back(target);
    f.targets.sigmas.push_back(2.5 - 0.7 * i);
  }
  f.mean = test::random_vector(rng, ns);
  f.targets.mean = test::random_vector(rng, ns);
  return f;
}

ObjectiveSpec spec_for(ObjectiveKind kind, const Fixture& f) {
  ObjectiveSpec s;
  s.kind = kind;
  s.mode_count = 2;
  s.lambda = 0.6;
  s.targets = f.targets;
  return s;
}

const ObjectiveKind kAll[] = {ObjectiveKind::QuadraticMode, ObjectiveKind::ModeNorm,
                              ObjectiveKind::ModeNormPlusEnergy, ObjectiveKind::MultiMode,
                              ObjectiveKind::MeanFlow, ObjectiveKind::MeanFlowPlusModes,
                              ObjectiveKind::SpectralGap};

}  // namespace

TEST_CASE("kind names round-trip") {
  for (auto k : kAll) CHECK(objective_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(objective_kind_from_string("bogus"), ConfigError);
}

TEST_CASE("values at the target") {
  std::mt19937_64 rng(1);
  Fixture f = make_fixture(rng);
  for (int i = 0; i < 2; ++i) f.triplets[i].phi = f.targets.modes[i];
  CHECK(evaluate(spec_for(ObjectiveKind::QuadraticMode, f), f.mean, f.triplets) == 0.0);
  CHECK(evaluate(spec_for(ObjectiveKind::ModeNorm, f), f.mean, f.triplets) == 0.0);
  const auto p = partials(spec_for(ObjectiveKind::QuadraticMode, f), f.mean, f.steps, f.triplets);
  CHECK(p.modes[0].phi.isZero(0.0));
  CHECK_THROWS_AS(partials(spec_for(ObjectiveKind::ModeNorm, f), f.mean, f.steps, f.triplets),
                  NonDifferentiableError);
  CHECK_THROWS_AS(partials(spec_for(ObjectiveKind::MultiMode, f), f.mean, f.steps, f.triplets),
                  NonDifferentiableError);
}

TEST_CASE("spectral gap") {
  std::mt19937_64 rng(2);
  Fixture f = make_fixture(rng);
  f.triplets[0].sigma = 3.0;
  f.triplets[1].sigma = 2.0;
  const ObjectiveSpec s = spec_for(ObjectiveKind::SpectralGap, f);
  CHECK(evaluate(s, f.mean, f.triplets) == doctest::Approx(-1.5));
  const auto p = partials(s, f.mean, f.steps, f.triplets);
  CHECK(p.modes[0].sigma == doctest::Approx(-0.5));
  CHECK(p.modes[1].sigma == doctest::Approx(0.75));
  f.triplets[0].sigma = 4.0;
  CHECK(evaluate(s, f.mean, f.triplets) == doctest::Approx(-2.0));
}

TEST_CASE("evaluation is invariant under joint sign flips") {
  std::mt19937_64 rng(3);
  const Fixture f = make_fixture(rng);
  for (auto k : kAll) {
    const ObjectiveSpec s = spec_for(k, f);
    auto flipped = f.triplets;
    for (auto& t : flipped) {
      t.phi = -t.phi;
      t.v = -t.v;
    }
    CHECK(evaluate(s, f.mean, flipped) == evaluate(s, f.mean, f.triplets));
  }
}

TEST_CASE("partials match central differences") {
  std::mt19937_64 rng(4);
  for (bool flip : {false, true}) {
    Fixture f = make_fixture(rng);
    if (flip) {
      f.triplets[0].phi = -f.triplets[0].phi;
      f.triplets[0].v = -f.triplets[0].v;
    }
    for (auto k : kAll) {
      CAPTURE(to_string(k));
      const ObjectiveSpec s = spec_for(k, f);
      const auto p = partials(s, f.mean, f.steps, f.triplets);
      const double h = 1e-6;

      // Random direction in (phi_i, v_i, sigma_i, mean).
      auto pert = f.triplets;
      std::vector<Vector> dphi, dv;
      std::vector<double> ds;
      for (auto& t : pert) {
        dphi.push_back(test::random_vector(rng, t.phi.size()));
        dv.push_back(test::random_vector(rng, t.v.size()));
        ds.push_back(test::random_vector(rng, 1)[0]);
      }
      const Vector dmean = test::random_vector(rng, f.mean.size());
      auto shifted = [&](double e) {
        auto t = f.triplets;
        for (std::size_t i = 0; i < t.size(); ++i) {
          t[i].phi += e * dphi[i];
          t[i].v += e * dv[i];
          t[i].sigma += e * ds[i];
        }
        return evaluate(s, f.mean + e * dmean, t);
      };
      const double fd = (shifted(h) - shifted(-h)) / (2 * h);

      double exact = 0.0;
      for (std::size_t i = 0; i < p.modes.size(); ++i) {
        exact += p.modes[i].phi.dot(dphi[i]) + p.modes[i].v.dot(dv[i]) + p.modes[i].sigma * ds[i];
      }
      // Shifting every snapshot by dmean shifts the mean by dmean.
      if (p.state.size()) exact += p.state.rowwise().sum().dot(dmean);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(std::abs(fd), 1e-3));
      for (const auto& m : p.modes) CHECK(m.v.isZero(0.0));
      CHECK(p.design.size() == 0);
    }
  }
}

TEST_CASE("quadratic objective is non-negative") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Fixture f = make_fixture(rng);
    CHECK(evaluate(spec_for(ObjectiveKind::QuadraticMode, f), f.mean, f.triplets) > 0.0);
  }
}

TEST_CASE("mean-flow partials are uniform in time") {
  std::mt19937_64 rng(6);
  const Fixture f = make_fixture(rng);
  const auto p = partials(spec_for(ObjectiveKind::MeanFlow, f), f.mean, f.steps, f.triplets);
  REQUIRE(p.state.cols() == f.steps);
  const Vector expect = (2.0 / f.steps) * (f.mean - f.targets.mean);
  for (int k = 0; k < f.steps; ++k) CHECK(test::rel_diff(p.state.col(k), expect) < 1e-15);
}

TEST_CASE("validation") {
  std::mt19937_64 rng(7);
  const Fixture f = make_fixture(rng);
  ObjectiveSpec s = spec_for(ObjectiveKind::QuadraticMode, f);
  s.targets.modes.clear();
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = spec_for(ObjectiveKind::ModeNorm, f);
  s.targets.modes[0] *= 1.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = spec_for(ObjectiveKind::MultiMode, f);
  s.targets.sigmas.resize(1);
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = spec_for(ObjectiveKind::MeanFlow, f);
  s.targets.mean.resize(0);
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = spec_for(ObjectiveKind::MeanFlowPlusModes, f);
  s.lambda = -1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = spec_for(ObjectiveKind::MultiMode, f);
  CHECK_THROWS_AS(evaluate(s, f.mean, std::span(f.triplets).first(1)), DimensionError);
}
