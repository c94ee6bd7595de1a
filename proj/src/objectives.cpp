#include "mcfi/objectives.hpp"

#include <cmath>

#include "mcfi/pod.hpp"

namespace mcfi {

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::QuadraticMode: return "quadratic_mode";
    case ObjectiveKind::ModeNorm: return "mode_norm";
    case ObjectiveKind::ModeNormPlusEnergy: return "mode_norm_energy";
    case ObjectiveKind::MultiMode: return "multi_mode";
    case ObjectiveKind::MeanFlow: return "mean_flow";
    case ObjectiveKind::MeanFlowPlusModes: return "mean_flow_modes";
    case ObjectiveKind::SpectralGap: return "spectral_gap";
  }
  return "unknown";
}

ObjectiveKind objective_kind_from_string(const std::string& name) {
  for (auto k : {ObjectiveKind::QuadraticMode, ObjectiveKind::ModeNorm,
                 ObjectiveKind::ModeNormPlusEnergy, ObjectiveKind::MultiMode,
                 ObjectiveKind::MeanFlow, ObjectiveKind::MeanFlowPlusModes,
                 ObjectiveKind::SpectralGap}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown objective kind '" + name + "'");
}

int ObjectiveSpec::modes_required() const {
  switch (kind) {
    case ObjectiveKind::QuadraticMode:
    case ObjectiveKind::ModeNorm:
    case ObjectiveKind::ModeNormPlusEnergy: return 1;
    case ObjectiveKind::MultiMode:
    case ObjectiveKind::MeanFlowPlusModes: return mode_count;
    case ObjectiveKind::MeanFlow: return 0;
    case ObjectiveKind::SpectralGap: return 2;
  }
  return 0;
}

bool ObjectiveSpec::uses_mode_targets() const {
  return kind != ObjectiveKind::MeanFlow && kind != ObjectiveKind::SpectralGap;
}

bool ObjectiveSpec::uses_sigma_targets() const {
  return kind == ObjectiveKind::ModeNormPlusEnergy || kind == ObjectiveKind::MultiMode;
}

bool ObjectiveSpec::uses_mean() const {
  return kind == ObjectiveKind::MeanFlow || kind == ObjectiveKind::MeanFlowPlusModes;
}

void ObjectiveSpec::validate() const {
  const int m = modes_required();
  if ((kind == ObjectiveKind::MultiMode || kind == ObjectiveKind::MeanFlowPlusModes) && mode_count < 1) {
    throw ConfigError("objective mode count must be at least 1");
  }
  if (uses_mode_targets()) {
    if (static_cast<int>(targets.modes.size()) < m) {
      throw ConfigError(to_string(kind) + " needs " + std::to_string(m) + " target mode(s)");
    }
    for (int i = 0; i < m; ++i) {
      if (std::abs(targets.modes[i].norm() - 1.0) > 1e-10) {
        throw ConfigError("target mode " + std::to_string(i + 1) + " is not unit length");
      }
    }
  }
  if (uses_sigma_targets() && static_cast<int>(targets.sigmas.size()) < m) {
    throw ConfigError(to_string(kind) + " needs " + std::to_string(m) + " target singular value(s)");
  }
  if (uses_mean() && targets.mean.size() == 0) {
    throw ConfigError(to_string(kind) + " needs a target mean field");
  }
  if (!(lambda >= 0.0)) throw ConfigError("objective weight lambda must be non-negative");
}

namespace {

void check_inputs(const ObjectiveSpec& spec, std::span<const SingularTriplet> triplets) {
  spec.validate();
  if (static_cast<int>(triplets.size()) < spec.modes_required()) {
    throw DimensionError("objective needs " + std::to_string(spec.modes_required()) + " triplets, got " +
                         std::to_string(triplets.size()));
  }
}

// +1 or -1: the sign that puts triplet i on its target's side.
double alignment_sign(const ObjectiveSpec& spec, const SingularTriplet& t, int i) {
  if (!spec.uses_mode_targets()) return 1.0;
  const double dot = t.phi.dot(spec.targets.modes[i]);
  if (dot == 0.0) throw AmbiguousAlignmentError("mode " + std::to_string(i + 1) + " is orthogonal to its target");
  return dot > 0.0 ? 1.0 : -1.0;
}

}  // namespace

std::vector<SingularTriplet> align_to_targets(const ObjectiveSpec& spec,
                                              std::span<const SingularTriplet> triplets) {
  std::vector<SingularTriplet> out(triplets.begin(), triplets.end());
  if (!spec.uses_mode_targets()) return out;
  const int m = std::min<int>(spec.modes_required(), static_cast<int>(out.size()));
  for (int i = 0; i < m; ++i) out[i] = align_sign(out[i], spec.targets.modes[i]);
  return out;
}

double evaluate(const ObjectiveSpec& spec, const Vector& temporal_mean,
                std::span<const SingularTriplet> triplets) {
  check_inputs(spec, triplets);
  const int m = spec.modes_required();
  auto mode_gap = [&](int i) {
    return (alignment_sign(spec, triplets[i], i) * triplets[i].phi - spec.targets.modes[i]).norm();
  };
  auto mean_gap2 = [&] {
    if (temporal_mean.size() != spec.targets.mean.size()) {
      throw DimensionError("temporal mean length does not match the target mean");
    }
    return (temporal_mean - spec.targets.mean).squaredNorm();
  };

  switch (spec.kind) {
    case ObjectiveKind::QuadraticMode: {
      const double d = mode_gap(0);
      return 0.5 * d * d;
    }
    case ObjectiveKind::ModeNorm: return mode_gap(0);
    case ObjectiveKind::ModeNormPlusEnergy: {
      const double ds = triplets[0].sigma - spec.targets.sigmas[0];
      return mode_gap(0) + ds * ds;
    }
    case ObjectiveKind::MultiMode: {
      double f = 0.0;
      for (int i = 0; i < m; ++i) {
        const double ds = triplets[i].sigma - spec.targets.sigmas[i];
        f += mode_gap(i) + ds * ds;
      }
      return f;
    }
    case ObjectiveKind::MeanFlow: return mean_gap2();
    case ObjectiveKind::MeanFlowPlusModes: {
      double f = mean_gap2();
      for (int i = 0; i < m; ++i) {
        const double d = mode_gap(i);
        f += spec.lambda * d * d;
      }
      return f;
    }
    case ObjectiveKind::SpectralGap: return -triplets[0].sigma / triplets[1].sigma;
  }
  return 0.0;
}

ObjectivePartials partials(const ObjectiveSpec& spec, const Vector& temporal_mean, int steps,
                           std::span<const SingularTriplet> triplets) {
  check_inputs(spec, triplets);
  const int m = spec.modes_required();
  ObjectivePartials out;
  out.modes.resize(m);
  for (int i = 0; i < m; ++i) {
    out.modes[i].phi = Vector::Zero(triplets[i].phi.size());
    out.modes[i].v = Vector::Zero(triplets[i].v.size());
  }

  // d/dphi of the aligned distance, chained through phi_aligned = s * phi.
  auto quadratic = [&](int i, double weight) {
    const double s = alignment_sign(spec, triplets[i], i);
    out.modes[i].phi += weight * s * (s * triplets[i].phi - spec.targets.modes[i]);
  };
  auto norm = [&](int i) {
    const double s = alignment_sign(spec, triplets[i], i);
    const Vector diff = s * triplets[i].phi - spec.targets.modes[i];
    const double d = diff.norm();
    if (d <= kKinkTolerance) {
      throw NonDifferentiableError("mode " + std::to_string(i + 1) +
                                   " coincides with its target; the norm objective has no gradient there");
    }
    out.modes[i].phi += s * diff / d;
  };
  auto energy = [&](int i) {
    out.modes[i].sigma += 2.0 * (triplets[i].sigma - spec.targets.sigmas[i]);
  };
  auto mean = [&](double weight) {
    if (temporal_mean.size() != spec.targets.mean.size()) {
      throw DimensionError("temporal mean length does not match the target mean");
    }
    if (steps < 1) throw DimensionError("mean-flow partials need the snapshot count");
    const Vector col = weight * (2.0 / steps) * (temporal_mean - spec.targets.mean);
    out.state = col.replicate(1, steps);
  };

  switch (spec.kind) {
    case ObjectiveKind::QuadraticMode: quadratic(0, 1.0); break;
    case ObjectiveKind::ModeNorm: norm(0); break;
    case ObjectiveKind::ModeNormPlusEnergy:
      norm(0);
      energy(0);
      break;
    case ObjectiveKind::MultiMode:
      for (int i = 0; i < m; ++i) {
        norm(i);
        energy(i);
      }
      break;
    case ObjectiveKind::MeanFlow: mean(1.0); break;
    case ObjectiveKind::MeanFlowPlusModes:
      mean(1.0);
      for (int i = 0; i < m; ++i) quadratic(i, 2.0 * spec.lambda);
      break;
    case ObjectiveKind::SpectralGap: {
      const double s1 = triplets[0].sigma;
      const double s2 = triplets[1].sigma;
      out.modes[0].sigma = -1.0 / s2;
      out.modes[1].sigma = s1 / (s2 * s2);
      break;
    }
  }
  return out;
}

}  // namespace mcfi
