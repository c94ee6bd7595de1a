#pragma once

#include <span>
#include <string>
#include <vector>

#include "mcfi/model.hpp"

namespace mcfi {

enum class ObjectiveKind {
  QuadraticMode,       ///< 1/2 |phi_1 - phi_1*|^2
  ModeNorm,            ///< |phi_1 - phi_1*|
  ModeNormPlusEnergy,  ///< |phi_1 - phi_1*| + (sigma_1 - sigma_1*)^2
  MultiMode,           ///< sum_i |phi_i - phi_i*| + (sigma_i - sigma_i*)^2
  MeanFlow,            ///< |mean - mean*|^2
  MeanFlowPlusModes,   ///< |mean - mean*|^2 + lambda sum_i |phi_i - phi_i*|^2
  SpectralGap,         ///< -sigma_1 / sigma_2
};

std::string to_string(ObjectiveKind kind);
ObjectiveKind objective_kind_from_string(const std::string& name);

struct ObjectiveTargets {
  std::vector<Vector> modes;
  std::vector<double> sigmas;
  Vector mean;
};

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::QuadraticMode;
  /// Mode count for MultiMode / MeanFlowPlusModes; the other kinds fix it.
  int mode_count = 1;
  double lambda = 1.0;
  ObjectiveTargets targets;

  /// Number of POD modes the objective reads.
  int modes_required() const;
  bool uses_mode_targets() const;
  bool uses_sigma_targets() const;
  bool uses_mean() const;
  void validate() const;
};

/// Flips every triplet with a mode target onto the target's side.
std::vector<SingularTriplet> align_to_targets(const ObjectiveSpec& spec,
                                              std::span<const SingularTriplet> triplets);

/// Objective value. Alignment to the mode targets is applied first, so the
/// result does not depend on the sign convention of the input triplets.
double evaluate(const ObjectiveSpec& spec, const Vector& temporal_mean,
                std::span<const SingularTriplet> triplets);

/// dF/d(phi_i, v_i, sigma_i) for one mode.
struct ModalPartials {
  Vector phi;
  Vector v;
  double sigma = 0.0;
};

struct ObjectivePartials {
  /// dF/du^(k), one column per snapshot; empty when the objective has no
  /// direct state dependence.
  Matrix state;
  std::vector<ModalPartials> modes;
  /// Explicit design dependence; empty means zero.
  DesignVector design;
};

/// Exact partials with respect to the triplets as passed in (the internal
/// sign alignment is chained back to the caller's sign).
ObjectivePartials partials(const ObjectiveSpec& spec, const Vector& temporal_mean, int steps,
                           std::span<const SingularTriplet> triplets);

/// Distance below which the norm-type objectives are not differentiable.
inline constexpr double kKinkTolerance = 1e-12;

}  // namespace mcfi
