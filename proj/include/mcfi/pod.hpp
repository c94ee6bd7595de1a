#pragma once

#include <string>
#include <vector>

#include "mcfi/model.hpp"

namespace mcfi {

/// Zero-mean snapshot matrix U~ = U P, P = I - (1/n_t) 1 1^T.
struct CenteredSnapshots {
  Matrix centered;
  Vector mean;

  int steps() const { return static_cast<int>(centered.cols()); }
  int state_size() const { return static_cast<int>(centered.rows()); }
};

/// Centers u^(1)..u^(n_t); the initial state is not part of the ensemble.
CenteredSnapshots center(const Trajectory& trajectory);
CenteredSnapshots center(const Matrix& snapshots);

/// Full thin spectrum of U~: every singular value (r = min(n_s, n_t)) and
/// its right singular vector. The modal adjoint uses it to diagonalize
/// U~^T U~ without refactorizing.
struct PodSpectrum {
  Vector sigma;
  Matrix right;
};

struct PodResult {
  /// Leading modes in canonical sign (largest-magnitude entry of phi > 0).
  std::vector<SingularTriplet> modes;
  PodSpectrum spectrum;
  std::vector<std::string> warnings;
};

/// Thin SVD of the centered snapshots (Householder QR of the tall side,
/// then one-sided Jacobi SVD of the triangular factor).
PodResult compute_pod(const CenteredSnapshots& snapshots, int mode_count);

/// Leading `mode_count` triplets ordered by descending sigma. A near-repeated
/// sigma at the cut-off is reported through `warnings` when given.
std::vector<SingularTriplet> compute_modes(const CenteredSnapshots& snapshots, int mode_count,
                                           std::vector<std::string>* warnings = nullptr);

/// Joint flip (-phi, sigma, -v) when <phi, reference> < 0.
SingularTriplet align_sign(const SingularTriplet& triplet, const Vector& reference);

/// [U~ v - sigma phi; U~^T phi - sigma v; phi^T phi - 1].
Vector pod_residual(const SingularTriplet& triplet, const Matrix& centered);

/// Relative gap below which two singular values count as repeated.
inline constexpr double kDegenerateGap = 1e-8;

}  // namespace mcfi
