#pragma once

#include <string>
#include <vector>

#include "mcfi/pipeline.hpp"

namespace mcfi {

/// Right-hand side (dF/dphi, dF/dv, dF/dsigma) of one modal adjoint system.
using ModalRhs = ModalPartials;

/// Adjoint of one POD residual block.
struct ModalAdjoint {
  Vector psi_phi;
  Vector psi_v;
  double psi_sigma = 0.0;
  int index = 0;
};

/// Solves the transposed bordered POD system
///   -sigma psi_phi + U~ psi_v + 2 phi psi_sigma = b_phi
///   U~^T psi_phi - sigma psi_v                  = b_v
///   -phi^T psi_phi - v^T psi_v                  = b_sigma
/// by eliminating psi_phi and factoring the dense (n_t+1) bordered system in
/// (psi_v, psi_sigma). Throws SingularSystemError for sigma ~ 0 and
/// NumericError if the post-solve relative residual exceeds 1e-10.
ModalAdjoint solve_modal_adjoint(const SingularTriplet& triplet, const Matrix& centered,
                                 const ModalRhs& rhs, std::vector<std::string>* warnings = nullptr);

/// Same reduced system, diagonalized once with the thin spectrum of U~ so
/// each additional mode costs O(n_s n_t) instead of a new factorization.
class ModalAdjointSolver {
 public:
  ModalAdjointSolver(const Matrix& centered, const PodSpectrum& spectrum);
  ModalAdjoint solve(const SingularTriplet& triplet, const ModalRhs& rhs,
                     std::vector<std::string>* warnings = nullptr) const;

 private:
  const Matrix& centered_;
  const PodSpectrum& spectrum_;
};

/// Normwise relative residual ||A psi - b|| / (||A|| ||psi|| + ||b||) of the
/// full (n_s + n_t + 1) transposed system.
double modal_adjoint_residual(const SingularTriplet& triplet, const Matrix& centered,
                              const ModalAdjoint& psi, const ModalRhs& rhs);

inline constexpr double kModalResidualTolerance = 1e-10;
inline constexpr double kModalConditionLimit = 1e12;

/// (psi_phi v^T + phi psi_v^T) P: the modal forcing with the row-wise
/// temporal mean removed.
Matrix modal_forcing(const SingularTriplet& triplet, const ModalAdjoint& psi);

/// g -= modal_forcing(triplet, psi), without materializing the forcing.
void subtract_modal_forcing(Matrix& g, const SingularTriplet& triplet, const ModalAdjoint& psi);

/// psi_b,1..psi_b,n_t stored as the columns of an n_s x n_t matrix.
struct UnsteadyAdjoint {
  Matrix psi;
};

/// Backward sweep psi_nt = g_nt, psi_k = g_k + (I + dt_k J(u^(k))^T) psi_k+1.
/// Consumes `g` (the sweep runs in place).
UnsteadyAdjoint solve_unsteady_adjoint(const Trajectory& trajectory, const NodalField& alpha,
                                       const Grid& grid, const SolverConfig& config, Matrix g);

struct GradientDiagnostics {
  std::vector<double> modal_residuals;
  std::vector<std::string> warnings;
};

/// Full adjoint gradient dF/dx at a solved forward point: modal adjoints,
/// accumulated modal forcing, one unsteady sweep, design contraction.
DesignVector total_gradient(const DesignSpec& spec, const Grid& grid, const SolverConfig& config,
                            const ObjectiveSpec& objective, const ForwardSolution& solution,
                            GradientDiagnostics* diagnostics = nullptr);

}  // namespace mcfi
