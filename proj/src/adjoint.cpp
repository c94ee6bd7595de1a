#include "mcfi/adjoint.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace mcfi {

namespace {

void check_modal_inputs(const SingularTriplet& t, const Matrix& centered, const ModalRhs& rhs) {
  const Eigen::Index ns = centered.rows();
  const Eigen::Index nt = centered.cols();
  if (t.phi.size() != ns || t.v.size() != nt || rhs.phi.size() != ns || rhs.v.size() != nt) {
    throw DimensionError("modal adjoint: triplet/rhs dimensions do not match the snapshot matrix");
  }
}

void check_sigma(const SingularTriplet& t, const Matrix& centered) {
  const double scale = std::max(1.0, centered.cwiseAbs().maxCoeff());
  if (!(t.sigma > 1e-14 * scale)) {
    throw SingularSystemError("modal adjoint: singular value " + std::to_string(t.sigma) +
                              " is zero; the bordered system is singular");
  }
}

// Back-substitutes psi_phi from the first block row and verifies the full
// transposed system.
ModalAdjoint finish(const SingularTriplet& t, const Matrix& centered, const ModalRhs& rhs,
                    Vector psi_v, double psi_sigma) {
  ModalAdjoint out;
  out.index = t.index;
  out.psi_phi = (centered * psi_v + 2.0 * psi_sigma * t.phi - rhs.phi) / t.sigma;
  out.psi_v = std::move(psi_v);
  out.psi_sigma = psi_sigma;
  const double res = modal_adjoint_residual(t, centered, out, rhs);
  if (!(res <= kModalResidualTolerance)) {
    std::ostringstream msg;
    msg << "modal adjoint for mode " << t.index + 1 << " has relative residual " << res
        << " (limit " << kModalResidualTolerance << ")";
    throw NumericError(msg.str());
  }
  return out;
}

void warn_condition(double cond, const SingularTriplet& t, std::vector<std::string>* warnings) {
  if (warnings && cond > kModalConditionLimit) {
    std::ostringstream msg;
    msg << "modal adjoint for mode " << t.index + 1 << " is ill-conditioned (estimate " << cond << ")";
    warnings->push_back(msg.str());
  }
}

}  // namespace

double modal_adjoint_residual(const SingularTriplet& t, const Matrix& centered, const ModalAdjoint& psi,
                              const ModalRhs& rhs) {
  const Vector r1 = -t.sigma * psi.psi_phi + centered * psi.psi_v + 2.0 * psi.psi_sigma * t.phi - rhs.phi;
  const Vector r2 = centered.transpose() * psi.psi_phi - t.sigma * psi.psi_v - rhs.v;
  const double r3 = -t.phi.dot(psi.psi_phi) - t.v.dot(psi.psi_v) - rhs.sigma;
  const double res = std::sqrt(r1.squaredNorm() + r2.squaredNorm() + r3 * r3);
  // ||A|| <= ||U~|| + sigma + 2 for unit phi and v; ||U~||_F bounds ||U~||_2.
  const double a_norm = centered.norm() + t.sigma + 2.0;
  const double psi_norm = std::sqrt(psi.psi_phi.squaredNorm() + psi.psi_v.squaredNorm() +
                                    psi.psi_sigma * psi.psi_sigma);
  const double b_norm = std::sqrt(rhs.phi.squaredNorm() + rhs.v.squaredNorm() + rhs.sigma * rhs.sigma);
  const double denom = a_norm * psi_norm + b_norm;
  return denom == 0.0 ? 0.0 : res / denom;
}

ModalAdjoint solve_modal_adjoint(const SingularTriplet& t, const Matrix& centered, const ModalRhs& rhs,
                                 std::vector<std::string>* warnings) {
  check_modal_inputs(t, centered, rhs);
  check_sigma(t, centered);
  const Eigen::Index nt = centered.cols();
  const double s = t.sigma;

  // Reduced system in (psi_v, psi_sigma):
  //   (U~^T U~ - s^2 I) psi_v + 2 s v psi_sigma = s b_v + U~^T b_phi
  //   -2 v^T psi_v - (2/s) psi_sigma            = b_sigma - phi^T b_phi / s
  Matrix m(nt + 1, nt + 1);
  m.topLeftCorner(nt, nt).noalias() = centered.transpose() * centered;
  m.topLeftCorner(nt, nt).diagonal().array() -= s * s;
  m.col(nt).head(nt) = 2.0 * s * t.v;
  m.row(nt).head(nt) = -2.0 * t.v.transpose();
  m(nt, nt) = -2.0 / s;

  Vector b(nt + 1);
  b.head(nt) = s * rhs.v + centered.transpose() * rhs.phi;
  b[nt] = rhs.sigma - t.phi.dot(rhs.phi) / s;

  Eigen::PartialPivLU<Matrix> lu(m);
  const double rcond = lu.rcond();
  warn_condition(rcond > 0.0 ? 1.0 / rcond : HUGE_VAL, t, warnings);
  const Vector sol = lu.solve(b);
  return finish(t, centered, rhs, sol.head(nt), sol[nt]);
}

ModalAdjointSolver::ModalAdjointSolver(const Matrix& centered, const PodSpectrum& spectrum)
    : centered_(centered), spectrum_(spectrum) {
  if (spectrum.right.rows() != centered.cols() || spectrum.right.cols() != spectrum.sigma.size()) {
    throw DimensionError("POD spectrum does not match the snapshot matrix");
  }
}

ModalAdjoint ModalAdjointSolver::solve(const SingularTriplet& t, const ModalRhs& rhs,
                                       std::vector<std::string>* warnings) const {
  check_modal_inputs(t, centered_, rhs);
  check_sigma(t, centered_);
  const double s = t.sigma;
  const double s2 = s * s;
  const Matrix& vr = spectrum_.right;
  const Vector& sig = spectrum_.sigma;

  // With U~^T U~ = V diag(sigma_j^2) V^T (zero on the complement of V), the
  // bordered system decouples: the v direction carries the border, every
  // other direction is scaled by 1 / (sigma_j^2 - s^2).
  const Vector c = s * rhs.v + centered_.transpose() * rhs.phi;
  const double d = rhs.sigma - t.phi.dot(rhs.phi) / s;
  const Vector p = vr.transpose() * c;

  Vector coef(p.size());
  double min_gap = s2;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (j == t.index) {
      coef[j] = 0.0;
      continue;
    }
    const double gap = sig[j] * sig[j] - s2;
    min_gap = std::min(min_gap, std::abs(gap));
    coef[j] = p[j] / gap;
  }
  warn_condition((sig[0] * sig[0] + s2 + 2.0) / std::max(min_gap, 1e-300), t, warnings);

  const double psi_sigma = t.v.dot(c) / (2.0 * s);
  const double along_v = -0.5 * d - psi_sigma / s;
  Vector psi_v = vr * coef + along_v * t.v;
  if (vr.cols() < vr.rows()) {
    // Null space of U~ (wide snapshot matrices): eigenvalue 0.
    psi_v -= (c - vr * p) / s2;
  }
  return finish(t, centered_, rhs, std::move(psi_v), psi_sigma);
}

Matrix modal_forcing(const SingularTriplet& t, const ModalAdjoint& psi) {
  Matrix f = psi.psi_phi * t.v.transpose() + t.phi * psi.psi_v.transpose();
  const Vector row_mean = f.rowwise().mean();
  f.colwise() -= row_mean;
  return f;
}

void subtract_modal_forcing(Matrix& g, const SingularTriplet& t, const ModalAdjoint& psi) {
  if (g.rows() != t.phi.size() || g.cols() != t.v.size()) {
    throw DimensionError("modal forcing does not match the adjoint right-hand side");
  }
  // Row means of psi_phi v^T + phi psi_v^T are psi_phi mean(v) + phi mean(psi_v).
  const double mv = t.v.mean();
  const double mpsi = psi.psi_v.mean();
  const Vector shift = psi.psi_phi * mv + t.phi * mpsi;
  g.noalias() -= psi.psi_phi * t.v.transpose();
  g.noalias() -= t.phi * psi.psi_v.transpose();
  g.colwise() += shift;
}

UnsteadyAdjoint solve_unsteady_adjoint(const Trajectory& traj, const NodalField& alpha, const Grid& grid,
                                       const SolverConfig& config, Matrix g) {
  const int nt = traj.steps();
  if (g.rows() != traj.state_size() || g.cols() != nt) {
    throw DimensionError("unsteady adjoint right-hand side must be n_s x n_t");
  }
  if (alpha.size() != grid.node_count()) throw DimensionError("alpha field does not match the grid");
  // Column c holds psi_b,c+1; dt[c+1] advanced u^(c+1) (snapshot column c).
  for (int c = nt - 2; c >= 0; --c) {
    double* psi_k = g.col(c).data();
    const double* psi_next = g.col(c + 1).data();
    g.col(c) += g.col(c + 1);
    add_jacobian_transpose_product(traj.snapshots.col(c).data(), alpha.data(), grid, config, psi_next,
                                   traj.dt[c + 1], psi_k);
  }
  if (!g.allFinite()) throw NumericError("unsteady adjoint overflowed");
  return UnsteadyAdjoint{std::move(g)};
}

DesignVector total_gradient(const DesignSpec& spec, const Grid& grid, const SolverConfig& config,
                            const ObjectiveSpec& objective, const ForwardSolution& sol,
                            GradientDiagnostics* diagnostics) {
  const Trajectory& traj = sol.trajectory;
  const int nt = traj.steps();
  const int ns = traj.state_size();
  const int m = objective.modes_required();

  ObjectivePartials part = partials(objective, sol.snapshots.mean, nt, sol.modes);

  // Algorithm: g = dF/du, then subtract each mode's forcing.
  Matrix g = part.state.size() ? std::move(part.state) : Matrix::Zero(ns, nt);
  std::vector<std::string> warnings;
  if (m > 0) {
    const ModalAdjointSolver solver(sol.snapshots.centered, sol.pod.spectrum);
    for (int i = 0; i < m; ++i) {
      const ModalAdjoint psi = solver.solve(sol.modes[i], part.modes[i], &warnings);
      if (diagnostics) {
        diagnostics->modal_residuals.push_back(
            modal_adjoint_residual(sol.modes[i], sol.snapshots.centered, psi, part.modes[i]));
      }
      subtract_modal_forcing(g, sol.modes[i], psi);
    }
  }

  const UnsteadyAdjoint adj = solve_unsteady_adjoint(traj, sol.alpha, grid, config, std::move(g));

  // dF/dx = dF/dx|explicit + sum_k dt_{k-1} B^T (d r_s(u^(k-1)) / d alpha)^T psi_k.
  NodalField nodal = NodalField::Zero(grid.node_count());
  for (int c = 0; c < nt; ++c) {
    const double* state = c == 0 ? traj.initial_state.data() : traj.snapshots.col(c - 1).data();
    add_design_jacobian_transpose_product(state, grid, config, adj.psi.col(c).data(), traj.dt[c],
                                          nodal.data());
  }
  DesignVector grad = design_basis_transpose_apply(spec, nodal, grid);
  if (part.design.size()) grad += part.design;

  if (diagnostics) {
    diagnostics->warnings.insert(diagnostics->warnings.end(), sol.pod.warnings.begin(), sol.pod.warnings.end());
    diagnostics->warnings.insert(diagnostics->warnings.end(), warnings.begin(), warnings.end());
  }
  return grad;
}

}  // namespace mcfi
