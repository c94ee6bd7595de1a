#pragma once

#include <Eigen/Dense>

#include <variant>
#include <vector>

#include "mcfi/error.hpp"

namespace mcfi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Nodal solution values. In 2D the u block (N entries, row-major with y
/// outer and x inner) is followed by the v block.
using StateVector = Eigen::VectorXd;
/// One value per grid node (length N).
using NodalField = Eigen::VectorXd;
using DesignVector = Eigen::VectorXd;

/// Uniform structured grid on [-1,1] (1D) or [-1,1]^2 (2D).
class Grid {
 public:
  static Grid line(int nodes, double lo = -1.0, double hi = 1.0);
  static Grid square(int nx, int ny, double lo = -1.0, double hi = 1.0);

  int dimension() const { return dimension_; }
  int nx() const { return nx_; }
  /// 1 in 1D.
  int ny() const { return ny_; }
  int node_count() const { return nx_ * ny_; }
  int state_size() const { return node_count() * dimension_; }
  double dx() const { return dx_; }
  /// 0 in 1D.
  double dy() const { return dy_; }
  double x(int i) const { return lo_ + i * dx_; }
  double y(int j) const { return dimension_ == 1 ? 0.0 : lo_ + j * dy_; }
  int node(int i, int j) const { return j * nx_ + i; }

  bool operator==(const Grid&) const = default;

 private:
  Grid(int dimension, int nx, int ny, double lo, double hi);

  int dimension_ = 1;
  int nx_ = 0;
  int ny_ = 1;
  double lo_ = -1.0;
  double hi_ = 1.0;
  double dx_ = 0.0;
  double dy_ = 0.0;
};

/// Forward-Euler trajectory. Column k of `snapshots` holds u^(k+1); dt[k]
/// is the step that advanced u^(k) to u^(k+1).
struct Trajectory {
  StateVector initial_state;
  Matrix snapshots;
  std::vector<double> dt;

  int steps() const { return static_cast<int>(snapshots.cols()); }
  int state_size() const { return static_cast<int>(snapshots.rows()); }
  /// u^(k) for k = 0..steps().
  StateVector state(int k) const;
  double time(int k) const;
};

struct GaussianBumps1D {
  std::vector<double> centers{-0.70, -0.15, 0.40, 0.75};
  double width = 0.25;
  double baseline = 0.1;
};

/// Piecewise-constant horizontal strips in y over [band_lo, band_hi];
/// alpha = outside_value elsewhere.
struct Strips2D {
  double band_lo = -0.8;
  double band_hi = 0.8;
  int count = 100;
  double outside_value = 1.0;

  double strip_width() const { return (band_hi - band_lo) / count; }
  /// Strip index of a y coordinate, or -1 outside the band. Band endpoints
  /// belong to the band; a node on an interior strip edge belongs to the
  /// lower strip.
  int strip_of(double y) const;
  double strip_center(int strip) const { return band_lo + (strip + 0.5) * strip_width(); }
};

using DesignVariant = std::variant<GaussianBumps1D, Strips2D>;

class DesignSpec {
 public:
  DesignSpec(DesignVariant variant, Vector lower, Vector upper);

  static DesignSpec gaussian_bumps(GaussianBumps1D bumps = {}, double lower = -0.35,
                                   double upper = 0.35);
  static DesignSpec strips(Strips2D strips = {}, double lower = 0.1, double upper = 4.0);

  const DesignVariant& variant() const { return variant_; }
  int size() const;
  int dimension() const { return std::holds_alternative<GaussianBumps1D>(variant_) ? 1 : 2; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

 private:
  DesignVariant variant_;
  Vector lower_;
  Vector upper_;
};

/// Nodal advection multiplier alpha for design x. Evaluation outside the
/// bounds is allowed.
NodalField alpha_field_from_design(const DesignSpec& spec, const DesignVector& x, const Grid& grid);

/// B^T g: pulls a nodal sensitivity back to the design variables.
DesignVector design_basis_transpose_apply(const DesignSpec& spec, const NodalField& nodal_gradient,
                                          const Grid& grid);

/// Design basis sampled on the grid, N x n_x (column j is d alpha / d x_j).
Matrix design_basis(const DesignSpec& spec, const Grid& grid);

/// One POD mode: U~ v = sigma phi, U~^T phi = sigma v, |phi| = 1.
struct SingularTriplet {
  Vector phi;
  double sigma = 0.0;
  Vector v;
  /// Zero-based rank of the singular value.
  int index = 0;
};

}  // namespace mcfi
