#include "mcfi/model.hpp"

#include <cmath>
#include <string>

namespace mcfi {

Grid::Grid(int dimension, int nx, int ny, double lo, double hi)
    : dimension_(dimension), nx_(nx), ny_(ny), lo_(lo), hi_(hi) {
  if (nx < 3 || (dimension == 2 && ny < 3)) {
    throw DimensionError("grid needs at least 3 nodes per direction");
  }
  if (!(hi > lo)) {
    throw DimensionError("grid extent must be positive");
  }
  dx_ = (hi - lo) / (nx - 1);
  dy_ = dimension == 2 ? (hi - lo) / (ny - 1) : 0.0;
}

Grid Grid::line(int nodes, double lo, double hi) { return Grid(1, nodes, 1, lo, hi); }

Grid Grid::square(int nx, int ny, double lo, double hi) { return Grid(2, nx, ny, lo, hi); }

StateVector Trajectory::state(int k) const {
  if (k == 0) return initial_state;
  return snapshots.col(k - 1);
}

double Trajectory::time(int k) const {
  double t = 0.0;
  for (int i = 0; i < k; ++i) t += dt[i];
  return t;
}

int Strips2D::strip_of(double y) const {
  constexpr double snap = 1e-9;
  const double w = strip_width();
  double t = (y - band_lo) / w;
  if (std::abs(t - std::round(t)) < snap) t = std::round(t);
  if (t < 0.0 || t > count) return -1;
  int s = static_cast<int>(std::ceil(t)) - 1;
  return s < 0 ? 0 : s;
}

DesignSpec::DesignSpec(DesignVariant variant, Vector lower, Vector upper)
    : variant_(std::move(variant)), lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != size() || upper_.size() != size()) {
    throw DimensionError("design bounds must have one entry per design variable");
  }
  if ((lower_.array() > upper_.array()).any()) {
    throw ConfigError("design lower bound exceeds upper bound");
  }
  if (const auto* s = std::get_if<Strips2D>(&variant_)) {
    if (s->count < 1 || !(s->band_hi > s->band_lo)) {
      throw ConfigError("strip band must be non-empty with at least one strip");
    }
  }
}

DesignSpec DesignSpec::gaussian_bumps(GaussianBumps1D bumps, double lower, double upper) {
  const auto n = static_cast<Eigen::Index>(bumps.centers.size());
  return DesignSpec(std::move(bumps), Vector::Constant(n, lower), Vector::Constant(n, upper));
}

DesignSpec DesignSpec::strips(Strips2D strips, double lower, double upper) {
  const int n = strips.count;
  return DesignSpec(strips, Vector::Constant(n, lower), Vector::Constant(n, upper));
}

int DesignSpec::size() const {
  if (const auto* b = std::get_if<GaussianBumps1D>(&variant_)) {
    return static_cast<int>(b->centers.size());
  }
  return std::get<Strips2D>(variant_).count;
}

namespace {

void check_design(const DesignSpec& spec, const DesignVector& x, const Grid& grid) {
  if (x.size() != spec.size()) {
    throw DimensionError("design vector has " + std::to_string(x.size()) + " entries, spec expects " +
                         std::to_string(spec.size()));
  }
  if (grid.dimension() != spec.dimension()) {
    throw DimensionError("design spec dimension does not match the grid");
  }
}

double bump(const GaussianBumps1D& b, int j, double x) {
  const double z = (x - b.centers[j]) / b.width;
  return std::exp(-z * z);
}

}  // namespace

NodalField alpha_field_from_design(const DesignSpec& spec, const DesignVector& x, const Grid& grid) {
  check_design(spec, x, grid);
  NodalField alpha(grid.node_count());
  if (const auto* b = std::get_if<GaussianBumps1D>(&spec.variant())) {
    for (int i = 0; i < grid.nx(); ++i) {
      double a = b->baseline;
      for (int j = 0; j < spec.size(); ++j) a += x[j] * bump(*b, j, grid.x(i));
      alpha[i] = a;
    }
    return alpha;
  }
  const auto& s = std::get<Strips2D>(spec.variant());
  for (int j = 0; j < grid.ny(); ++j) {
    const int strip = s.strip_of(grid.y(j));
    const double a = strip < 0 ? s.outside_value : x[strip];
    alpha.segment(static_cast<Eigen::Index>(j) * grid.nx(), grid.nx()).setConstant(a);
  }
  return alpha;
}

DesignVector design_basis_transpose_apply(const DesignSpec& spec, const NodalField& g, const Grid& grid) {
  if (g.size() != grid.node_count()) {
    throw DimensionError("nodal gradient length does not match the grid");
  }
  DesignVector out = DesignVector::Zero(spec.size());
  if (const auto* b = std::get_if<GaussianBumps1D>(&spec.variant())) {
    for (int j = 0; j < spec.size(); ++j) {
      double acc = 0.0;
      for (int i = 0; i < grid.nx(); ++i) acc += bump(*b, j, grid.x(i)) * g[i];
      out[j] = acc;
    }
    return out;
  }
  const auto& s = std::get<Strips2D>(spec.variant());
  for (int j = 0; j < grid.ny(); ++j) {
    const int strip = s.strip_of(grid.y(j));
    if (strip < 0) continue;
    out[strip] += g.segment(static_cast<Eigen::Index>(j) * grid.nx(), grid.nx()).sum();
  }
  return out;
}

Matrix design_basis(const DesignSpec& spec, const Grid& grid) {
  Matrix basis = Matrix::Zero(grid.node_count(), spec.size());
  if (const auto* b = std::get_if<GaussianBumps1D>(&spec.variant())) {
    for (int j = 0; j < spec.size(); ++j)
      for (int i = 0; i < grid.nx(); ++i) basis(i, j) = bump(*b, j, grid.x(i));
    return basis;
  }
  const auto& s = std::get<Strips2D>(spec.variant());
  for (int j = 0; j < grid.ny(); ++j) {
    const int strip = s.strip_of(grid.y(j));
    if (strip < 0) continue;
    for (int i = 0; i < grid.nx(); ++i) basis(grid.node(i, j), strip) = 1.0;
  }
  return basis;
}

}  // namespace mcfi
