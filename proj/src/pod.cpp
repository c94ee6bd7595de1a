#include "mcfi/pod.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <sstream>

namespace mcfi {

CenteredSnapshots center(const Matrix& snapshots) {
  if (snapshots.cols() < 2) {
    throw DegenerateInputError("centering needs at least two snapshots");
  }
  CenteredSnapshots out;
  out.mean = snapshots.rowwise().mean();
  out.centered = snapshots.colwise() - out.mean;
  return out;
}

CenteredSnapshots center(const Trajectory& trajectory) { return center(trajectory.snapshots); }

namespace {

struct ThinSvd {
  Vector sigma;
  Matrix left;   // n_s x m
  Matrix right;  // n_t x r
};

// QR of the tall orientation, then Jacobi SVD of the small r x r factor.
ThinSvd thin_svd(const Matrix& a, int m) {
  const bool tall = a.rows() >= a.cols();
  Eigen::HouseholderQR<Matrix> qr;
  if (tall) {
    qr.compute(a);
  } else {
    qr.compute(a.transpose());
  }
  const Eigen::Index rows = qr.matrixQR().rows();
  const Eigen::Index r = qr.matrixQR().cols();
  const Matrix rfac = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Matrix> svd(rfac, Eigen::ComputeFullU | Eigen::ComputeFullV);

  ThinSvd out;
  out.sigma = svd.singularValues();
  // QR input = (Q [Ur; 0]) S Vr^T.
  if (tall) {
    Matrix pad = Matrix::Zero(rows, m);
    pad.topRows(r) = svd.matrixU().leftCols(m);
    out.left = qr.householderQ() * pad;
    out.right = svd.matrixV();
  } else {
    // a = (QR input)^T = Vr S (Q [Ur; 0])^T: left vectors are Vr.
    out.left = svd.matrixV().leftCols(m);
    Matrix pad = Matrix::Zero(rows, r);
    pad.topRows(r) = svd.matrixU();
    out.right = qr.householderQ() * pad;
  }
  return out;
}

}  // namespace

PodResult compute_pod(const CenteredSnapshots& snapshots, int mode_count) {
  const auto& a = snapshots.centered;
  const int r = static_cast<int>(std::min(a.rows(), a.cols()));
  if (mode_count < 1 || mode_count > r) {
    throw DimensionError("mode count must lie in [1, min(n_s, n_t)] = [1, " + std::to_string(r) + "]");
  }
  ThinSvd svd = thin_svd(a, mode_count);

  PodResult out;
  for (int i = 0; i < mode_count; ++i) {
    SingularTriplet t;
    t.phi = svd.left.col(i);
    t.v = svd.right.col(i);
    t.sigma = svd.sigma[i];
    t.index = i;
    Eigen::Index at;
    t.phi.cwiseAbs().maxCoeff(&at);
    if (t.phi[at] < 0.0) {
      t.phi = -t.phi;
      t.v = -t.v;
      svd.right.col(i) = t.v;
    }
    out.modes.push_back(std::move(t));
  }

  const double s1 = svd.sigma[0];
  for (int i = 0; i < mode_count; ++i) {
    if (i + 1 >= r) break;
    const double gap = svd.sigma[i] - svd.sigma[i + 1];
    if (gap <= kDegenerateGap * s1) {
      std::ostringstream msg;
      msg << "singular values " << i + 1 << " and " << i + 2 << " are nearly repeated (gap " << gap
          << ", sigma_1 " << s1 << "); mode derivatives are unreliable";
      out.warnings.push_back(msg.str());
    }
  }
  out.spectrum.sigma = std::move(svd.sigma);
  out.spectrum.right = std::move(svd.right);
  return out;
}

std::vector<SingularTriplet> compute_modes(const CenteredSnapshots& snapshots, int mode_count,
                                           std::vector<std::string>* warnings) {
  PodResult pod = compute_pod(snapshots, mode_count);
  if (warnings) warnings->insert(warnings->end(), pod.warnings.begin(), pod.warnings.end());
  return std::move(pod.modes);
}

SingularTriplet align_sign(const SingularTriplet& triplet, const Vector& reference) {
  if (reference.size() != triplet.phi.size()) {
    throw DimensionError("alignment reference length does not match the mode");
  }
  const double dot = triplet.phi.dot(reference);
  if (dot == 0.0) {
    throw AmbiguousAlignmentError("mode is orthogonal to its alignment reference");
  }
  if (dot > 0.0) return triplet;
  SingularTriplet flipped = triplet;
  flipped.phi = -triplet.phi;
  flipped.v = -triplet.v;
  return flipped;
}

Vector pod_residual(const SingularTriplet& t, const Matrix& centered) {
  const Eigen::Index ns = centered.rows();
  const Eigen::Index nt = centered.cols();
  if (t.phi.size() != ns || t.v.size() != nt) {
    throw DimensionError("triplet dimensions do not match the snapshot matrix");
  }
  Vector r(ns + nt + 1);
  r.head(ns) = centered * t.v - t.sigma * t.phi;
  r.segment(ns, nt) = centered.transpose() * t.phi - t.sigma * t.v;
  r[ns + nt] = t.phi.squaredNorm() - 1.0;
  return r;
}

}  // namespace mcfi
