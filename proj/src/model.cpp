#include "shapestar/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

namespace shapestar {

namespace {

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

void require_same_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("coefficient vectors differ in length: " + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()));
  }
}

}  // namespace

DeformableModel::DeformableModel(std::vector<Eigen::Matrix3Xd> b) : bases(std::move(b)) {
  if (bases.empty()) throw InvalidArgument("deformable model needs at least one basis shape");
  const auto n = bases.front().cols();
  if (n < 4) throw InvalidArgument("deformable model needs at least 4 landmarks");
  for (std::size_t k = 0; k < bases.size(); ++k) {
    if (bases[k].cols() != n) {
      throw InvalidArgument("basis " + std::to_string(k) + " has " +
                            std::to_string(bases[k].cols()) + " landmarks, expected " +
                            std::to_string(n));
    }
    if (!all_finite(bases[k])) {
      throw InvalidArgument("basis " + std::to_string(k) + " has non-finite entries");
    }
  }
  scale_b = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(bases.size()));
}

Eigen::Matrix3Xd DeformableModel::shape(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != K()) throw InvalidArgument("shape(): expected " + std::to_string(K()) + " coefficients");
  Eigen::Matrix3Xd s = Eigen::Matrix3Xd::Zero(3, N());
  for (int k = 0; k < K(); ++k) s += coeffs[k] * bases[k];
  return s;
}

Observation::Observation(Eigen::Matrix2Xd z, Intrinsics intr)
    : Observation(std::move(z), Eigen::VectorXd(), intr) {}

Observation::Observation(Eigen::Matrix2Xd z, Eigen::VectorXd w, Intrinsics intr)
    : landmarks(std::move(z)), weights(std::move(w)), intrinsics(intr) {
  if (weights.size() == 0) weights = Eigen::VectorXd::Ones(landmarks.cols());
  if (weights.size() != landmarks.cols()) {
    throw InvalidArgument("observation has " + std::to_string(landmarks.cols()) +
                          " landmarks but " + std::to_string(weights.size()) + " weights");
  }
  if (!landmarks.allFinite() || !weights.allFinite()) {
    throw InvalidArgument("observation has non-finite entries");
  }
  if ((weights.array() < 0.0).any()) throw InvalidArgument("landmark weights must be nonnegative");
  if (!(intrinsics.sx > 0.0) || !(intrinsics.sy > 0.0)) {
    throw InvalidArgument("camera intrinsics must be positive");
  }
}

void validate_rotation(const Eigen::Matrix3d& R, double tol) {
  if (!R.allFinite()) throw InvalidArgument("rotation has non-finite entries");
  const double orth = (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
  if (orth > tol) throw InvalidArgument("rotation is not orthonormal (|R^T R - I| = " + std::to_string(orth) + ")");
  if (std::abs(R.determinant() - 1.0) > tol) throw InvalidArgument("rotation has determinant != +1");
}

std::string to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Inaccurate: return "inaccurate";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::IterLimit: return "iteration-limit";
  }
  return "unknown";
}

double geodesic_rotation_error(const Eigen::Matrix3d& Ra, const Eigen::Matrix3d& Rb) {
  if (!Ra.allFinite() || !Rb.allFinite()) {
    throw InvalidArgument("geodesic_rotation_error: non-finite rotation");
  }
  const double cos_angle = std::clamp(((Ra.transpose() * Rb).trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(cos_angle) * 180.0 / std::numbers::pi;
}

double shape_error(const DeformableModel& model, const Eigen::VectorXd& c_est,
                   const Eigen::VectorXd& c_gt) {
  require_same_length(c_est, c_gt);
  if (c_est.size() != model.K()) throw InvalidArgument("shape_error: coefficient length != K");
  const Eigen::Matrix3Xd diff = model.shape(c_est - c_gt);
  return diff.colwise().norm().mean();
}

double coeff_error(const Eigen::VectorXd& c_est, const Eigen::VectorXd& c_gt) {
  require_same_length(c_est, c_gt);
  return (c_est - c_gt).norm();
}

Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& omega) {
  const double angle = omega.norm();
  if (angle == 0.0) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix();
}

}  // namespace shapestar
