#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shapestar/errors.hpp"

namespace shapestar {

/// K basis shapes of N landmarks each. The shape generated by coefficients c
/// is sum_k c_k * bases[k].
struct DeformableModel {
  std::vector<Eigen::Matrix3Xd> bases;
  /// Per-basis multiplier applied by normalization (1 when untouched).
  Eigen::VectorXd scale_b;

  DeformableModel() = default;
  /// Validates K >= 1, N >= 4, equal column counts and finiteness.
  explicit DeformableModel(std::vector<Eigen::Matrix3Xd> bases);

  int K() const { return static_cast<int>(bases.size()); }
  int N() const { return bases.empty() ? 0 : static_cast<int>(bases.front().cols()); }

  /// sum_k c_k B_k.
  Eigen::Matrix3Xd shape(const Eigen::VectorXd& coeffs) const;
};

struct Intrinsics {
  double sx = 1.0;
  double sy = 1.0;
};

/// 2D landmarks with per-landmark weights under a weak-perspective camera.
struct Observation {
  Eigen::Matrix2Xd landmarks;
  Eigen::VectorXd weights;
  Intrinsics intrinsics;
  /// Divisor applied to the landmarks by normalization (1 when untouched).
  double scale_z = 1.0;

  Observation() = default;
  /// Unit weights.
  explicit Observation(Eigen::Matrix2Xd landmarks, Intrinsics intrinsics = {});
  Observation(Eigen::Matrix2Xd landmarks, Eigen::VectorXd weights, Intrinsics intrinsics = {});

  int N() const { return static_cast<int>(landmarks.cols()); }
};

struct Pose {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector2d t = Eigen::Vector2d::Zero();
};

/// Throws InvalidArgument unless R^T R = I and det R = +1 within `tol`.
void validate_rotation(const Eigen::Matrix3d& R, double tol = 1e-8);

enum class SdpStatus { Optimal, Inaccurate, Infeasible, IterLimit };

std::string to_string(SdpStatus status);

struct Reconstruction {
  Eigen::VectorXd coeffs;
  Pose pose;
  double f_lower = 0.0;  ///< SDP optimum gamma
  double f_upper = 0.0;  ///< objective at the rounded candidate
  double eta = 0.0;      ///< relative duality gap
  int corank = 0;
  bool certified = false;
  std::optional<Eigen::VectorXd> weights;  ///< final GNC weights

  SdpStatus sdp_status = SdpStatus::Optimal;
  double sdp_time = 0.0;  ///< accumulated solver wall time [s]
  int sdp_iterations = 0;
  int gnc_iterations = 0;
  std::string diagnostics;
};

/// Geodesic distance between two rotations, in degrees.
double geodesic_rotation_error(const Eigen::Matrix3d& Ra, const Eigen::Matrix3d& Rb);

/// Mean over landmarks of || sum_k (c_est,k - c_gt,k) B_ki ||.
double shape_error(const DeformableModel& model, const Eigen::VectorXd& c_est,
                   const Eigen::VectorXd& c_gt);

double coeff_error(const Eigen::VectorXd& c_est, const Eigen::VectorXd& c_gt);

/// exp of the skew matrix of `omega` (Rodrigues).
Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& omega);

}  // namespace shapestar
