#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "shapestar/model.hpp"

namespace shapestar {

/// Translation-free problem obtained by removing weighted centroids.
struct CenteredProblem {
  Eigen::Matrix2Xd z_tilde;                 ///< sqrt(w_i) (z_i - zbar)
  std::vector<Eigen::Matrix3Xd> b_tilde;    ///< sqrt(w_i) (B_ki - Bbar_k)
  Eigen::Vector2d zbar_w = Eigen::Vector2d::Zero();
  Eigen::Matrix3Xd bbar_w;                  ///< column k is Bbar_k
  double alpha = 0.0;
  Eigen::VectorXd weights_applied;
  /// Landmark indices (into the original observation) kept in z_tilde/b_tilde.
  std::vector<int> indices;

  int K() const { return static_cast<int>(b_tilde.size()); }
  int N() const { return static_cast<int>(z_tilde.cols()); }
};

/// Weights summing below this are rejected as degenerate.
inline constexpr double kMinWeightSum = 1e-12;

/// Divides landmarks by the intrinsics and shrinks them (and each basis) into
/// the unit ball. Scales are recorded in `scale_z` / `scale_b`.
std::pair<DeformableModel, Observation> normalize(const DeformableModel& model,
                                                  const Observation& obs);

/// Weighted-centroid removal. Landmarks with weight below `drop_below` are
/// left out of the centered problem; by default every landmark is kept.
CenteredProblem eliminate_translation(const DeformableModel& model, const Observation& obs,
                                      double alpha, double drop_below = 0.0);

/// Optimal translation for fixed (c, R).
Eigen::Vector2d recover_translation(const CenteredProblem& prob, const Eigen::VectorXd& coeffs,
                                    const Eigen::Matrix3d& R);

/// Translation-free weighted objective at (c, R).
double centered_objective(const CenteredProblem& prob, const Eigen::VectorXd& coeffs,
                          const Eigen::Matrix3d& R);

/// Weighted least-squares objective with explicit translation (camera
/// intrinsics applied).
double full_objective(const DeformableModel& model, const Observation& obs, double alpha,
                      const Eigen::VectorXd& coeffs, const Eigen::Matrix3d& R,
                      const Eigen::Vector2d& t);

/// Maps a reconstruction of the normalized problem back to input units.
Reconstruction denormalize(const Reconstruction& recon, double scale_z,
                           const Eigen::VectorXd& scale_b, const Intrinsics& intrinsics);

}  // namespace shapestar
