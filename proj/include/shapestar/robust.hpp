#pragma once

#include <vector>

#include <Eigen/Core>

#include "shapestar/certify.hpp"
#include "shapestar/model.hpp"

namespace shapestar {

/// Truncated least squares: rho(r) = min(r^2, cbar^2).
struct TlsCost {
  double cbar = 1.0;

  explicit TlsCost(double cbar);
  double operator()(double r) const;
};

struct GncState {
  double mu = 1e-4;
  Eigen::VectorXd weights;
  int tau = 0;
  std::vector<double> objective_history;
  double cbar = 1.0;
};

struct GncSettings {
  /// Truncation threshold in normalized residual units. No default: must be
  /// set by the caller (a typical choice is 5 * sigma * sqrt(2)).
  double cbar = 0.0;
  double alpha = 0.0;
  double mu0 = 1e-4;
  double mu_factor = 2.0;
  int max_iter = 100;
  double conv_tol = 1e-10;
  /// Landmarks whose weight falls below this leave the inner problem.
  double drop_below = 1e-8;
  SolverSettings solver;
};

/// Unweighted reprojection residual of every landmark, in the units of `obs`.
Eigen::VectorXd residuals(const DeformableModel& model, const Observation& obs,
                          const Eigen::VectorXd& coeffs, const Eigen::Matrix3d& R,
                          const Eigen::Vector2d& t);

/// Smooth surrogate of the TLS cost; convex for small mu, TLS as mu -> inf.
double gnc_surrogate(double r, double mu, double cbar);

/// Outlier process Phi(w) = mu (1 - w) / (mu + w) * cbar^2.
double outlier_process(double w, double mu, double cbar);

/// argmin over w in [0, 1] of w r^2 + Phi(w).
double weight_update(double r, double mu, double cbar);

/// sum_i [w_i r_i^2 + Phi(w_i)] + alpha sum_k c_k.
double gnc_objective(const Eigen::VectorXd& residuals, const Eigen::VectorXd& weights,
                     double mu, double cbar, double alpha, const Eigen::VectorXd& coeffs);

/// Graduated non-convexity around the certifiable solver. The inputs are
/// normalized first; cbar refers to the normalized problem. The returned
/// reconstruction is in input units and carries the final GNC weights.
Reconstruction shape_sharp(const DeformableModel& model, const Observation& obs,
                           const GncSettings& settings, GncState* state = nullptr);

}  // namespace shapestar
