#pragma once

#include <vector>

#include <Eigen/Core>

#include "shapestar/model.hpp"
#include "shapestar/relax.hpp"

namespace shapestar {

struct SdpSettings {
  /// Relative primal/dual infeasibility and gap required for Optimal.
  double tol = 1e-8;
  int max_iter = 100;
  /// Fraction of the distance to the cone boundary taken per step.
  double step_fraction = 0.95;
  bool verbose = false;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::IterLimit;
  double gamma = 0.0;
  double objective = 0.0;  ///< free_objective . u
  std::vector<Eigen::MatrixXd> gram_blocks;
  std::vector<Eigen::VectorXd> lambdas;
  Eigen::VectorXd free_values;
  Eigen::VectorXd dual;                       ///< multipliers of the equalities
  std::vector<Eigen::MatrixXd> dual_slacks;   ///< -A^*(y), one per block
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double wall_time = 0.0;
};

/// Primal-dual interior-point solve (HKM direction with Mehrotra
/// predictor-corrector). Linearly dependent free columns are eliminated
/// before the iterations and reported as zero.
SdpSolution solve(const SdpProblem& problem, const SdpSettings& settings = {});

/// Max over constraints of |sum of block/free contributions - rhs|.
double constraint_residual(const SdpProblem& problem, const std::vector<Eigen::MatrixXd>& blocks,
                           const Eigen::VectorXd& free_values);

}  // namespace shapestar
