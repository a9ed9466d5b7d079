#pragma once

#include <Eigen/Core>

#include "shapestar/model.hpp"
#include "shapestar/poly.hpp"
#include "shapestar/preprocess.hpp"
#include "shapestar/relax.hpp"
#include "shapestar/sdp.hpp"

namespace shapestar {

struct CertifySettings {
  /// Eigenvalues at or below corank_rel_tol * max(lambda_max, 1) count as zero.
  double corank_rel_tol = 1e-6;
  /// Largest relative duality gap that still certifies.
  double eta_tol = 1e-3;
};

struct Certificate {
  int corank = 0;
  Eigen::VectorXd eig_min_list;  ///< up to 3 smallest eigenvalues of S0, ascending
  double eta = 0.0;
  bool certified = false;
  double corank_rel_tol = 1e-6;
};

struct Candidate {
  Eigen::VectorXd c_raw;  ///< K entries
  Eigen::VectorXd r_raw;  ///< 9 entries, vec(R) column-major
};

/// Min-eigenvector of S0 normalized to a unit constant entry.
Candidate extract_candidate(const Eigen::MatrixXd& S0, const BasisSpec& spec);

/// Clamp into [0, 1].
Eigen::VectorXd project_coeffs(const Eigen::VectorXd& c_raw);

/// Nearest rotation (Frobenius) to the 3x3 matrix whose columns are r_raw.
Eigen::Matrix3d project_rotation(const Eigen::VectorXd& r_raw);

Certificate certify(double gamma, double f_hat, const Eigen::MatrixXd& S0,
                    const CertifySettings& settings = {});

struct SolverSettings {
  RelaxVariant variant = RelaxVariant::Reduced2;
  So3ConstraintSet so3 = So3ConstraintSet::All15;
  SdpSettings sdp;
  CertifySettings cert;
};

/// Certifiable solve of a centered problem (relax, solve, round, certify,
/// recover translation). Never throws on an uncertified outcome.
Reconstruction solve_centered(const CenteredProblem& prob, const SolverSettings& settings = {});

/// normalize -> eliminate_translation -> solve_centered -> denormalize.
/// Coefficients and translation are reported in input units.
Reconstruction shape_star(const DeformableModel& model, const Observation& obs, double alpha,
                          const SolverSettings& settings = {});

}  // namespace shapestar
