#include "shapestar/certify.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace shapestar {

Candidate extract_candidate(const Eigen::MatrixXd& S0, const BasisSpec& spec) {
  if (S0.rows() != S0.cols() || S0.rows() != static_cast<Eigen::Index>(spec.gram_basis.size())) {
    throw InvalidArgument("extract_candidate: S0 size does not match the gram basis");
  }
  const int nvars = spec.nvars();
  const int one = spec.gram_index(Monomial(nvars));
  if (one < 0) throw InvalidArgument("extract_candidate: gram basis lacks the constant monomial");

  const Eigen::MatrixXd sym = 0.5 * (S0 + S0.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd v = eig.eigenvectors().col(0);
  if (std::abs(v[one]) < 1e-6) {
    throw ExtractionDegenerate("min-eigenvector of S0 has constant entry " + std::to_string(v[one]));
  }
  const Eigen::VectorXd vn = v / v[one];

  Candidate cand;
  cand.c_raw.resize(spec.K);
  cand.r_raw.resize(9);
  for (int k = 0; k < spec.K; ++k) {
    const int idx = spec.gram_index(Monomial::variable(nvars, c_var(k)));
    if (idx < 0) throw InvalidArgument("extract_candidate: gram basis lacks c monomials");
    cand.c_raw[k] = vn[idx];
  }
  for (int j = 0; j < 9; ++j) {
    const int idx = spec.gram_index(Monomial::variable(nvars, r_var(spec.K, j)));
    if (idx < 0) throw InvalidArgument("extract_candidate: gram basis lacks r monomials");
    cand.r_raw[j] = vn[idx];
  }
  return cand;
}

Eigen::VectorXd project_coeffs(const Eigen::VectorXd& c_raw) {
  return c_raw.cwiseMax(0.0).cwiseMin(1.0);
}

Eigen::Matrix3d project_rotation(const Eigen::VectorXd& r_raw) {
  if (r_raw.size() != 9) throw InvalidArgument("project_rotation: expected 9 entries");
  if (!r_raw.allFinite()) throw InvalidArgument("project_rotation: non-finite input");
  const Eigen::Matrix3d M = Eigen::Map<const Eigen::Matrix3d>(r_raw.data());
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d s = svd.singularValues();
  if (!(s[0] > 0.0) || s[2] <= 1e-12 * s[0]) {
    throw ProjectionDegenerate("project_rotation: matrix is rank deficient");
  }
  const Eigen::Matrix3d U = svd.matrixU();
  const Eigen::Matrix3d V = svd.matrixV();
  Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
  D(2, 2) = (U * V.transpose()).determinant() > 0.0 ? 1.0 : -1.0;
  return U * D * V.transpose();
}

Certificate certify(double gamma, double f_hat, const Eigen::MatrixXd& S0,
                    const CertifySettings& settings) {
  Certificate cert;
  cert.corank_rel_tol = settings.corank_rel_tol;
  cert.eta = std::max(0.0, (f_hat - gamma) / std::max(f_hat, 1e-12));

  const Eigen::MatrixXd sym = 0.5 * (S0 + S0.transpose());
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues();
  const double cut = settings.corank_rel_tol * std::max(ev.size() > 0 ? ev.maxCoeff() : 0.0, 1.0);
  cert.corank = static_cast<int>((ev.array() <= cut).count());
  cert.eig_min_list = ev.head(std::min<Eigen::Index>(3, ev.size()));
  cert.certified = cert.corank == 1 && cert.eta <= settings.eta_tol;
  return cert;
}

Reconstruction solve_centered(const CenteredProblem& prob, const SolverSettings& settings) {
  const PolyProgram prog = build_program(prob, settings.so3);
  const BasisSpec spec = build_basis(prob.K(), settings.variant);
  const SdpProblem sdp = assemble_sdp(prog, spec);
  const SdpSolution sol = solve(sdp, settings.sdp);

  Reconstruction rec;
  rec.sdp_status = sol.status;
  rec.sdp_time = sol.wall_time;
  rec.sdp_iterations = sol.iterations;
  rec.f_lower = sol.gamma;
  rec.coeffs = Eigen::VectorXd::Zero(prob.K());
  if (sol.status != SdpStatus::Optimal) rec.diagnostics = "sdp status: " + to_string(sol.status);
  if (sol.status == SdpStatus::Infeasible || sol.gram_blocks.empty()) {
    rec.f_upper = centered_objective(prob, rec.coeffs, rec.pose.R);
    rec.pose.t = recover_translation(prob, rec.coeffs, rec.pose.R);
    return rec;
  }

  const Eigen::MatrixXd S0 = lift_gram(sdp, sol.gram_blocks.front(), static_cast<int>(spec.gram_basis.size()));
  try {
    const Candidate cand = extract_candidate(S0, spec);
    rec.coeffs = project_coeffs(cand.c_raw);
    rec.pose.R = project_rotation(cand.r_raw);
  } catch (const ExtractionDegenerate& e) {
    rec.diagnostics += (rec.diagnostics.empty() ? "" : "; ") + std::string("extraction-degenerate: ") + e.what();
  } catch (const ProjectionDegenerate& e) {
    rec.diagnostics += (rec.diagnostics.empty() ? "" : "; ") + std::string("projection-degenerate: ") + e.what();
  }

  rec.f_upper = centered_objective(prob, rec.coeffs, rec.pose.R);
  const Certificate cert = certify(sol.gamma, rec.f_upper, S0, settings.cert);
  rec.eta = cert.eta;
  rec.corank = cert.corank;
  rec.certified = cert.certified && rec.diagnostics.empty();
  rec.pose.t = recover_translation(prob, rec.coeffs, rec.pose.R);
  return rec;
}

Reconstruction shape_star(const DeformableModel& model, const Observation& obs, double alpha,
                          const SolverSettings& settings) {
  const auto [nmodel, nobs] = normalize(model, obs);
  const CenteredProblem prob = eliminate_translation(nmodel, nobs, alpha);
  const Reconstruction rec = solve_centered(prob, settings);
  return denormalize(rec, nobs.scale_z, nmodel.scale_b, obs.intrinsics);
}

}  // namespace shapestar
