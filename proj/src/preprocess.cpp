#include "shapestar/preprocess.hpp"

#include <cmath>

namespace shapestar {

namespace {

Eigen::Matrix<double, 2, 3> projection(const Intrinsics& intr) {
  Eigen::Matrix<double, 2, 3> P = Eigen::Matrix<double, 2, 3>::Zero();
  P(0, 0) = intr.sx;
  P(1, 1) = intr.sy;
  return P;
}

void check_consistent(const DeformableModel& model, const Observation& obs) {
  if (model.K() < 1) throw InvalidArgument("model has no basis shapes");
  if (model.N() != obs.N()) {
    throw InvalidArgument("model has " + std::to_string(model.N()) + " landmarks, observation has " +
                          std::to_string(obs.N()));
  }
}

}  // namespace

std::pair<DeformableModel, Observation> normalize(const DeformableModel& model,
                                                  const Observation& obs) {
  check_consistent(model, obs);
  if (!(obs.intrinsics.sx > 0.0) || !(obs.intrinsics.sy > 0.0)) {
    throw InvalidArgument("normalize: intrinsics must be positive");
  }
  if (!obs.landmarks.allFinite() || !obs.weights.allFinite()) {
    throw InvalidArgument("normalize: non-finite observation");
  }
  if (!(obs.weights.sum() > kMinWeightSum)) throw DegenerateWeights("normalize: weights sum to zero");

  Observation out = obs;
  out.landmarks.row(0) /= obs.intrinsics.sx;
  out.landmarks.row(1) /= obs.intrinsics.sy;
  out.intrinsics = Intrinsics{1.0, 1.0};
  const double zmax = out.landmarks.colwise().norm().maxCoeff();
  out.scale_z = zmax > 1.0 ? zmax : 1.0;
  out.landmarks /= out.scale_z;

  DeformableModel m = model;
  m.scale_b.resize(model.K());
  for (int k = 0; k < model.K(); ++k) {
    if (!model.bases[k].allFinite()) throw InvalidArgument("normalize: non-finite basis");
    const double bmax = model.bases[k].colwise().norm().maxCoeff();
    m.scale_b[k] = bmax > 1.0 ? 1.0 / bmax : 1.0;
    m.bases[k] *= m.scale_b[k];
  }
  return {std::move(m), std::move(out)};
}

CenteredProblem eliminate_translation(const DeformableModel& model, const Observation& obs,
                                      double alpha, double drop_below) {
  check_consistent(model, obs);
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");

  CenteredProblem prob;
  prob.alpha = alpha;
  prob.weights_applied = obs.weights;
  for (int i = 0; i < obs.N(); ++i) {
    if (obs.weights[i] >= drop_below) prob.indices.push_back(i);
  }
  double wsum = 0.0;
  for (int i : prob.indices) wsum += obs.weights[i];
  if (!(wsum > kMinWeightSum)) {
    throw DegenerateWeights("weights sum to " + std::to_string(wsum));
  }

  const int K = model.K();
  prob.bbar_w = Eigen::Matrix3Xd::Zero(3, K);
  for (int i : prob.indices) {
    const double w = obs.weights[i];
    prob.zbar_w += w * obs.landmarks.col(i);
    for (int k = 0; k < K; ++k) prob.bbar_w.col(k) += w * model.bases[k].col(i);
  }
  prob.zbar_w /= wsum;
  prob.bbar_w /= wsum;

  const auto n = static_cast<Eigen::Index>(prob.indices.size());
  prob.z_tilde.resize(2, n);
  prob.b_tilde.assign(K, Eigen::Matrix3Xd(3, n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const int i = prob.indices[j];
    const double sw = std::sqrt(obs.weights[i]);
    prob.z_tilde.col(j) = sw * (obs.landmarks.col(i) - prob.zbar_w);
    for (int k = 0; k < K; ++k) {
      prob.b_tilde[k].col(j) = sw * (model.bases[k].col(i) - prob.bbar_w.col(k));
    }
  }
  return prob;
}

Eigen::Vector2d recover_translation(const CenteredProblem& prob, const Eigen::VectorXd& coeffs,
                                    const Eigen::Matrix3d& R) {
  if (coeffs.size() != prob.K()) throw InvalidArgument("recover_translation: coefficient length != K");
  const Eigen::Vector3d mean_shape = prob.bbar_w * coeffs;
  return prob.zbar_w - (R * mean_shape).head<2>();
}

double centered_objective(const CenteredProblem& prob, const Eigen::VectorXd& coeffs,
                          const Eigen::Matrix3d& R) {
  if (coeffs.size() != prob.K()) throw InvalidArgument("centered_objective: coefficient length != K");
  Eigen::Matrix3Xd shape = Eigen::Matrix3Xd::Zero(3, prob.N());
  for (int k = 0; k < prob.K(); ++k) shape += coeffs[k] * prob.b_tilde[k];
  const Eigen::Matrix2Xd proj = (R * shape).topRows<2>();
  return (prob.z_tilde - proj).squaredNorm() + prob.alpha * coeffs.sum();
}

double full_objective(const DeformableModel& model, const Observation& obs, double alpha,
                      const Eigen::VectorXd& coeffs, const Eigen::Matrix3d& R,
                      const Eigen::Vector2d& t) {
  check_consistent(model, obs);
  const Eigen::Matrix2Xd proj = projection(obs.intrinsics) * R * model.shape(coeffs);
  double f = 0.0;
  for (int i = 0; i < obs.N(); ++i) {
    f += obs.weights[i] * (obs.landmarks.col(i) - proj.col(i) - t).squaredNorm();
  }
  return f + alpha * coeffs.sum();
}

Reconstruction denormalize(const Reconstruction& recon, double scale_z,
                           const Eigen::VectorXd& scale_b, const Intrinsics& intrinsics) {
  if (!(scale_z > 0.0) || !(scale_b.array() > 0.0).all()) {
    throw InvalidArgument("denormalize: scales must be positive");
  }
  if (scale_b.size() != recon.coeffs.size()) throw InvalidArgument("denormalize: scale_b length != K");
  Reconstruction out = recon;
  out.coeffs = scale_z * recon.coeffs.cwiseProduct(scale_b);
  out.pose.t = scale_z * Eigen::Vector2d(intrinsics.sx * recon.pose.t.x(), intrinsics.sy * recon.pose.t.y());
  return out;
}

}  // namespace shapestar
