#pragma once

#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "shapestar/bench.hpp"
#include "shapestar/model.hpp"
#include "shapestar/preprocess.hpp"

namespace shapestar::testing {

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::Quaterniond q(nd(rng), nd(rng), nd(rng), nd(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline DeformableModel random_model(std::mt19937_64& rng, int K, int N, double scale = 1.0) {
  std::normal_distribution<double> nd;
  std::vector<Eigen::Matrix3Xd> bases(K, Eigen::Matrix3Xd(3, N));
  for (auto& b : bases) {
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = scale * nd(rng);
  }
  return DeformableModel(std::move(bases));
}

inline Eigen::VectorXd random_coeffs(std::mt19937_64& rng, int K) {
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  Eigen::VectorXd c(K);
  for (int k = 0; k < K; ++k) c[k] = ud(rng);
  return c;
}

inline Eigen::Matrix2Xd random_points(std::mt19937_64& rng, int N, double scale = 1.0) {
  std::normal_distribution<double> nd;
  Eigen::Matrix2Xd z(2, N);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = scale * nd(rng);
  return z;
}

/// Column-major vec(R).
inline Eigen::VectorXd vec(const Eigen::Matrix3d& R) {
  return Eigen::Map<const Eigen::VectorXd>(R.data(), 9);
}

inline Eigen::VectorXd stack(const Eigen::VectorXd& c, const Eigen::Matrix3d& R) {
  Eigen::VectorXd x(c.size() + 9);
  x << c, vec(R);
  return x;
}

// True when the generator's coefficients stay inside the unit bound after
// normalization, i.e. the ground truth is feasible for the relaxation.
inline bool truth_feasible(const SynthInstance& inst) {
  const auto [m, o] = normalize(inst.model, inst.obs);
  return (inst.c_gt.cwiseQuotient(m.scale_b) / o.scale_z).maxCoeff() <= 1.0;
}

// First instance at or after cfg.seed whose ground truth is feasible.
inline SynthInstance feasible_instance(SynthConfig cfg) {
  for (;; ++cfg.seed) {
    SynthInstance inst = generate(cfg);
    if (truth_feasible(inst)) return inst;
  }
}

}  // namespace shapestar::testing
