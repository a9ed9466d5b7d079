#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shapestar/certify.hpp"
#include "shapestar/model.hpp"

namespace shapestar {

struct SynthConfig {
  int K = 5;
  int N = 100;
  double noise_sigma = 0.01;
  int sparse_support = 0;  ///< number of nonzero coefficients, 0 = dense
  double outlier_rate = 0.0;
  std::uint64_t seed = 0;
  double alpha = 0.0;

  /// Throws InvalidArgument on inconsistent fields.
  void validate() const;
};

struct SynthInstance {
  DeformableModel model;
  Observation obs;
  Eigen::VectorXd c_gt;
  Eigen::Matrix3d R_gt = Eigen::Matrix3d::Identity();
  Eigen::Vector2d t_gt = Eigen::Vector2d::Zero();
  std::vector<bool> is_outlier;  ///< one label per landmark
};

/// Random bases N(0,1), coefficients U[0,1], Haar rotation, Gaussian noise and
/// outliers drawn uniformly in the disk that normalization maps to the unit
/// circle.
SynthInstance generate(const SynthConfig& cfg);

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  bool completed = false;
  std::string error;

  bool certified = false;
  int corank = 0;
  double eta = 0.0;
  double coeff_error = 0.0;
  double rot_error_deg = 0.0;
  double shape_error = 0.0;
  double sdp_time = 0.0;
  int gnc_iterations = 0;
  /// Outlier classification (weight < 0.5 flags an outlier); robust runs only.
  double precision = 1.0;
  double recall = 1.0;
};

struct Aggregate {
  std::string name;  ///< "mean" or "median"
  double corank = 0.0;
  double eta = 0.0;
  double coeff_error = 0.0;
  double rot_error_deg = 0.0;
  double sdp_time = 0.0;
  double gnc_iterations = 0.0;
};

struct BenchSettings {
  SolverSettings solver;
  /// GNC threshold in normalized units; <= 0 picks 5 * sigma * sqrt(2)
  /// mapped to normalized units (with a 1e-3 floor on sigma).
  double cbar = 0.0;
};

struct BenchResult {
  std::vector<TrialRecord> records;
  Aggregate mean;
  Aggregate median;
  int completed = 0;
};

/// Solves one instance and scores it against ground truth.
TrialRecord run_trial(const SynthConfig& cfg, bool robust, const BenchSettings& settings = {});

/// Trial i uses seed cfg.seed + i. Failed trials are recorded and excluded
/// from the aggregates.
BenchResult run_trials(const SynthConfig& cfg, bool robust, int trials,
                       const BenchSettings& settings = {});

/// Per-trial rows followed by the mean and median rows.
void write_csv(std::ostream& os, const BenchResult& result);

}  // namespace shapestar
