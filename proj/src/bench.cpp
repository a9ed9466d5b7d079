#include "shapestar/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <Eigen/Geometry>

#include "shapestar/robust.hpp"

namespace shapestar {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Picks the statistic f over completed records.
template <class F>
std::vector<double> column(const std::vector<TrialRecord>& recs, F f) {
  std::vector<double> out;
  for (const auto& r : recs) {
    if (r.completed) out.push_back(static_cast<double>(f(r)));
  }
  return out;
}

Aggregate aggregate(const std::vector<TrialRecord>& recs, const std::string& name,
                    double (*stat)(std::vector<double>)) {
  Aggregate a;
  a.name = name;
  a.corank = stat(column(recs, [](const TrialRecord& r) { return r.corank; }));
  a.eta = stat(column(recs, [](const TrialRecord& r) { return r.eta; }));
  a.coeff_error = stat(column(recs, [](const TrialRecord& r) { return r.coeff_error; }));
  a.rot_error_deg = stat(column(recs, [](const TrialRecord& r) { return r.rot_error_deg; }));
  a.sdp_time = stat(column(recs, [](const TrialRecord& r) { return r.sdp_time; }));
  a.gnc_iterations = stat(column(recs, [](const TrialRecord& r) { return r.gnc_iterations; }));
  return a;
}

double mean_by_value(std::vector<double> v) { return mean(v); }

}  // namespace

void SynthConfig::validate() const {
  if (K < 1) throw InvalidArgument("SynthConfig: K must be at least 1");
  if (N < 4) throw InvalidArgument("SynthConfig: N must be at least 4");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("SynthConfig: noise_sigma must be nonnegative");
  if (sparse_support < 0 || sparse_support > K) {
    throw InvalidArgument("SynthConfig: sparse_support must lie in [0, K]");
  }
  if (!(outlier_rate >= 0.0 && outlier_rate < 1.0)) {
    throw InvalidArgument("SynthConfig: outlier_rate must lie in [0, 1)");
  }
  if (!(alpha >= 0.0)) throw InvalidArgument("SynthConfig: alpha must be nonnegative");
}

SynthInstance generate(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<Eigen::Matrix3Xd> bases(cfg.K, Eigen::Matrix3Xd(3, cfg.N));
  for (auto& b : bases) {
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = normal(rng);
  }

  SynthInstance inst;
  inst.c_gt = Eigen::VectorXd::Zero(cfg.K);
  if (cfg.sparse_support == 0) {
    for (int k = 0; k < cfg.K; ++k) inst.c_gt[k] = unif(rng);
  } else {
    std::vector<int> idx(cfg.K);
    for (int k = 0; k < cfg.K; ++k) idx[k] = k;
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int j = 0; j < cfg.sparse_support; ++j) inst.c_gt[idx[j]] = unif(rng);
  }

  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  inst.R_gt = q.toRotationMatrix();

  inst.model = DeformableModel(std::move(bases));
  Eigen::Matrix2Xd z = (inst.R_gt * inst.model.shape(inst.c_gt)).topRows<2>();
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] += cfg.noise_sigma * normal(rng);

  inst.is_outlier.assign(cfg.N, false);
  const int n_out = static_cast<int>(std::lround(cfg.outlier_rate * cfg.N));
  if (n_out > 0) {
    const double radius = std::max(1.0, z.colwise().norm().maxCoeff());
    std::vector<int> idx(cfg.N);
    for (int i = 0; i < cfg.N; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int j = 0; j < n_out; ++j) {
      const double rho = radius * std::sqrt(unif(rng));
      const double phi = 2.0 * std::numbers::pi * unif(rng);
      z.col(idx[j]) = rho * Eigen::Vector2d(std::cos(phi), std::sin(phi));
      inst.is_outlier[idx[j]] = true;
    }
  }
  inst.obs = Observation(std::move(z));
  return inst;
}

TrialRecord run_trial(const SynthConfig& cfg, bool robust, const BenchSettings& settings) {
  TrialRecord rec;
  rec.seed = cfg.seed;
  try {
    const SynthInstance inst = generate(cfg);
    Reconstruction out;
    if (robust) {
      GncSettings gnc;
      gnc.alpha = cfg.alpha;
      gnc.solver = settings.solver;
      gnc.cbar = settings.cbar;
      if (!(gnc.cbar > 0.0)) {
        const double scale_z = std::max(1.0, inst.obs.landmarks.colwise().norm().maxCoeff());
        gnc.cbar = 5.0 * std::sqrt(2.0) * std::max(cfg.noise_sigma, 1e-3) / scale_z;
      }
      out = shape_sharp(inst.model, inst.obs, gnc);
      int tp = 0, fp = 0, fn = 0;
      for (int i = 0; i < cfg.N; ++i) {
        const bool flagged = (*out.weights)[i] < 0.5;
        tp += flagged && inst.is_outlier[i];
        fp += flagged && !inst.is_outlier[i];
        fn += !flagged && inst.is_outlier[i];
      }
      rec.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 1.0;
      rec.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 1.0;
    } else {
      out = shape_star(inst.model, inst.obs, cfg.alpha, settings.solver);
    }
    rec.certified = out.certified;
    rec.corank = out.corank;
    rec.eta = out.eta;
    rec.coeff_error = coeff_error(out.coeffs, inst.c_gt);
    rec.rot_error_deg = geodesic_rotation_error(out.pose.R, inst.R_gt);
    rec.shape_error = shape_error(inst.model, out.coeffs, inst.c_gt);
    rec.sdp_time = out.sdp_time;
    rec.gnc_iterations = out.gnc_iterations;
    rec.completed = true;
    rec.error = out.diagnostics;
  } catch (const std::exception& e) {
    rec.completed = false;
    rec.error = e.what();
  }
  return rec;
}

BenchResult run_trials(const SynthConfig& cfg, bool robust, int trials, const BenchSettings& settings) {
  if (trials < 1) throw InvalidArgument("run_trials: trials must be at least 1");
  cfg.validate();
  BenchResult res;
  for (int i = 0; i < trials; ++i) {
    SynthConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(i);
    TrialRecord r = run_trial(c, robust, settings);
    r.trial = i;
    res.completed += r.completed;
    res.records.push_back(std::move(r));
  }
  res.mean = aggregate(res.records, "mean", mean_by_value);
  res.median = aggregate(res.records, "median", median);
  return res;
}

void write_csv(std::ostream& os, const BenchResult& result) {
  os << "row,seed,completed,certified,corank,eta,coeff_error,rot_error_deg,shape_error,sdp_time,"
        "gnc_iterations,precision,recall,note\n";
  os.precision(10);
  for (const auto& r : result.records) {
    std::string note = r.error;
    std::replace(note.begin(), note.end(), ',', ';');
    std::replace(note.begin(), note.end(), '\n', ' ');
    os << r.trial << ',' << r.seed << ',' << r.completed << ',' << r.certified << ',' << r.corank
       << ',' << r.eta << ',' << r.coeff_error << ',' << r.rot_error_deg << ',' << r.shape_error
       << ',' << r.sdp_time << ',' << r.gnc_iterations << ',' << r.precision << ',' << r.recall
       << ',' << note << '\n';
  }
  for (const Aggregate* a : {&result.mean, &result.median}) {
    os << a->name << ",,,," << a->corank << ',' << a->eta << ',' << a->coeff_error << ','
       << a->rot_error_deg << ",," << a->sdp_time << ',' << a->gnc_iterations << ",,,\n";
  }
}

}  // namespace shapestar
