#include "shapestar/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shapestar/preprocess.hpp"

namespace shapestar {

namespace {

void check_gnc_params(double mu, double cbar) {
  if (!(mu > 0.0)) throw InvalidArgument("mu must be positive");
  if (!(cbar > 0.0)) throw InvalidArgument("cbar must be positive");
}

void append(std::string& diag, const std::string& msg) {
  diag += (diag.empty() ? "" : "; ") + msg;
}

}  // namespace

TlsCost::TlsCost(double c) : cbar(c) {
  if (!(cbar > 0.0)) throw InvalidArgument("TlsCost: cbar must be positive");
}

double TlsCost::operator()(double r) const { return std::min(r * r, cbar * cbar); }

Eigen::VectorXd residuals(const DeformableModel& model, const Observation& obs,
                          const Eigen::VectorXd& coeffs, const Eigen::Matrix3d& R,
                          const Eigen::Vector2d& t) {
  if (model.N() != obs.N()) throw InvalidArgument("residuals: model and observation disagree on N");
  Eigen::Matrix<double, 2, 3> P = Eigen::Matrix<double, 2, 3>::Zero();
  P(0, 0) = obs.intrinsics.sx;
  P(1, 1) = obs.intrinsics.sy;
  const Eigen::Matrix2Xd proj = (P * R * model.shape(coeffs)).colwise() + t;
  return (obs.landmarks - proj).colwise().norm().transpose();
}

double gnc_surrogate(double r, double mu, double cbar) {
  check_gnc_params(mu, cbar);
  const double r2 = r * r;
  const double c2 = cbar * cbar;
  if (r2 <= mu / (mu + 1.0) * c2) return r2;
  if (r2 >= (mu + 1.0) / mu * c2) return c2;
  return 2.0 * cbar * std::abs(r) * std::sqrt(mu * (mu + 1.0)) - mu * (c2 + r2);
}

double outlier_process(double w, double mu, double cbar) {
  check_gnc_params(mu, cbar);
  return mu * (1.0 - w) / (mu + w) * cbar * cbar;
}

double weight_update(double r, double mu, double cbar) {
  check_gnc_params(mu, cbar);
  if (!(r >= 0.0)) throw InvalidArgument("weight_update: residual must be nonnegative");
  const double r2 = r * r;
  const double c2 = cbar * cbar;
  if (r2 <= mu / (mu + 1.0) * c2) return 1.0;
  if (r2 >= (mu + 1.0) / mu * c2) return 0.0;
  const double w = cbar / r * std::sqrt(mu * (mu + 1.0)) - mu;
  return std::clamp(w, 0.0, 1.0);
}

double gnc_objective(const Eigen::VectorXd& res, const Eigen::VectorXd& weights, double mu,
                     double cbar, double alpha, const Eigen::VectorXd& coeffs) {
  if (res.size() != weights.size()) throw InvalidArgument("gnc_objective: length mismatch");
  double f = 0.0;
  for (Eigen::Index i = 0; i < res.size(); ++i) {
    f += weights[i] * res[i] * res[i] + outlier_process(weights[i], mu, cbar);
  }
  return f + alpha * coeffs.sum();
}

Reconstruction shape_sharp(const DeformableModel& model, const Observation& obs,
                           const GncSettings& settings, GncState* state) {
  check_gnc_params(settings.mu0, settings.cbar);
  if (!(settings.mu_factor > 1.0)) throw InvalidArgument("shape_sharp: mu_factor must exceed 1");
  if (settings.max_iter < 1) throw InvalidArgument("shape_sharp: max_iter must be positive");

  const auto [nmodel, nobs] = normalize(model, obs);
  const int N = nobs.N();

  GncState st;
  st.mu = settings.mu0;
  st.cbar = settings.cbar;
  st.weights = Eigen::VectorXd::Ones(N);

  Reconstruction best;
  bool have_best = false;
  bool converged = false;
  std::string failure;
  double sdp_time = 0.0;
  int sdp_iterations = 0;
  double prev = std::numeric_limits<double>::quiet_NaN();

  for (st.tau = 0; st.tau < settings.max_iter; ++st.tau) {
    Observation weighted = nobs;
    weighted.weights = nobs.weights.cwiseProduct(st.weights);

    Reconstruction rec;
    try {
      const CenteredProblem prob =
          eliminate_translation(nmodel, weighted, settings.alpha, settings.drop_below);
      rec = solve_centered(prob, settings.solver);
    } catch (const Error& e) {
      failure = "gnc iteration " + std::to_string(st.tau) + ": " + e.what();
      break;
    }
    sdp_time += rec.sdp_time;
    sdp_iterations += rec.sdp_iterations;
    if (rec.sdp_status == SdpStatus::Infeasible) {
      failure = "gnc iteration " + std::to_string(st.tau) + ": sdp infeasible";
      break;
    }

    const Eigen::VectorXd r = residuals(nmodel, nobs, rec.coeffs, rec.pose.R, rec.pose.t);
    for (int i = 0; i < N; ++i) st.weights[i] = weight_update(r[i], st.mu, st.cbar);
    const double f = gnc_objective(r, st.weights, st.mu, st.cbar, settings.alpha, rec.coeffs);
    st.objective_history.push_back(f);
    best = std::move(rec);
    best.weights = st.weights;
    have_best = true;

    if (std::abs(f - prev) < settings.conv_tol) {
      converged = true;
      ++st.tau;
      break;
    }
    prev = f;
    st.mu *= settings.mu_factor;
  }

  if (!have_best) {
    best.coeffs = Eigen::VectorXd::Zero(nmodel.K());
    best.weights = st.weights;
  }
  best.sdp_time = sdp_time;
  best.sdp_iterations = sdp_iterations;
  best.gnc_iterations = st.tau;
  if (!failure.empty()) {
    best.certified = false;
    append(best.diagnostics, failure);
  } else if (!converged) {
    append(best.diagnostics, "gnc: " + to_string(SdpStatus::IterLimit));
  }
  if (state) *state = st;
  return denormalize(best, nobs.scale_z, nmodel.scale_b, obs.intrinsics);
}

}  // namespace shapestar
