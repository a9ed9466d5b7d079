#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "shapestar/bench.hpp"
#include "shapestar/certify.hpp"
#include "shapestar/io.hpp"
#include "shapestar/robust.hpp"

using namespace shapestar;

namespace {

struct SolverOpts {
  std::string variant = "reduced";
  double sdp_tol = 1e-8;
  int sdp_max_iter = 100;

  SolverSettings settings() const {
    SolverSettings s;
    s.variant = parse_variant(variant);
    s.sdp.tol = sdp_tol;
    s.sdp.max_iter = sdp_max_iter;
    return s;
  }
};

void add_solver_opts(CLI::App* app, SolverOpts& o) {
  app->add_option("--variant", o.variant, "relaxation basis: full | reduced")
      ->check(CLI::IsMember({"full", "reduced"}));
  app->add_option("--sdp-tol", o.sdp_tol, "interior-point tolerance");
  app->add_option("--sdp-max-iter", o.sdp_max_iter, "interior-point iteration cap");
}

void write_truth(const std::string& path, const SynthInstance& inst) {
  std::vector<double> c(inst.c_gt.data(), inst.c_gt.data() + inst.c_gt.size());
  std::vector<double> R;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) R.push_back(inst.R_gt(i, j));
  }
  std::vector<int> outliers;
  for (std::size_t i = 0; i < inst.is_outlier.size(); ++i) {
    if (inst.is_outlier[i]) outliers.push_back(static_cast<int>(i));
  }
  nlohmann::json j{{"c", c}, {"R", R}, {"t", {inst.t_gt.x(), inst.t_gt.y()}}, {"outliers", outliers}};
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot open file for writing");
  out << j.dump(1) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certifiable shape reconstruction from 2D landmarks"};
  app.require_subcommand(1);

  SynthConfig syn;
  std::string syn_model, syn_obs, syn_truth;
  auto* synth = app.add_subcommand("synth", "write a random instance");
  synth->add_option("--K", syn.K, "number of basis shapes");
  synth->add_option("--N", syn.N, "number of landmarks");
  synth->add_option("--noise", syn.noise_sigma, "image noise standard deviation");
  synth->add_option("--sparse", syn.sparse_support, "nonzero coefficients (0 = dense)");
  synth->add_option("--outliers", syn.outlier_rate, "outlier fraction in [0, 1)");
  synth->add_option("--seed", syn.seed, "random seed");
  synth->add_option("--model", syn_model, "model JSON to write")->required();
  synth->add_option("--obs", syn_obs, "observation JSON to write")->required();
  synth->add_option("--truth", syn_truth, "ground-truth JSON to write");

  std::string rc_model, rc_obs, rc_out;
  double rc_alpha = 0.0;
  double rc_cbar = 0.0;
  bool rc_robust = false;
  bool rc_require = false;
  SolverOpts rc_solver;
  auto* reconstruct = app.add_subcommand("reconstruct", "solve one instance");
  reconstruct->add_option("--model", rc_model, "model JSON")->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--obs", rc_obs, "observation JSON")->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--alpha", rc_alpha, "Lasso weight (normalized problem)");
  reconstruct->add_flag("--robust", rc_robust, "graduated non-convexity over truncated least squares");
  reconstruct->add_option("--cbar", rc_cbar,
                          "TLS threshold in normalized residual units (required with --robust)");
  reconstruct->add_option("--out", rc_out, "result JSON (stdout if omitted)");
  reconstruct->add_flag("--require-cert", rc_require, "exit with status 2 unless certified");
  add_solver_opts(reconstruct, rc_solver);

  SynthConfig bc;
  int b_trials = 20;
  bool b_robust = false;
  double b_cbar = 0.0;
  std::string b_csv;
  SolverOpts b_solver;
  auto* bench = app.add_subcommand("bench", "Monte Carlo trials on random instances");
  bench->add_option("--K", bc.K, "number of basis shapes");
  bench->add_option("--N", bc.N, "number of landmarks");
  bench->add_option("--noise", bc.noise_sigma, "image noise standard deviation");
  bench->add_option("--sparse", bc.sparse_support, "nonzero coefficients (0 = dense)");
  bench->add_option("--outliers", bc.outlier_rate, "outlier fraction in [0, 1)");
  bench->add_option("--alpha", bc.alpha, "Lasso weight (normalized problem)");
  bench->add_option("--trials", b_trials, "number of trials")->check(CLI::PositiveNumber);
  bench->add_flag("--robust", b_robust, "use the GNC solver");
  bench->add_option("--cbar", b_cbar, "TLS threshold (default 5*sqrt(2)*noise, normalized)");
  bench->add_option("--seed", bc.seed, "seed of the first trial");
  bench->add_option("--csv", b_csv, "CSV output (stdout if omitted)");
  add_solver_opts(bench, b_solver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*synth) {
      const SynthInstance inst = generate(syn);
      save_model(syn_model, inst.model);
      save_observation(syn_obs, inst.obs);
      if (!syn_truth.empty()) write_truth(syn_truth, inst);
      return 0;
    }

    if (*reconstruct) {
      const DeformableModel model = load_model(rc_model);
      const Observation obs = load_observation(rc_obs);
      Reconstruction rec;
      if (rc_robust) {
        if (!(rc_cbar > 0.0)) throw InvalidArgument("--robust needs a positive --cbar");
        GncSettings gnc;
        gnc.cbar = rc_cbar;
        gnc.alpha = rc_alpha;
        gnc.solver = rc_solver.settings();
        rec = shape_sharp(model, obs, gnc);
      } else {
        rec = shape_star(model, obs, rc_alpha, rc_solver.settings());
      }
      if (rc_out.empty()) {
        std::cout << result_to_json(rec) << '\n';
      } else {
        save_result(rc_out, rec);
      }
      if (!rec.diagnostics.empty()) std::cerr << "note: " << rec.diagnostics << '\n';
      if (rc_require && !rec.certified) {
        std::cerr << "not certified (corank " << rec.corank << ", eta " << rec.eta << ")\n";
        return 2;
      }
      return 0;
    }

    if (*bench) {
      BenchSettings bs;
      bs.solver = b_solver.settings();
      bs.cbar = b_cbar;
      const BenchResult res = run_trials(bc, b_robust, b_trials, bs);
      if (b_csv.empty()) {
        write_csv(std::cout, res);
      } else {
        std::ofstream out(b_csv);
        if (!out) throw Error(b_csv + ": cannot open file for writing");
        write_csv(out, res);
      }
      std::cerr << res.completed << "/" << b_trials << " trials completed; mean eta " << res.mean.eta
                << ", mean rotation error " << res.mean.rot_error_deg << " deg\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
