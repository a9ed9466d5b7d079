#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shapestar/bench.hpp"
#include "shapestar/certify.hpp"
#include "shapestar/io.hpp"
#include "shapestar/robust.hpp"

namespace py = pybind11;
using namespace shapestar;

namespace {

DeformableModel make_model(const std::vector<Eigen::Matrix3Xd>& bases) { return DeformableModel(bases); }

Observation make_obs(const Eigen::Matrix2Xd& z, const std::optional<Eigen::VectorXd>& w, double sx,
                     double sy) {
  return Observation(z, w ? *w : Eigen::VectorXd(), Intrinsics{sx, sy});
}

SolverSettings solver_settings(const std::string& variant, double sdp_tol, int sdp_max_iter) {
  SolverSettings s;
  s.variant = parse_variant(variant);
  s.sdp.tol = sdp_tol;
  s.sdp.max_iter = sdp_max_iter;
  return s;
}

}  // namespace

PYBIND11_MODULE(_shapestar, m) {
  m.doc() = "Certifiable shape reconstruction from 2D landmarks";

  py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError");

  py::class_<DeformableModel>(m, "DeformableModel")
      .def(py::init(&make_model), py::arg("bases"))
      .def_property_readonly("K", &DeformableModel::K)
      .def_property_readonly("N", &DeformableModel::N)
      .def_readonly("bases", &DeformableModel::bases)
      .def("shape", &DeformableModel::shape, py::arg("coeffs"));

  py::class_<Observation>(m, "Observation")
      .def(py::init(&make_obs), py::arg("landmarks"), py::arg("weights") = py::none(),
           py::arg("sx") = 1.0, py::arg("sy") = 1.0)
      .def_property_readonly("N", &Observation::N)
      .def_readonly("landmarks", &Observation::landmarks)
      .def_readonly("weights", &Observation::weights);

  py::class_<Reconstruction>(m, "Reconstruction")
      .def_readonly("coeffs", &Reconstruction::coeffs)
      .def_property_readonly("R", [](const Reconstruction& r) { return r.pose.R; })
      .def_property_readonly("t", [](const Reconstruction& r) { return r.pose.t; })
      .def_readonly("gamma", &Reconstruction::f_lower)
      .def_readonly("f_hat", &Reconstruction::f_upper)
      .def_readonly("eta", &Reconstruction::eta)
      .def_readonly("corank", &Reconstruction::corank)
      .def_readonly("certified", &Reconstruction::certified)
      .def_readonly("weights", &Reconstruction::weights)
      .def_property_readonly("sdp_status", [](const Reconstruction& r) { return to_string(r.sdp_status); })
      .def_readonly("sdp_time", &Reconstruction::sdp_time)
      .def_readonly("gnc_iterations", &Reconstruction::gnc_iterations)
      .def_readonly("diagnostics", &Reconstruction::diagnostics)
      .def("to_json", &result_to_json);

  m.def(
      "shape_star",
      [](const DeformableModel& model, const Observation& obs, double alpha, const std::string& variant,
         double sdp_tol, int sdp_max_iter) {
        py::gil_scoped_release release;
        return shape_star(model, obs, alpha, solver_settings(variant, sdp_tol, sdp_max_iter));
      },
      py::arg("model"), py::arg("obs"), py::arg("alpha") = 0.0, py::arg("variant") = "reduced",
      py::arg("sdp_tol") = 1e-8, py::arg("sdp_max_iter") = 100);

  m.def(
      "shape_sharp",
      [](const DeformableModel& model, const Observation& obs, double cbar, double alpha,
         const std::string& variant, int max_iter) {
        GncSettings s;
        s.cbar = cbar;
        s.alpha = alpha;
        s.max_iter = max_iter;
        s.solver = solver_settings(variant, 1e-8, 100);
        py::gil_scoped_release release;
        return shape_sharp(model, obs, s);
      },
      py::arg("model"), py::arg("obs"), py::arg("cbar"), py::arg("alpha") = 0.0,
      py::arg("variant") = "reduced", py::arg("max_iter") = 100);

  m.def("weight_update", &weight_update, py::arg("r"), py::arg("mu"), py::arg("cbar"));
  m.def("gnc_surrogate", &gnc_surrogate, py::arg("r"), py::arg("mu"), py::arg("cbar"));
  m.def("geodesic_rotation_error", &geodesic_rotation_error);

  m.def(
      "generate",
      [](int K, int N, double noise, double outlier_rate, std::uint64_t seed, int sparse) {
        SynthConfig cfg;
        cfg.K = K;
        cfg.N = N;
        cfg.noise_sigma = noise;
        cfg.outlier_rate = outlier_rate;
        cfg.seed = seed;
        cfg.sparse_support = sparse;
        SynthInstance inst = generate(cfg);
        py::dict d;
        d["model"] = inst.model;
        d["obs"] = inst.obs;
        d["c"] = inst.c_gt;
        d["R"] = inst.R_gt;
        d["is_outlier"] = inst.is_outlier;
        return d;
      },
      py::arg("K"), py::arg("N"), py::arg("noise") = 0.01, py::arg("outlier_rate") = 0.0,
      py::arg("seed") = 0, py::arg("sparse") = 0);

  m.def("load_model", &load_model);
  m.def("save_model", &save_model);
  m.def("load_observation", &load_observation);
  m.def("save_observation", &save_observation);
}
