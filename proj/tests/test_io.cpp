#include <cstdio>
#include <filesystem>
#include <functional>

#include "doctest.h"
#include "shapestar/io.hpp"
#include "support.hpp"

using namespace shapestar;
using namespace shapestar::testing;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("shapestar_io_" + name)).string();
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("model round trip") {
  std::mt19937_64 rng(1);
  const DeformableModel m = random_model(rng, 3, 7);
  const std::string path = temp_path("model.json");
  save_model(path, m);
  const DeformableModel back = load_model(path);
  REQUIRE(back.K() == 3);
  REQUIRE(back.N() == 7);
  for (int k = 0; k < 3; ++k) CHECK((back.bases[k] - m.bases[k]).cwiseAbs().maxCoeff() <= 1e-12);
  std::remove(path.c_str());
}

TEST_CASE("observation round trip and defaults") {
  std::mt19937_64 rng(2);
  const Observation o(random_points(rng, 6), random_coeffs(rng, 6), Intrinsics{2.0, 3.5});
  const std::string path = temp_path("obs.json");
  save_observation(path, o);
  const Observation back = load_observation(path);
  CHECK((back.landmarks - o.landmarks).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((back.weights - o.weights).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(back.intrinsics.sx == 2.0);
  CHECK(back.intrinsics.sy == 3.5);
  std::remove(path.c_str());

  const Observation plain = observation_from_json(R"({"landmarks": [[0,1],[1,0],[2,2],[3,1]], "camera": {"sx": 1, "sy": 1}})");
  CHECK(plain.weights.isOnes());
  CHECK(plain.N() == 4);
}

TEST_CASE("result round trip") {
  std::mt19937_64 rng(3);
  Reconstruction r;
  r.coeffs = random_coeffs(rng, 4);
  r.pose.R = random_rotation(rng);
  r.pose.t = Eigen::Vector2d(0.25, -1.5);
  r.f_lower = 0.123;
  r.f_upper = 0.124;
  r.eta = 1e-5;
  r.corank = 1;
  r.certified = true;
  r.weights = random_coeffs(rng, 9);
  r.gnc_iterations = 17;
  const std::string path = temp_path("result.json");
  save_result(path, r);
  const Reconstruction back = load_result(path);
  CHECK((back.coeffs - r.coeffs).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((back.pose.R - r.pose.R).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((back.pose.t - r.pose.t).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(back.f_lower == r.f_lower);
  CHECK(back.f_upper == r.f_upper);
  CHECK(back.eta == r.eta);
  CHECK(back.corank == 1);
  CHECK(back.certified);
  REQUIRE(back.weights.has_value());
  CHECK((*back.weights - *r.weights).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(back.gnc_iterations == 17);
  std::remove(path.c_str());

  // R is stored row-major.
  const std::string text = result_to_json(r);
  const Reconstruction parsed = result_from_json(text);
  CHECK(parsed.pose.R(0, 1) == r.pose.R(0, 1));
  CHECK(text.find("\"weights\"") != std::string::npos);
  r.weights.reset();
  CHECK(result_to_json(r).find("\"weights\"") == std::string::npos);
}

TEST_CASE("parse errors name the field") {
  const std::string bad_shape = message_of([] {
    model_from_json(R"({"k": 1, "n": 4, "bases": [[[0,0,1],[0,1],[1,0,0],[0,0,0]]]})", "m.json");
  });
  CHECK(bad_shape.find("m.json") != std::string::npos);
  CHECK(bad_shape.find("bases[0][1]") != std::string::npos);

  const std::string wrong_k = message_of([] {
    model_from_json(R"({"k": 2, "n": 4, "bases": [[[0,0,1],[0,1,0],[1,0,0],[0,0,0]]]})", "m.json");
  });
  CHECK(wrong_k.find("bases") != std::string::npos);

  CHECK(message_of([] { model_from_json(R"({"n": 4, "bases": []})"); }).find("k: missing") != std::string::npos);
  CHECK(message_of([] { observation_from_json(R"({"landmarks": [[0, "x"]]})"); }).find("landmarks[0][1]") !=
        std::string::npos);
  CHECK(message_of([] { observation_from_json(R"({"landmarks": [[0,0],[1,1],[2,2],[3,3]], "weights": [1]})"); })
            .find("weights") != std::string::npos);
  CHECK(message_of([] { observation_from_json("{not json"); }).find("<document>") != std::string::npos);
  CHECK(message_of([] { result_from_json(R"({"c": [0.5], "R": [1,0,0,0,1,0,0,0]})"); }).find("R:") !=
        std::string::npos);
  CHECK_THROWS_AS(load_model(temp_path("does_not_exist.json")), ParseError);
}
