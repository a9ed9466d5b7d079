#pragma once

#include <string>

#include "shapestar/model.hpp"

namespace shapestar {

// JSON file formats:
//   model        {"k": K, "n": N, "bases": [K][N][3]}
//   observation  {"landmarks": [N][2], "weights"?: [N], "camera": {"sx", "sy"}}
//   result       {"c", "R" (row-major, 9), "t", "gamma", "f_hat", "eta",
//                 "corank", "certified", "weights"?}
// Loading errors throw ParseError naming the source and the offending field.

std::string model_to_json(const DeformableModel& model);
DeformableModel model_from_json(const std::string& text, const std::string& source = "<model>");

std::string observation_to_json(const Observation& obs);
Observation observation_from_json(const std::string& text, const std::string& source = "<observation>");

std::string result_to_json(const Reconstruction& rec);
Reconstruction result_from_json(const std::string& text, const std::string& source = "<result>");

void save_model(const std::string& path, const DeformableModel& model);
DeformableModel load_model(const std::string& path);

void save_observation(const std::string& path, const Observation& obs);
Observation load_observation(const std::string& path);

void save_result(const std::string& path, const Reconstruction& rec);
Reconstruction load_result(const std::string& path);

}  // namespace shapestar
