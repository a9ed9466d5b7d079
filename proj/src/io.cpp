#include "shapestar/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace shapestar {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& field, const std::string& what) {
  throw ParseError(source + ": " + field + ": " + what);
}

const json& member(const json& obj, const std::string& key, const std::string& source,
                   const std::string& prefix = "") {
  const std::string field = prefix.empty() ? key : prefix + "." + key;
  if (!obj.is_object()) fail(source, prefix.empty() ? "<root>" : prefix, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(source, field, "missing field");
  return *it;
}

double number(const json& j, const std::string& source, const std::string& field) {
  if (!j.is_number()) fail(source, field, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& source, const std::string& field) {
  if (!j.is_number_integer()) fail(source, field, "expected an integer");
  return j.get<int>();
}

const json& array(const json& j, const std::string& source, const std::string& field,
                  std::size_t expected) {
  if (!j.is_array()) fail(source, field, "expected an array");
  if (j.size() != expected) {
    fail(source, field, "expected " + std::to_string(expected) + " entries, got " + std::to_string(j.size()));
  }
  return j;
}

Eigen::VectorXd vector(const json& j, const std::string& source, const std::string& field,
                       std::size_t expected) {
  array(j, source, field, expected);
  Eigen::VectorXd v(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) {
    v[static_cast<Eigen::Index>(i)] = number(j[i], source, field + "[" + std::to_string(i) + "]");
  }
  return v;
}

json parse(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(source, "<document>", e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot open file for writing");
  out << text << '\n';
  if (!out) throw Error(path + ": write failed");
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string model_to_json(const DeformableModel& model) {
  json bases = json::array();
  for (const auto& b : model.bases) {
    json pts = json::array();
    for (int i = 0; i < b.cols(); ++i) pts.push_back({b(0, i), b(1, i), b(2, i)});
    bases.push_back(std::move(pts));
  }
  return json{{"k", model.K()}, {"n", model.N()}, {"bases", std::move(bases)}}.dump(1);
}

DeformableModel model_from_json(const std::string& text, const std::string& source) {
  const json j = parse(text, source);
  const int K = integer(member(j, "k", source), source, "k");
  const int N = integer(member(j, "n", source), source, "n");
  if (K < 1) fail(source, "k", "must be at least 1");
  if (N < 1) fail(source, "n", "must be at least 1");
  const json& jb = array(member(j, "bases", source), source, "bases", static_cast<std::size_t>(K));
  std::vector<Eigen::Matrix3Xd> bases;
  for (int k = 0; k < K; ++k) {
    const std::string fk = "bases[" + std::to_string(k) + "]";
    const json& pts = array(jb[k], source, fk, static_cast<std::size_t>(N));
    Eigen::Matrix3Xd b(3, N);
    for (int i = 0; i < N; ++i) {
      b.col(i) = vector(pts[i], source, fk + "[" + std::to_string(i) + "]", 3);
    }
    bases.push_back(std::move(b));
  }
  try {
    return DeformableModel(std::move(bases));
  } catch (const InvalidArgument& e) {
    fail(source, "bases", e.what());
  }
}

std::string observation_to_json(const Observation& obs) {
  json lm = json::array();
  for (int i = 0; i < obs.N(); ++i) lm.push_back({obs.landmarks(0, i), obs.landmarks(1, i)});
  return json{{"landmarks", std::move(lm)},
              {"weights", to_std(obs.weights)},
              {"camera", {{"sx", obs.intrinsics.sx}, {"sy", obs.intrinsics.sy}}}}
      .dump(1);
}

Observation observation_from_json(const std::string& text, const std::string& source) {
  const json j = parse(text, source);
  const json& jl = member(j, "landmarks", source);
  if (!jl.is_array()) fail(source, "landmarks", "expected an array");
  const auto N = jl.size();
  Eigen::Matrix2Xd z(2, static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i) {
    z.col(static_cast<Eigen::Index>(i)) = vector(jl[i], source, "landmarks[" + std::to_string(i) + "]", 2);
  }
  Intrinsics cam;
  if (const auto it = j.find("camera"); it != j.end()) {
    cam.sx = number(member(*it, "sx", source, "camera"), source, "camera.sx");
    cam.sy = number(member(*it, "sy", source, "camera"), source, "camera.sy");
  }
  Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(N));
  if (const auto it = j.find("weights"); it != j.end() && !it->is_null()) {
    w = vector(*it, source, "weights", N);
  }
  try {
    return Observation(std::move(z), std::move(w), cam);
  } catch (const InvalidArgument& e) {
    fail(source, "landmarks", e.what());
  }
}

std::string result_to_json(const Reconstruction& rec) {
  const Eigen::Matrix3d& R = rec.pose.R;
  std::vector<double> r_rows;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r_rows.push_back(R(i, j));
  }
  json j{{"c", to_std(rec.coeffs)},
         {"R", r_rows},
         {"t", {rec.pose.t.x(), rec.pose.t.y()}},
         {"gamma", rec.f_lower},
         {"f_hat", rec.f_upper},
         {"eta", rec.eta},
         {"corank", rec.corank},
         {"certified", rec.certified},
         {"sdp_status", to_string(rec.sdp_status)},
         {"sdp_time", rec.sdp_time},
         {"gnc_iterations", rec.gnc_iterations},
         {"diagnostics", rec.diagnostics}};
  if (rec.weights) j["weights"] = to_std(*rec.weights);
  return j.dump(1);
}

Reconstruction result_from_json(const std::string& text, const std::string& source) {
  const json j = parse(text, source);
  Reconstruction rec;
  const json& jc = member(j, "c", source);
  if (!jc.is_array()) fail(source, "c", "expected an array");
  rec.coeffs = vector(jc, source, "c", jc.size());
  const Eigen::VectorXd r = vector(member(j, "R", source), source, "R", 9);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) rec.pose.R(i, k) = r[3 * i + k];
  }
  rec.pose.t = vector(member(j, "t", source), source, "t", 2);
  rec.f_lower = number(member(j, "gamma", source), source, "gamma");
  rec.f_upper = number(member(j, "f_hat", source), source, "f_hat");
  rec.eta = number(member(j, "eta", source), source, "eta");
  rec.corank = integer(member(j, "corank", source), source, "corank");
  const json& cert = member(j, "certified", source);
  if (!cert.is_boolean()) fail(source, "certified", "expected a boolean");
  rec.certified = cert.get<bool>();
  if (const auto it = j.find("weights"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) fail(source, "weights", "expected an array");
    rec.weights = vector(*it, source, "weights", it->size());
  }
  if (const auto it = j.find("sdp_status"); it != j.end()) {
    const std::string s = it->is_string() ? it->get<std::string>() : "";
    bool known = false;
    for (auto st : {SdpStatus::Optimal, SdpStatus::Inaccurate, SdpStatus::Infeasible, SdpStatus::IterLimit}) {
      if (to_string(st) == s) {
        rec.sdp_status = st;
        known = true;
      }
    }
    if (!known) fail(source, "sdp_status", "unknown status");
  }
  if (const auto it = j.find("sdp_time"); it != j.end()) rec.sdp_time = number(*it, source, "sdp_time");
  if (const auto it = j.find("gnc_iterations"); it != j.end()) {
    rec.gnc_iterations = integer(*it, source, "gnc_iterations");
  }
  if (const auto it = j.find("diagnostics"); it != j.end()) {
    if (!it->is_string()) fail(source, "diagnostics", "expected a string");
    rec.diagnostics = it->get<std::string>();
  }
  return rec;
}

void save_model(const std::string& path, const DeformableModel& model) {
  write_file(path, model_to_json(model));
}
DeformableModel load_model(const std::string& path) { return model_from_json(read_file(path), path); }

void save_observation(const std::string& path, const Observation& obs) {
  write_file(path, observation_to_json(obs));
}
Observation load_observation(const std::string& path) {
  return observation_from_json(read_file(path), path);
}

void save_result(const std::string& path, const Reconstruction& rec) {
  write_file(path, result_to_json(rec));
}
Reconstruction load_result(const std::string& path) { return result_from_json(read_file(path), path); }

}  // namespace shapestar
