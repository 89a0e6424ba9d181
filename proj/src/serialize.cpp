#include "thermo/serialize.hpp"

#include "thermo/error.hpp"

namespace thermo {

namespace {

double number_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorCode::InvalidModel, std::string("missing numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

}  // namespace

Json to_json(const FitResult& fit) {
  Json j;
  j["kind"] = std::string(to_string(fit.kind));
  Json coeffs = Json::array();
  for (Eigen::Index i = 0; i < fit.coeffs.size(); ++i) coeffs.push_back(fit.coeffs[i]);
  j["coeffs"] = std::move(coeffs);
  j["error"] = fit.error;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  return j;
}

Json to_json(const ModelParams& params) {
  return Json{{"a0", params.a0}, {"a1", params.a1}, {"a2", params.a2}};
}

Json to_json(const CoefficientSet& coeffs) {
  Json j;
  j["label"] = coeffs.label;
  j["m"] = Json::array();
  for (const double m : coeffs.m) j["m"].push_back(m);
  j["a2"] = coeffs.a2;
  return j;
}

CoefficientSet coefficient_set_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidModel, "coefficient set must be a JSON object");
  CoefficientSet set;
  if (j.contains("label") && j.at("label").is_string()) set.label = j.at("label").get<std::string>();
  if (!j.contains("m") || !j.at("m").is_array() || j.at("m").size() != 7) {
    throw Error(ErrorCode::InvalidModel, "field 'm' must be an array of 7 numbers");
  }
  for (std::size_t i = 0; i < 7; ++i) {
    const auto& v = j.at("m").at(i);
    if (!v.is_number()) throw Error(ErrorCode::InvalidModel, "field 'm' must hold numbers");
    set.m[i] = v.get<double>();
  }
  set.a2 = number_field(j, "a2");
  validate(set);
  return set;
}

Json to_json(const SensorModel& model) {
  return Json{{"alpha", model.alpha}, {"a", model.a}, {"b", model.b}, {"t_init_c", model.t_init},
              {"t_inf_c", model.t_inf}};
}

SensorModel sensor_model_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidModel, "sensor model must be a JSON object");
  SensorModel m;
  m.alpha = number_field(j, "alpha");
  m.a = number_field(j, "a");
  m.b = number_field(j, "b");
  m.t_init = number_field(j, "t_init_c");
  m.t_inf = number_field(j, "t_inf_c");
  validate(m);
  return m;
}

}  // namespace thermo
