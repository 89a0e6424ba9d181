#pragma once

#include <json.hpp>

#include "thermo/fitting.hpp"
#include "thermo/power_model.hpp"
#include "thermo/sensor.hpp"

namespace thermo {

using Json = nlohmann::ordered_json;

Json to_json(const FitResult& fit);
Json to_json(const ModelParams& params);

// {label, m: [m1..m7], a2}
Json to_json(const CoefficientSet& coeffs);
CoefficientSet coefficient_set_from_json(const Json& j);

// {alpha, a, b, t_init_c, t_inf_c}
Json to_json(const SensorModel& model);
SensorModel sensor_model_from_json(const Json& j);

}  // namespace thermo
