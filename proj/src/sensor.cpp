#include "thermo/sensor.hpp"

#include <cmath>

namespace thermo {

void validate(const SensorModel& model) {
  const bool finite = std::isfinite(model.alpha) && std::isfinite(model.a) && std::isfinite(model.b) &&
                      std::isfinite(model.t_init) && std::isfinite(model.t_inf);
  if (!finite) throw Error(ErrorCode::InvalidModel, "sensor model parameters must be finite");
  if (!(model.alpha > 0.0) || !(model.a > 0.0) || !(model.b > 0.0)) {
    throw Error(ErrorCode::InvalidModel, "alpha, a and b must be positive");
  }
  if (model.t_init == model.t_inf) throw Error(ErrorCode::InvalidModel, "T_i and T_inf must differ");
}

std::vector<SeriesPoint> correct_series(const SensorModel& model, std::span<const SeriesPoint> sensor) {
  validate(model);
  std::vector<SeriesPoint> out;
  out.reserve(sensor.size());
  for (std::size_t i = 0; i < sensor.size(); ++i) {
    const auto& p = sensor[i];
    if (!(p.time > 0.0)) {
      throw Error(ErrorCode::InvalidTime, "sample " + std::to_string(i) + " has time <= 0", i);
    }
    if (i > 0 && !(p.time > sensor[i - 1].time)) {
      throw Error(ErrorCode::NonMonotonicTime, "sample " + std::to_string(i) + " does not advance time", i);
    }
    try {
      out.push_back({p.time, b_factor(model, p.time) * p.temp});
    } catch (const Error& e) {
      throw Error(e.code(), "sample " + std::to_string(i) + ": " + e.what(), i);
    }
  }
  return out;
}

std::vector<double> second_divided_differences(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "x and y differ in length");
  std::vector<double> out;
  if (x.size() < 3) return out;
  out.reserve(x.size() - 2);
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double left = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    const double right = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    out.push_back((right - left) / (x[i + 1] - x[i - 1]));
  }
  return out;
}

CurvatureSummary curvature(std::span<const double> x, std::span<const double> y) {
  CurvatureSummary s;
  for (const double d : second_divided_differences(x, y)) {
    ++s.interior;
    if (d > 0.0) ++s.positive;
    if (d < 0.0) ++s.negative;
  }
  return s;
}

Trace simulate_distant_sensor(const SensorModel& model, const ModelParams& power, const DistantSensorScenario& scenario,
                              const TraceMeta& meta) {
  validate(model);
  if (!(scenario.duration_s > 0.0) || !(scenario.rate_hz > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "scenario duration and rate must be positive");
  }
  const auto count = static_cast<std::size_t>(std::llround(scenario.duration_s * scenario.rate_hz));
  if (count < Trace::kMinSamples) throw Error(ErrorCode::InvalidParams, "scenario yields fewer than 3 samples");

  std::vector<TraceSample> samples;
  samples.reserve(count);
  const double slope = (scenario.sensor_end_c - scenario.sensor_start_c) / scenario.duration_s;
  for (std::size_t k = 1; k <= count; ++k) {
    const double t = static_cast<double>(k) / scenario.rate_hz;
    const double sensor = scenario.sensor_start_c + slope * t;
    const double hotspot = b_factor(model, t) * sensor;
    samples.push_back({t, sensor, exponential_power(hotspot, power)});
  }
  return Trace(meta, std::move(samples));
}

}  // namespace thermo
