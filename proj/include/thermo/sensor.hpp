#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "thermo/curve.hpp"
#include "thermo/error.hpp"
#include "thermo/trace.hpp"

namespace thermo {

/// Gauss error function. Kummer's positive series below |x| = 2, the erfc
/// continued fraction (modified Lentz) above; odd symmetry is imposed.
template <typename Scalar>
Scalar erf(Scalar x) {
  using std::abs;
  using std::exp;
  if (x < Scalar(0)) return -erf(-x);
  if (x == Scalar(0)) return Scalar(0);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar inv_sqrt_pi = std::numbers::inv_sqrtpi_v<Scalar>;
  const Scalar x2 = x * x;

  if (x < Scalar(2)) {
    // erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (2n+1)!!
    Scalar term = x;
    Scalar sum = x;
    for (int n = 1; n < 200; ++n) {
      term *= Scalar(2) * x2 / Scalar(2 * n + 1);
      sum += term;
      if (term < eps * sum) break;
    }
    return Scalar(2) * inv_sqrt_pi * exp(-x2) * sum;
  }
  if (x >= Scalar(6)) return Scalar(1);  // erfc(6) < 3e-17

  // erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
  const Scalar tiny = std::numeric_limits<Scalar>::min() / eps;
  Scalar f = x;
  Scalar c = x;
  Scalar d = Scalar(0);
  for (int k = 1; k < 500; ++k) {
    const Scalar a = Scalar(k) / Scalar(2);
    d = x + a * d;
    if (abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (abs(c) < tiny) c = tiny;
    d = Scalar(1) / d;
    const Scalar delta = c * d;
    f *= delta;
    if (abs(delta - Scalar(1)) < eps) break;
  }
  return Scalar(1) - exp(-x2) * inv_sqrt_pi / f;
}

/// Parameters of the distant-sensor step-response correction. Temperatures
/// are used on whatever scale the caller supplies (Celsius throughout this
/// tool); alpha, a and b are fit constants sharing one unit system.
struct SensorModel {
  double alpha = 4.125e-7;  // thermal diffusivity
  double a = 8.25;          // sensor distance
  double b = 36.7;          // hotspot time constant, seconds
  double t_init = 0.0;      // T_i
  double t_inf = 0.0;       // T_inf
};

void validate(const SensorModel& model);

/// B(t) = [(T_inf - T_i)(1 - exp(-t/b)) + T_i] / [(T_inf - T_i) erf(a / sqrt(4 alpha t)) + T_i]
///
/// Tends to T_i/T_inf as t -> 0+ and to T_inf/T_i as t -> inf. t must be
/// positive; a vanishing denominator raises ZeroDenominator.
template <typename Scalar>
Scalar b_factor(const SensorModel& model, Scalar t) {
  using std::abs;
  using std::exp;
  using std::sqrt;
  if (!(t > Scalar(0)) || !std::isfinite(static_cast<double>(t))) {
    throw Error(ErrorCode::InvalidTime, "B(t) is defined for t > 0 only");
  }
  const Scalar ti = model.t_init;
  const Scalar tf = model.t_inf;
  const Scalar gap = tf - ti;
  const Scalar numerator = gap * (Scalar(1) - exp(-t / Scalar(model.b))) + ti;
  const Scalar denominator = gap * erf(Scalar(model.a) / sqrt(Scalar(4) * Scalar(model.alpha) * t)) + ti;
  const Scalar scale = std::max({abs(ti), abs(tf), std::numeric_limits<Scalar>::min()});
  if (abs(denominator) <= Scalar(1e-12) * scale) {
    throw Error(ErrorCode::ZeroDenominator, "B(t) denominator vanishes");
  }
  return numerator / denominator;
}

struct SeriesPoint {
  double time = 0.0;
  double temp = 0.0;

  bool operator==(const SeriesPoint&) const = default;
};

/// T_cpu(t_i) = B(t_i) * T_sensor(t_i). Times must be positive and strictly
/// increasing; errors carry the offending index.
std::vector<SeriesPoint> correct_series(const SensorModel& model, std::span<const SeriesPoint> sensor);

/// Second divided differences of y over x at each interior point.
std::vector<double> second_divided_differences(std::span<const double> x, std::span<const double> y);

struct CurvatureSummary {
  std::size_t interior = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;

  double convex_fraction() const { return interior ? double(positive) / double(interior) : 0.0; }
  double concave_fraction() const { return interior ? double(negative) / double(interior) : 0.0; }
};

CurvatureSummary curvature(std::span<const double> x, std::span<const double> y);

/// Distant sensor sweeping linearly from sensor_start_c to sensor_end_c over
/// duration_s, sampled at rate_hz starting one period after t = 0. The
/// hotspot reads B(t) times the sensor and power follows the exponential
/// curve in hotspot temperature. The returned trace carries the sensor
/// temperature in its temp column.
struct DistantSensorScenario {
  double sensor_start_c = 25.0;
  double sensor_end_c = 50.0;
  double duration_s = 30.0;
  double rate_hz = 5.0;
};

Trace simulate_distant_sensor(const SensorModel& model, const ModelParams& power, const DistantSensorScenario& scenario,
                              const TraceMeta& meta);

}  // namespace thermo
