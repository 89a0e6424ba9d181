#pragma once

#include <cmath>

namespace thermo {

// Scalars of the exponential temperature/power curve
//   P(T) = exp((T - a1) / a2) + a0
// a0 in watts, a1 and a2 in degrees Celsius.
struct ModelParams {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 1.0;

  bool operator==(const ModelParams&) const = default;
};

template <typename Scalar>
Scalar exponential_power(Scalar temp, Scalar a0, Scalar a1, Scalar a2) {
  using std::exp;
  return exp((temp - a1) / a2) + a0;
}

inline double exponential_power(double temp, const ModelParams& p) {
  return exponential_power(temp, p.a0, p.a1, p.a2);
}

}  // namespace thermo
