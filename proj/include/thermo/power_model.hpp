#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thermo/curve.hpp"

namespace thermo {

/// Scalars of the generalized frequency/core-count power model:
///
///   g_s = m1 + m2 f + m3 f^2
///   g_o = g_s / m4
///   a0  = g_s c + g_o
///   a1  = m5 f + m6 + (5 - c) m7
///   a2  = constant
///
/// f in GHz, c the active core count (1..4).
struct CoefficientSet {
  std::string label;
  std::array<double, 7> m{};  // m1..m7
  double a2 = 33.105;

  double m_at(int index) const { return m[static_cast<std::size_t>(index - 1)]; }

  bool operator==(const CoefficientSet&) const = default;
};

void validate(const CoefficientSet& coeffs);

ModelParams derive_params(const CoefficientSet& coeffs, double freq_ghz, int cores);

/// Watts at temperature `temp` (Celsius) for the given operating point.
double evaluate_power(const CoefficientSet& coeffs, double temp, double freq_ghz, int cores);

/// The A7 and A15 sets, in that order.
std::vector<CoefficientSet> builtin_sets();

/// Case-insensitive lookup of a built-in set by label.
std::optional<CoefficientSet> find_builtin(std::string_view label);

struct Observation {
  double freq_ghz = 0.0;
  int cores = 0;
  ModelParams params;
};

struct CalibrationDiagnostics {
  std::size_t observations = 0;
  std::size_t frequencies_used = 0;
  double a1_rms = 0.0;            // degrees C
  double a0_rms = 0.0;            // watts
  double a0_max_relative = 0.0;   // max |a0_model - a0| / |a0|
  double a2_stddev = 0.0;         // degrees C
  double m4_spread = 0.0;         // max - min of per-frequency g_s / g_o
};

struct Calibration {
  CoefficientSet coeffs;
  CalibrationDiagnostics diagnostics;
};

/// Estimates a CoefficientSet from per-trace exponential fits.
///
/// a2 is the mean observed a2. (m5, m6, m7) come from ordinary least squares
/// of a1 on (f, 1, 5 - c). For a0, each frequency with at least two distinct
/// core counts gets an affine fit a0 = g_s c + g_o; g_s(f) is then fit
/// quadratically for (m1, m2, m3) and m4 is the mean of g_s / g_o.
///
/// Requires >= 8 observations spanning >= 3 frequencies (each usable for the
/// affine step) and >= 2 core counts.
Calibration calibrate(std::span<const Observation> observations, std::string label = "calibrated");

}  // namespace thermo
