#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "thermo/trace.hpp"

namespace thermo {

enum class DebiasKind { Linear, Quadratic, Exponential };

std::string_view to_string(DebiasKind kind);
std::optional<DebiasKind> parse_debias_kind(std::string_view text);

/// Coefficients of the power transformation to a reference temperature.
///   Linear:      eta = (eta1)
///   Quadratic:   eta = (eta2, eta1)
///   Exponential: eta = (a1, a2) of the exponential curve; a0 cancels.
/// The constant term never enters the transform.
struct DebiasSpec {
  DebiasKind kind = DebiasKind::Linear;
  std::vector<double> eta;
  double ref_temp = 0.0;
};

void validate(const DebiasSpec& spec);

struct DebiasMetrics {
  double afl = 0.0;           // percent
  std::optional<double> fl;   // empty when the measured power has no spread
  double rat = 0.0;
};

struct DebiasedTrace {
  Trace source;
  DebiasSpec spec;
  std::vector<double> ref_power;
  DebiasMetrics metrics;
  std::vector<std::string> warnings;
};

/// Power sample P_m at T_m mapped to the reference temperature T_r:
///   Linear       P_r = P_m + eta1 (T_r - T_m)
///   Quadratic    P_r = P_m + eta2 (T_r^2 - T_m^2) + eta1 (T_r - T_m)
///   Exponential  P_r = P_m + exp((T_r - a1)/a2) - exp((T_m - a1)/a2)
double transform_power(const DebiasSpec& spec, double temp, double power);

DebiasedTrace debias(const Trace& trace, const DebiasSpec& spec);

/// Fits the transformation coefficients on the trace itself; ref_temp is
/// left for the caller.
DebiasSpec fit_eta(const Trace& trace, DebiasKind kind);

double median(std::vector<double> values);

double metric_afl(const Eigen::Ref<const Eigen::VectorXd>& measured);
double metric_afl(const Trace& trace);
double metric_fl(const Eigen::Ref<const Eigen::VectorXd>& measured, const Eigen::Ref<const Eigen::VectorXd>& transformed);
double metric_rat(const Eigen::Ref<const Eigen::VectorXd>& transformed);

/// Advice strings for a reference temperature relative to the trace's range.
std::vector<std::string> reference_warnings(const Trace& trace, double ref_temp);

/// Trace CSV with an extra power_ref_w column and #ref_temp_c / #debias_kind
/// header lines.
std::string write_debiased_trace(const DebiasedTrace& result);

}  // namespace thermo
