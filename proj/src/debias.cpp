#include "thermo/debias.hpp"

#include <algorithm>
#include <cmath>

#include "thermo/error.hpp"
#include "thermo/fitting.hpp"

namespace thermo {

namespace {

std::size_t expected_arity(DebiasKind kind) { return kind == DebiasKind::Linear ? 1 : 2; }

double spread_over_median(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const std::vector<double> copy(v.data(), v.data() + v.size());
  return (v.maxCoeff() - v.minCoeff()) / median(copy);
}

}  // namespace

std::string_view to_string(DebiasKind kind) {
  switch (kind) {
    case DebiasKind::Linear: return "linear";
    case DebiasKind::Quadratic: return "quad";
    case DebiasKind::Exponential: return "exp";
  }
  return "unknown";
}

std::optional<DebiasKind> parse_debias_kind(std::string_view text) {
  if (text == "linear" || text == "lin") return DebiasKind::Linear;
  if (text == "quad" || text == "quadratic") return DebiasKind::Quadratic;
  if (text == "exp" || text == "exponential") return DebiasKind::Exponential;
  return std::nullopt;
}

void validate(const DebiasSpec& spec) {
  if (spec.eta.size() != expected_arity(spec.kind)) {
    throw Error(ErrorCode::InvalidParams, std::string(to_string(spec.kind)) + " debias takes " +
                                              std::to_string(expected_arity(spec.kind)) + " coefficient(s)");
  }
  if (!std::isfinite(spec.ref_temp)) throw Error(ErrorCode::InvalidParams, "reference temperature must be finite");
  for (const double e : spec.eta) {
    if (!std::isfinite(e)) throw Error(ErrorCode::InvalidParams, "debias coefficients must be finite");
  }
  if (spec.kind == DebiasKind::Exponential && spec.eta[1] == 0.0) {
    throw Error(ErrorCode::InvalidParams, "exponential debias needs a2 != 0");
  }
}

double transform_power(const DebiasSpec& spec, double temp, double power) {
  const double tr = spec.ref_temp;
  const double dt = tr - temp;
  switch (spec.kind) {
    case DebiasKind::Linear: return power + spec.eta[0] * dt;
    case DebiasKind::Quadratic: return power + spec.eta[0] * (tr * tr - temp * temp) + spec.eta[1] * dt;
    case DebiasKind::Exponential: {
      const double a1 = spec.eta[0];
      const double a2 = spec.eta[1];
      return power + std::exp((tr - a1) / a2) - std::exp((temp - a1) / a2);
    }
  }
  return power;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyGroup, "median of an empty set");
  const auto n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

double metric_afl(const Eigen::Ref<const Eigen::VectorXd>& measured) {
  if (measured.size() == 0) throw Error(ErrorCode::EmptyGroup, "afl needs at least one sample");
  return 100.0 * spread_over_median(measured);
}

double metric_afl(const Trace& trace) { return metric_afl(trace.powers()); }

double metric_fl(const Eigen::Ref<const Eigen::VectorXd>& measured,
                 const Eigen::Ref<const Eigen::VectorXd>& transformed) {
  if (measured.size() != transformed.size() || measured.size() == 0) {
    throw Error(ErrorCode::LengthMismatch, "fl needs equal, non-empty measured and transformed series");
  }
  if (measured.maxCoeff() == measured.minCoeff()) {
    throw Error(ErrorCode::ZeroSpread, "measured power has no spread");
  }
  return spread_over_median(transformed) / spread_over_median(measured);
}

double metric_rat(const Eigen::Ref<const Eigen::VectorXd>& transformed) {
  if (transformed.size() == 0) throw Error(ErrorCode::EmptyGroup, "rat needs at least one sample");
  const std::vector<double> copy(transformed.data(), transformed.data() + transformed.size());
  const double med = median(copy);
  return (transformed.mean() - med) / med;
}

std::vector<std::string> reference_warnings(const Trace& trace, double ref_temp) {
  const Eigen::VectorXd temps = trace.temperatures();
  const double lo = temps.minCoeff();
  const double hi = temps.maxCoeff();
  std::vector<std::string> warnings;
  if (ref_temp < lo || ref_temp > hi) {
    warnings.push_back("reference temperature " + format_number(ref_temp) + " C lies outside the measured range [" +
                       format_number(lo) + ", " + format_number(hi) + "] C");
  } else if (hi > lo) {
    const double margin = 0.05 * (hi - lo);
    if (ref_temp < lo + margin || ref_temp > hi - margin) {
      warnings.push_back("reference temperature " + format_number(ref_temp) +
                         " C is close to an extremity of the measured range");
    }
  }
  return warnings;
}

DebiasedTrace debias(const Trace& trace, const DebiasSpec& spec) {
  validate(spec);
  std::vector<double> ref_power;
  ref_power.reserve(trace.size());
  for (const auto& s : trace.samples()) ref_power.push_back(transform_power(spec, s.temp, s.power));

  const Eigen::VectorXd measured = trace.powers();
  const Eigen::Map<const Eigen::VectorXd> transformed(ref_power.data(), static_cast<Eigen::Index>(ref_power.size()));

  DebiasMetrics metrics;
  metrics.afl = metric_afl(measured);
  if (measured.maxCoeff() != measured.minCoeff()) metrics.fl = metric_fl(measured, transformed);
  metrics.rat = metric_rat(transformed);

  auto warnings = reference_warnings(trace, spec.ref_temp);
  return DebiasedTrace{trace, spec, std::move(ref_power), metrics, std::move(warnings)};
}

DebiasSpec fit_eta(const Trace& trace, DebiasKind kind) {
  DebiasSpec spec;
  spec.kind = kind;
  switch (kind) {
    case DebiasKind::Linear: {
      const auto f = fit_linear(trace);
      spec.eta = {f.coeffs[0]};
      break;
    }
    case DebiasKind::Quadratic: {
      const auto f = fit_quadratic(trace);
      spec.eta = {f.coeffs[0], f.coeffs[1]};
      break;
    }
    case DebiasKind::Exponential: {
      const auto f = fit_exponential(trace);
      spec.eta = {f.coeffs[1], f.coeffs[2]};
      break;
    }
  }
  return spec;
}

std::string write_debiased_trace(const DebiasedTrace& result) {
  Table table;
  const auto& meta = result.source.meta();
  table.meta = {{"processor", meta.processor},
                {"freq_ghz", format_number(meta.freq_ghz)},
                {"cores", std::to_string(meta.cores)},
                {"ref_temp_c", format_number(result.spec.ref_temp)},
                {"debias_kind", std::string(to_string(result.spec.kind))}};
  table.columns = {"time_s", "temp_c", "power_w", "power_ref_w"};
  const auto& samples = result.source.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    table.rows.push_back({samples[i].time, samples[i].temp, samples[i].power, result.ref_power[i]});
  }
  return write_table(table);
}

}  // namespace thermo
