#include "thermo/power_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include <Eigen/Dense>

#include "thermo/error.hpp"

namespace thermo {

namespace {

void check_operating_point(double freq_ghz, int cores) {
  if (!std::isfinite(freq_ghz) || freq_ghz <= 0.0) {
    throw Error(ErrorCode::InvalidFreq, "frequency must be a positive number of GHz");
  }
  if (cores < 1 || cores > 4) {
    throw Error(ErrorCode::InvalidCores, "active core count must be within 1..4");
  }
}

// Least squares with a rank check; SingularFit when the columns are dependent.
Eigen::VectorXd solve_ls(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, const char* what) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < design.cols()) {
    throw Error(ErrorCode::SingularFit, std::string(what) + " regression is rank deficient");
  }
  return qr.solve(target);
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

void validate(const CoefficientSet& coeffs) {
  for (const double v : coeffs.m) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidModel, "coefficient set has a non-finite m value");
  }
  if (coeffs.m_at(4) == 0.0) throw Error(ErrorCode::InvalidModel, "m4 must be non-zero");
  if (!std::isfinite(coeffs.a2) || coeffs.a2 == 0.0) {
    throw Error(ErrorCode::InvalidModel, "a2 must be finite and non-zero");
  }
}

ModelParams derive_params(const CoefficientSet& coeffs, double freq_ghz, int cores) {
  check_operating_point(freq_ghz, cores);
  validate(coeffs);
  const double f = freq_ghz;
  const double c = static_cast<double>(cores);
  const double g_s = coeffs.m_at(1) + coeffs.m_at(2) * f + coeffs.m_at(3) * f * f;
  const double g_o = g_s / coeffs.m_at(4);
  ModelParams p;
  p.a0 = g_s * c + g_o;
  p.a1 = coeffs.m_at(5) * f + coeffs.m_at(6) + (5.0 - c) * coeffs.m_at(7);
  p.a2 = coeffs.a2;
  return p;
}

double evaluate_power(const CoefficientSet& coeffs, double temp, double freq_ghz, int cores) {
  return exponential_power(temp, derive_params(coeffs, freq_ghz, cores));
}

std::vector<CoefficientSet> builtin_sets() {
  return {
      CoefficientSet{"A7", {0.028, -0.093, 0.371, 2.202, -38.242, 187.668, 8.430}, 33.105},
      CoefficientSet{"A15", {0.220, -0.315, 0.467, 2.202, -56.652, 165.896, 8.430}, 33.105},
  };
}

std::optional<CoefficientSet> find_builtin(std::string_view label) {
  const auto wanted = lowercase(label);
  for (auto& set : builtin_sets()) {
    if (lowercase(set.label) == wanted) return set;
  }
  return std::nullopt;
}

Calibration calibrate(std::span<const Observation> observations, std::string label) {
  std::set<double> freqs;
  std::set<int> core_counts;
  for (const auto& o : observations) {
    check_operating_point(o.freq_ghz, o.cores);
    freqs.insert(o.freq_ghz);
    core_counts.insert(o.cores);
  }
  if (observations.size() < 8 || freqs.size() < 3 || core_counts.size() < 2) {
    throw Error(ErrorCode::InsufficientSpan,
                "calibration needs >= 8 observations over >= 3 frequencies and >= 2 core counts (got " +
                    std::to_string(observations.size()) + " over " + std::to_string(freqs.size()) +
                    " frequencies and " + std::to_string(core_counts.size()) + " core counts)");
  }

  const auto n = static_cast<Eigen::Index>(observations.size());
  Calibration out;
  out.coeffs.label = std::move(label);
  out.diagnostics.observations = observations.size();

  Eigen::VectorXd a2(n);
  for (Eigen::Index i = 0; i < n; ++i) a2[i] = observations[i].params.a2;
  out.coeffs.a2 = a2.mean();
  out.diagnostics.a2_stddev = std::sqrt((a2.array() - out.coeffs.a2).square().mean());

  Eigen::MatrixXd a1_design(n, 3);
  Eigen::VectorXd a1(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& o = observations[i];
    a1_design.row(i) << o.freq_ghz, 1.0, 5.0 - o.cores;
    a1[i] = o.params.a1;
  }
  const Eigen::VectorXd m567 = solve_ls(a1_design, a1, "a1");
  out.coeffs.m[4] = m567[0];
  out.coeffs.m[5] = m567[1];
  out.coeffs.m[6] = m567[2];
  out.diagnostics.a1_rms = std::sqrt((a1_design * m567 - a1).squaredNorm() / static_cast<double>(n));

  // Per-frequency affine fit of a0 against the core count.
  std::map<double, std::vector<const Observation*>> by_freq;
  for (const auto& o : observations) by_freq[o.freq_ghz].push_back(&o);

  std::vector<double> used_f;
  std::vector<double> slopes;
  std::vector<double> ratios;
  for (const auto& [f, group] : by_freq) {
    std::set<int> cs;
    for (const auto* o : group) cs.insert(o->cores);
    if (cs.size() < 2) continue;
    Eigen::MatrixXd design(static_cast<Eigen::Index>(group.size()), 2);
    Eigen::VectorXd a0(static_cast<Eigen::Index>(group.size()));
    for (std::size_t i = 0; i < group.size(); ++i) {
      design.row(static_cast<Eigen::Index>(i)) << static_cast<double>(group[i]->cores), 1.0;
      a0[static_cast<Eigen::Index>(i)] = group[i]->params.a0;
    }
    const Eigen::VectorXd gs_go = solve_ls(design, a0, "a0 vs core count");
    if (gs_go[1] == 0.0) throw Error(ErrorCode::SingularFit, "zero offset term g_o at a frequency");
    used_f.push_back(f);
    slopes.push_back(gs_go[0]);
    ratios.push_back(gs_go[0] / gs_go[1]);
  }
  if (used_f.size() < 3) {
    throw Error(ErrorCode::InsufficientSpan, "fewer than 3 frequencies have two distinct core counts");
  }
  out.diagnostics.frequencies_used = used_f.size();

  const auto nf = static_cast<Eigen::Index>(used_f.size());
  Eigen::MatrixXd gs_design(nf, 3);
  Eigen::VectorXd gs(nf);
  for (Eigen::Index i = 0; i < nf; ++i) {
    const double f = used_f[static_cast<std::size_t>(i)];
    gs_design.row(i) << 1.0, f, f * f;
    gs[i] = slopes[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd m123 = solve_ls(gs_design, gs, "g_s");
  out.coeffs.m[0] = m123[0];
  out.coeffs.m[1] = m123[1];
  out.coeffs.m[2] = m123[2];

  double ratio_sum = 0.0;
  for (const double r : ratios) ratio_sum += r;
  out.coeffs.m[3] = ratio_sum / static_cast<double>(ratios.size());
  const auto [rmin, rmax] = std::minmax_element(ratios.begin(), ratios.end());
  out.diagnostics.m4_spread = *rmax - *rmin;

  validate(out.coeffs);

  double sq = 0.0;
  double worst = 0.0;
  for (const auto& o : observations) {
    const double predicted = derive_params(out.coeffs, o.freq_ghz, o.cores).a0;
    const double diff = predicted - o.params.a0;
    sq += diff * diff;
    if (o.params.a0 != 0.0) worst = std::max(worst, std::abs(diff / o.params.a0));
  }
  out.diagnostics.a0_rms = std::sqrt(sq / static_cast<double>(n));
  out.diagnostics.a0_max_relative = worst;
  return out;
}

}  // namespace thermo
