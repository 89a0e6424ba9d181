#include "thermo/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "thermo/error.hpp"

namespace thermo {

namespace {

std::size_t distinct_count(const VectorRef& values) {
  std::vector<double> v(values.data(), values.data() + values.size());
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

void require_same_length(const VectorRef& a, const VectorRef& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "temperature and power series differ in length (" +
                                               std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

void require_nonzero(const VectorRef& measured) {
  for (Eigen::Index i = 0; i < measured.size(); ++i) {
    if (measured[i] == 0.0) {
      throw Error(ErrorCode::ZeroMeasurement, "measured value " + std::to_string(i) + " is zero",
                  static_cast<std::size_t>(i));
    }
  }
}

// Minimizes sum(((X c - y) / y)^2) for a polynomial design in T.
// Returns coefficients highest degree first.
Eigen::VectorXd relative_polyfit(const VectorRef& temps, const VectorRef& powers, int degree) {
  const Eigen::Index n = temps.size();
  Eigen::MatrixXd design(n, degree + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    double t_pow = 1.0;
    for (int d = degree; d >= 0; --d) {
      design(i, d) = t_pow / powers[i];
      t_pow *= temps[i];
    }
  }
  const Eigen::VectorXd target = Eigen::VectorXd::Ones(n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < degree + 1) {
    throw Error(ErrorCode::DegenerateInput, "design matrix is rank deficient");
  }
  return qr.solve(target);
}

FitResult closed_form(FitKind kind, const VectorRef& temps, const VectorRef& powers, int degree) {
  require_same_length(temps, powers);
  require_nonzero(powers);
  const auto needed = static_cast<std::size_t>(degree + 1);
  if (distinct_count(temps) < needed) {
    throw Error(ErrorCode::DegenerateInput, std::string(to_string(kind)) + " fit needs at least " +
                                                std::to_string(needed) + " distinct temperatures");
  }
  FitResult result;
  result.kind = kind;
  result.coeffs = relative_polyfit(temps, powers, degree);
  result.error = fit_error(powers, evaluate(result, temps));
  result.iterations = 0;
  result.converged = true;
  return result;
}

struct ExpState {
  Eigen::Vector3d params;  // a0, a1, a2
  Eigen::VectorXd residuals;
  double objective = 0.0;
};

bool evaluate_state(const VectorRef& temps, const VectorRef& powers, const Eigen::Vector3d& params,
                    ExpState& state) {
  if (!params.allFinite() || params[2] == 0.0) return false;
  state.params = params;
  state.residuals.resize(temps.size());
  for (Eigen::Index i = 0; i < temps.size(); ++i) {
    const double model = exponential_power(temps[i], params[0], params[1], params[2]);
    state.residuals[i] = (model - powers[i]) / powers[i];
  }
  state.objective = state.residuals.squaredNorm();
  return std::isfinite(state.objective);
}

Eigen::MatrixXd exp_jacobian(const VectorRef& temps, const VectorRef& powers, const Eigen::Vector3d& p) {
  Eigen::MatrixXd jac(temps.size(), 3);
  for (Eigen::Index i = 0; i < temps.size(); ++i) {
    const double shifted = temps[i] - p[1];
    const double e = std::exp(shifted / p[2]);
    jac(i, 0) = 1.0 / powers[i];
    jac(i, 1) = -e / (p[2] * powers[i]);
    jac(i, 2) = -e * shifted / (p[2] * p[2] * powers[i]);
  }
  return jac;
}

double binomial_half_pmf(std::size_t n, std::size_t k) {
  // Symmetric index so pmf(k) and pmf(n - k) are bit-identical.
  const std::size_t j = std::min(k, n - k);
  const double nn = static_cast<double>(n);
  const double jj = static_cast<double>(j);
  return std::exp(std::lgamma(nn + 1.0) - std::lgamma(jj + 1.0) - std::lgamma(nn - jj + 1.0) -
                  nn * std::numbers::ln2);
}

}  // namespace

std::string_view to_string(FitKind kind) {
  switch (kind) {
    case FitKind::Linear: return "linear";
    case FitKind::Quadratic: return "quad";
    case FitKind::Exponential: return "exp";
  }
  return "unknown";
}

std::optional<FitKind> parse_fit_kind(std::string_view text) {
  if (text == "linear" || text == "lin") return FitKind::Linear;
  if (text == "quad" || text == "quadratic") return FitKind::Quadratic;
  if (text == "exp" || text == "exponential") return FitKind::Exponential;
  return std::nullopt;
}

double evaluate(const FitResult& fit, double temp) {
  const auto& c = fit.coeffs;
  switch (fit.kind) {
    case FitKind::Linear: return c[0] * temp + c[1];
    case FitKind::Quadratic: return (c[0] * temp + c[1]) * temp + c[2];
    case FitKind::Exponential: return exponential_power(temp, c[0], c[1], c[2]);
  }
  return 0.0;
}

Eigen::VectorXd evaluate(const FitResult& fit, const VectorRef& temps) {
  Eigen::VectorXd out(temps.size());
  for (Eigen::Index i = 0; i < temps.size(); ++i) out[i] = evaluate(fit, temps[i]);
  return out;
}

Eigen::VectorXd relative_residuals(const VectorRef& measured, const VectorRef& model) {
  if (measured.size() != model.size()) {
    throw Error(ErrorCode::LengthMismatch, "measured and model series differ in length");
  }
  if (measured.size() == 0) {
    throw Error(ErrorCode::LengthMismatch, "error metric needs at least one value");
  }
  require_nonzero(measured);
  return ((model - measured).array() / measured.array()).matrix();
}

double fit_error(const VectorRef& measured, const VectorRef& model) {
  return relative_residuals(measured, model).norm();
}

FitResult fit_linear(const VectorRef& temps, const VectorRef& powers) {
  return closed_form(FitKind::Linear, temps, powers, 1);
}

FitResult fit_quadratic(const VectorRef& temps, const VectorRef& powers) {
  return closed_form(FitKind::Quadratic, temps, powers, 2);
}

FitResult fit_exponential(const VectorRef& temps, const VectorRef& powers) {
  return fit_exponential(temps, powers, ExponentialFitOptions{});
}

FitResult fit_exponential(const VectorRef& temps, const VectorRef& powers, const ExponentialFitOptions& options) {
  require_same_length(temps, powers);
  const Eigen::Index n = temps.size();
  if (n < 3 || distinct_count(temps) < 3) {
    throw Error(ErrorCode::DegenerateInput, "exponential fit needs at least 3 distinct temperatures");
  }
  if ((powers.array() <= 0.0).any()) {
    throw Error(ErrorCode::DegenerateInput, "exponential fit needs strictly positive powers");
  }
  const double p_min = powers.minCoeff();
  if (p_min == powers.maxCoeff()) {
    throw Error(ErrorCode::DegenerateInput, "constant power leaves the exponential scale unidentifiable");
  }

  // Log-linearize above a floor just under the smallest sample.
  const double a0_init = 0.95 * p_min;
  const Eigen::ArrayXd lifted = powers.array() - a0_init;
  if ((lifted <= 0.0).any()) {
    throw Error(ErrorCode::InitFailure, "power minus the initial floor is not positive");
  }
  Eigen::MatrixXd line(n, 2);
  line.col(0) = temps;
  line.col(1).setOnes();
  const Eigen::Vector2d slope_icpt = line.colPivHouseholderQr().solve(lifted.log().matrix());
  if (!(std::abs(slope_icpt[0]) > 0.0) || !slope_icpt.allFinite()) {
    throw Error(ErrorCode::DegenerateInput, "log-linear initialization has zero slope");
  }
  const double a2_init = 1.0 / slope_icpt[0];
  const Eigen::Vector3d start(a0_init, -slope_icpt[1] * a2_init, a2_init);

  ExpState state;
  if (!evaluate_state(temps, powers, start, state)) {
    throw Error(ErrorCode::InitFailure, "initial exponential parameters overflow");
  }

  double damping = options.initial_damping;
  double last_step = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iteration = 0;
  Eigen::MatrixXd jac = exp_jacobian(temps, powers, state.params);

  while (iteration < options.max_iterations && !converged) {
    ++iteration;
    if (state.objective == 0.0) {
      converged = true;
      break;
    }
    const Eigen::Matrix3d normal = jac.transpose() * jac;
    const Eigen::Vector3d gradient = jac.transpose() * state.residuals;
    Eigen::Matrix3d damped = normal;
    for (int k = 0; k < 3; ++k) {
      damped(k, k) += damping * std::max(normal(k, k), std::numeric_limits<double>::min());
    }
    const Eigen::Vector3d step = damped.ldlt().solve(-gradient);

    ExpState trial;
    const bool ok = step.allFinite() && evaluate_state(temps, powers, state.params + step, trial);
    if (ok && trial.objective < state.objective) {
      const double relative_decrease = (state.objective - trial.objective) / state.objective;
      last_step = step.norm() / std::max(state.params.norm(), std::numeric_limits<double>::min());
      state = std::move(trial);
      jac = exp_jacobian(temps, powers, state.params);
      damping = std::max(damping / options.damping_factor, 1e-15);
      if (relative_decrease < options.objective_tolerance || last_step < options.step_tolerance) {
        converged = true;
      }
    } else {
      damping *= options.damping_factor;
      // No damping level yields a decrease: the objective is stationary.
      if (damping > 1e20) converged = true;
    }
  }

  if (!converged && last_step > options.failure_step) {
    throw Error(ErrorCode::NoConvergence, "exponential fit did not converge in " +
                                              std::to_string(options.max_iterations) + " iterations");
  }

  FitResult result;
  result.kind = FitKind::Exponential;
  result.coeffs = state.params;
  result.error = fit_error(powers, evaluate(result, temps));
  result.iterations = iteration;
  result.converged = converged;
  return result;
}

FitResult fit(FitKind kind, const VectorRef& temps, const VectorRef& powers) {
  switch (kind) {
    case FitKind::Linear: return fit_linear(temps, powers);
    case FitKind::Quadratic: return fit_quadratic(temps, powers);
    case FitKind::Exponential: return fit_exponential(temps, powers);
  }
  throw Error(ErrorCode::InvalidParams, "unknown fit kind");
}

FitResult fit_linear(const Trace& trace) { return fit_linear(trace.temperatures(), trace.powers()); }
FitResult fit_quadratic(const Trace& trace) { return fit_quadratic(trace.temperatures(), trace.powers()); }
FitResult fit_exponential(const Trace& trace) { return fit_exponential(trace.temperatures(), trace.powers()); }
FitResult fit(FitKind kind, const Trace& trace) { return fit(kind, trace.temperatures(), trace.powers()); }

double aggregate_error(std::span<const TraceFit> group) {
  if (group.empty()) throw Error(ErrorCode::EmptyGroup, "cannot aggregate an empty group");
  double sum = 0.0;
  for (const auto& item : group) {
    const Eigen::VectorXd temps = item.trace->temperatures();
    const Eigen::VectorXd measured = item.trace->powers();
    sum += relative_residuals(measured, evaluate(*item.fit, temps)).squaredNorm();
  }
  return std::sqrt(sum);
}

SignTestResult sign_test_detailed(std::span<const double> errors_a, std::span<const double> errors_b) {
  if (errors_a.size() != errors_b.size()) {
    throw Error(ErrorCode::LengthMismatch, "sign test needs paired error lists of equal length");
  }
  if (errors_a.empty()) throw Error(ErrorCode::LengthMismatch, "sign test needs at least one pair");

  SignTestResult r;
  for (std::size_t i = 0; i < errors_a.size(); ++i) {
    if (errors_a[i] < errors_b[i]) {
      ++r.a_wins;
    } else if (errors_b[i] < errors_a[i]) {
      ++r.b_wins;
    } else {
      ++r.ties;
    }
  }
  const std::size_t n = r.a_wins + r.b_wins;
  if (n == 0) throw Error(ErrorCode::AllTies, "every pair is tied");

  const std::size_t k = r.a_wins;
  // Both tails are summed outward-in so swapping a and b swaps the sums exactly.
  double lower = 0.0;
  for (std::size_t i = 0; i <= k; ++i) lower += binomial_half_pmf(n, i);
  double upper = 0.0;
  for (std::size_t i = n + 1; i-- > k;) upper += binomial_half_pmf(n, i);
  r.p_value = std::min(1.0, 2.0 * std::min(lower, upper));
  return r;
}

double sign_test(std::span<const double> errors_a, std::span<const double> errors_b) {
  return sign_test_detailed(errors_a, errors_b).p_value;
}

const FamilyOutcome& TraceComparison::outcome(FitKind kind) const {
  switch (kind) {
    case FitKind::Linear: return linear;
    case FitKind::Quadratic: return quadratic;
    case FitKind::Exponential: break;
  }
  return exponential;
}

std::optional<double> ComparisonReport::aggregate(FitKind kind) const {
  switch (kind) {
    case FitKind::Linear: return aggregate_linear;
    case FitKind::Quadratic: return aggregate_quadratic;
    case FitKind::Exponential: break;
  }
  return aggregate_exponential;
}

namespace {

FamilyOutcome try_fit(FitKind kind, const Trace& trace) {
  FamilyOutcome out;
  try {
    out.fit = fit(kind, trace);
  } catch (const Error& e) {
    out.failure = std::string(to_string(e.code()));
  }
  return out;
}

std::optional<double> family_aggregate(std::span<const Trace> traces, const std::vector<TraceComparison>& rows,
                                       FitKind kind) {
  std::vector<TraceFit> group;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& outcome = rows[i].outcome(kind);
    if (outcome.fit) group.push_back({&traces[i], &*outcome.fit});
  }
  if (group.empty()) return std::nullopt;
  return aggregate_error(group);
}

PairwiseTest pairwise(const std::vector<TraceComparison>& rows, FitKind a, FitKind b) {
  PairwiseTest test;
  test.a = a;
  test.b = b;
  std::vector<double> ea;
  std::vector<double> eb;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& oa = rows[i].outcome(a);
    const auto& ob = rows[i].outcome(b);
    if (!oa.fit || !ob.fit) {
      test.excluded.push_back(i);
      continue;
    }
    ea.push_back(oa.fit->error);
    eb.push_back(ob.fit->error);
  }
  if (ea.empty()) {
    test.note = "no trace has both fits";
    return test;
  }
  try {
    test.result = sign_test_detailed(ea, eb);
  } catch (const Error& e) {
    test.note = std::string(to_string(e.code()));
  }
  return test;
}

}  // namespace

TraceComparison compare_trace(const Trace& trace) {
  TraceComparison row;
  row.linear = try_fit(FitKind::Linear, trace);
  row.quadratic = try_fit(FitKind::Quadratic, trace);
  row.exponential = try_fit(FitKind::Exponential, trace);
  return row;
}

ComparisonReport summarize_comparison(std::span<const Trace> traces, std::vector<TraceComparison> rows) {
  if (traces.size() != rows.size()) {
    throw Error(ErrorCode::LengthMismatch, "one comparison row is needed per trace");
  }
  ComparisonReport report;
  report.aggregate_linear = family_aggregate(traces, rows, FitKind::Linear);
  report.aggregate_quadratic = family_aggregate(traces, rows, FitKind::Quadratic);
  report.aggregate_exponential = family_aggregate(traces, rows, FitKind::Exponential);
  report.exp_vs_quad = pairwise(rows, FitKind::Exponential, FitKind::Quadratic);
  report.quad_vs_lin = pairwise(rows, FitKind::Quadratic, FitKind::Linear);
  report.exp_vs_lin = pairwise(rows, FitKind::Exponential, FitKind::Linear);
  report.traces = std::move(rows);
  return report;
}

ComparisonReport compare_models(std::span<const Trace> traces) {
  if (traces.empty()) throw Error(ErrorCode::EmptyGroup, "model comparison needs at least one trace");
  std::vector<TraceComparison> rows;
  rows.reserve(traces.size());
  for (const auto& t : traces) rows.push_back(compare_trace(t));
  return summarize_comparison(traces, std::move(rows));
}

}  // namespace thermo
