#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "thermo/trace.hpp"

namespace thermo {

enum class FitKind { Linear, Quadratic, Exponential };

std::string_view to_string(FitKind kind);
std::optional<FitKind> parse_fit_kind(std::string_view text);

/// Fitted temperature/power curve.
///
/// Coefficient order follows the curve's conventional notation:
///   Linear       (a1, a0)       P = a1 T + a0
///   Quadratic    (a2, a1, a0)   P = a2 T^2 + a1 T + a0
///   Exponential  (a0, a1, a2)   P = exp((T - a1) / a2) + a0
struct FitResult {
  FitKind kind = FitKind::Linear;
  Eigen::VectorXd coeffs;
  double error = 0.0;  // sqrt(sum(((model - measured) / measured)^2))
  int iterations = 0;  // 0 for closed-form fits
  bool converged = true;
};

using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// Evaluates the fitted curve at each temperature.
Eigen::VectorXd evaluate(const FitResult& fit, const VectorRef& temps);
double evaluate(const FitResult& fit, double temp);

double fit_error(const VectorRef& measured, const VectorRef& model);

/// Relative residuals (model - measured) / measured.
Eigen::VectorXd relative_residuals(const VectorRef& measured, const VectorRef& model);

// All fits minimize the sum of squared relative residuals, so the returned
// `error` is the minimized objective's square root.
FitResult fit_linear(const VectorRef& temps, const VectorRef& powers);
FitResult fit_quadratic(const VectorRef& temps, const VectorRef& powers);
FitResult fit_exponential(const VectorRef& temps, const VectorRef& powers);
FitResult fit(FitKind kind, const VectorRef& temps, const VectorRef& powers);

FitResult fit_linear(const Trace& trace);
FitResult fit_quadratic(const Trace& trace);
FitResult fit_exponential(const Trace& trace);
FitResult fit(FitKind kind, const Trace& trace);

struct ExponentialFitOptions {
  int max_iterations = 200;
  double initial_damping = 1e-3;
  double damping_factor = 10.0;
  double objective_tolerance = 1e-12;  // relative objective decrease
  double step_tolerance = 1e-10;       // relative parameter step
  double failure_step = 1e-6;          // cap reached with a larger step -> NoConvergence
};

FitResult fit_exponential(const VectorRef& temps, const VectorRef& powers, const ExponentialFitOptions& options);

struct TraceFit {
  const Trace* trace = nullptr;
  const FitResult* fit = nullptr;
};

/// Pools the relative residuals of every (trace, fit) pair and returns the
/// error norm over the pooled set.
double aggregate_error(std::span<const TraceFit> group);

struct SignTestResult {
  double p_value = 1.0;
  std::size_t a_wins = 0;  // pairs with a < b
  std::size_t b_wins = 0;
  std::size_t ties = 0;
};

/// Two-sided exact sign test on paired per-trace errors. Ties are dropped.
SignTestResult sign_test_detailed(std::span<const double> errors_a, std::span<const double> errors_b);
double sign_test(std::span<const double> errors_a, std::span<const double> errors_b);

struct FamilyOutcome {
  std::optional<FitResult> fit;
  std::string failure;  // error code name when fit is empty
};

struct TraceComparison {
  FamilyOutcome linear;
  FamilyOutcome quadratic;
  FamilyOutcome exponential;

  const FamilyOutcome& outcome(FitKind kind) const;
};

struct PairwiseTest {
  FitKind a = FitKind::Exponential;
  FitKind b = FitKind::Quadratic;
  std::optional<SignTestResult> result;  // empty when every usable pair tied
  std::vector<std::size_t> excluded;     // trace indices with a failed fit in a or b
  std::string note;
};

struct ComparisonReport {
  std::vector<TraceComparison> traces;
  std::optional<double> aggregate_linear;
  std::optional<double> aggregate_quadratic;
  std::optional<double> aggregate_exponential;
  PairwiseTest exp_vs_quad;
  PairwiseTest quad_vs_lin;
  PairwiseTest exp_vs_lin;

  std::optional<double> aggregate(FitKind kind) const;
};

/// Fits all three families to every trace, aggregates per family and runs
/// the pairwise sign tests. Failed fits are recorded, not thrown.
ComparisonReport compare_models(std::span<const Trace> traces);

// The two halves of compare_models, for callers that fit traces in parallel.
TraceComparison compare_trace(const Trace& trace);
ComparisonReport summarize_comparison(std::span<const Trace> traces, std::vector<TraceComparison> rows);

}  // namespace thermo
