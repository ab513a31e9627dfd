#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace swarmcov {

/// f(t) = alpha + beta * exp(-t / tau)
struct ExpFit {
  double alpha = 0.0;  // error asymptote
  double beta = 0.0;   // error range
  double tau = 1.0;    // time constant
  double sse = 0.0;
  bool at_bracket_edge = false;  // best tau on the search bracket edge: no resolvable decay

  double operator()(double t) const;
  double settling_time() const { return 4.0 * tau; }
};

/// Variable projection: alpha and beta are solved linearly for each tau; tau
/// is scanned on a log grid over [min dt, 10 (t_max - t_min)] and refined by
/// golden-section search. Needs >= 4 points with strictly increasing t.
ExpFit fit_exponential(std::span<const double> t, std::span<const double> e);

struct SteadyStateSummary {
  double t_s = 0.0;
  double q3 = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

/// Statistics of the samples with t > 4 tau. Throws InsufficientData if none.
SteadyStateSummary steady_state_stats(std::span<const double> t, std::span<const double> e, const ExpFit& fit);

/// Linear interpolation between order statistics, h = (n - 1) p.
double quantile(std::span<const double> values, double p);

struct SampleSummary {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

SampleSummary summarize(std::span<const double> values);

struct FTestResult {
  double f_stat = 1.0;  // larger variance over smaller, so >= 1
  double dof_num = 0.0;
  double dof_den = 0.0;
  double p_value = 1.0;  // two-sided
};

/// Throws DegenerateTest for a zero variance.
FTestResult f_test(const SampleSummary& a, const SampleSummary& b);

struct TTestResult {
  double t_stat = 0.0;  // (mean_a - mean_b) / standard error
  double dof = 0.0;     // Welch-Satterthwaite
  double p_value = 1.0;  // two-sided
};

/// Welch's unequal-variance t-test. Throws DegenerateTest when the standard
/// error is zero.
TTestResult t_test(const SampleSummary& a, const SampleSummary& b);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Welch interval for mean_b - mean_a at the given two-sided level.
ConfidenceInterval mean_diff_ci(const SampleSummary& a, const SampleSummary& b, double level = 0.95);

/// Controller sample (a) against the benchmark sample (b).
struct TestReport {
  FTestResult f;
  TTestResult t;
  ConfidenceInterval ci;
  double level = 0.95;
  double significance = 0.05;
  bool f_pass = false;  // variances not distinguishable at `significance`
  bool t_pass = false;  // means not distinguishable at `significance`
};

TestReport compare_samples(const SampleSummary& controller,
                           const SampleSummary& benchmark,
                           double significance = 0.05,
                           double level = 0.95);

// Distribution functions, backed by Boost.Math.
double regularized_incomplete_beta(double a, double b, double x);
double f_cdf(double x, double d1, double d2);
double student_t_cdf(double t, double dof);
double student_t_quantile(double p, double dof);
double normal_cdf(double z);

}  // namespace swarmcov
