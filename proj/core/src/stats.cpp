#include "swarmcov/stats.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "swarmcov/errors.hpp"

namespace swarmcov {

namespace {

struct LinearPart {
  double alpha = 0.0;
  double beta = 0.0;
  double sse = 0.0;
};

// Least squares of e against [1, exp(-t / tau)] in centered form.
LinearPart project_out(std::span<const double> t, std::span<const double> e, double tau)
{
  const std::size_t n = t.size();
  std::vector<double> x(n);
  double xm = 0.0, em = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::exp(-(t[i] - t[0]) / tau);
    xm += x[i];
    em += e[i];
  }
  xm /= n;
  em /= n;
  double sxx = 0.0, sxe = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxe += (x[i] - xm) * (e[i] - em);
  }
  LinearPart p;
  const double slope = sxx > 0.0 ? sxe / sxx : 0.0;
  p.alpha = em - slope * xm;
  // Basis is shifted to t[0]; undo so that f(t) = alpha + beta exp(-t / tau).
  p.beta = slope * std::exp(t[0] / tau);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = e[i] - p.alpha - slope * x[i];
    p.sse += r * r;
  }
  return p;
}

void require_summary(const SampleSummary& s, const char* name)
{
  if (s.n < 2) {
    std::ostringstream msg;
    msg << "sample '" << name << "' needs n >= 2, got " << s.n;
    throw InvalidInput(msg.str());
  }
  if (!(s.sd >= 0.0) || !std::isfinite(s.mean))
    throw InvalidInput(std::string("sample '") + name + "' has an invalid mean or sd");
}

double welch_se2(const SampleSummary& a, const SampleSummary& b)
{
  return a.sd * a.sd / a.n + b.sd * b.sd / b.n;
}

double welch_dof(const SampleSummary& a, const SampleSummary& b)
{
  const double va = a.sd * a.sd / a.n;
  const double vb = b.sd * b.sd / b.n;
  const double den = va * va / (a.n - 1.0) + vb * vb / (b.n - 1.0);
  return (va + vb) * (va + vb) / den;
}

}  // namespace

double ExpFit::operator()(double t) const
{
  return alpha + beta * std::exp(-t / tau);
}

ExpFit fit_exponential(std::span<const double> t, std::span<const double> e)
{
  if (t.size() != e.size())
    throw InvalidInput("exponential fit needs equal-length t and e");
  if (t.size() < 4)
    throw InsufficientData("exponential fit needs at least 4 points");
  double min_dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1]))
      throw InvalidInput("exponential fit needs strictly increasing t");
    min_dt = std::min(min_dt, t[i] - t[i - 1]);
  }
  const double lo = min_dt;
  const double hi = 10.0 * (t.back() - t.front());

  ExpFit fit;
  const double first = e[0];
  if (std::all_of(e.begin(), e.end(), [first](double v) { return v == first; })) {
    fit.alpha = first;
    fit.beta = 0.0;
    fit.tau = hi;
    fit.at_bracket_edge = true;
    return fit;
  }

  // Coarse log scan so the search is global over the bracket.
  constexpr int kScan = 240;
  std::vector<double> taus(kScan), sse(kScan);
  int best = 0;
  for (int k = 0; k < kScan; ++k) {
    taus[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (kScan - 1));
    sse[k] = project_out(t, e, taus[k]).sse;
    if (sse[k] < sse[best])
      best = k;
  }

  double a = taus[std::max(best - 1, 0)];
  double b = taus[std::min(best + 1, kScan - 1)];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = project_out(t, e, c).sse, fd = project_out(t, e, d).sse;
  while (b - a > 1e-13 * b) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = project_out(t, e, c).sse;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = project_out(t, e, d).sse;
    }
  }
  double tau = 0.5 * (a + b);
  LinearPart p = project_out(t, e, tau);
  if (sse[best] < p.sse) {
    tau = taus[best];
    p = project_out(t, e, tau);
  }

  fit.alpha = p.alpha;
  fit.beta = p.beta;
  fit.tau = tau;
  fit.sse = p.sse;
  fit.at_bracket_edge = best == 0 || best == kScan - 1;
  return fit;
}

double quantile(std::span<const double> values, double p)
{
  if (values.empty())
    throw InsufficientData("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidInput("quantile level must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = (v.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

SampleSummary summarize(std::span<const double> values)
{
  SampleSummary s;
  s.n = values.size();
  if (values.empty())
    return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values)
      ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

SteadyStateSummary steady_state_stats(std::span<const double> t, std::span<const double> e, const ExpFit& fit)
{
  if (t.size() != e.size())
    throw InvalidInput("steady-state statistics need equal-length t and e");
  SteadyStateSummary s;
  s.t_s = fit.settling_time();
  std::vector<double> steady;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] > s.t_s)
      steady.push_back(e[i]);
  if (steady.empty()) {
    std::ostringstream msg;
    msg << "no samples after the settling time t_s = 4 tau = " << s.t_s;
    if (!t.empty())
      msg << " (last sample at t = " << t.back() << ")";
    throw InsufficientData(msg.str());
  }
  const SampleSummary sum = summarize(steady);
  s.q3 = quantile(steady, 0.75);
  s.mean = sum.mean;
  s.sd = sum.sd;
  s.n = sum.n;
  return s;
}

double regularized_incomplete_beta(double a, double b, double x)
{
  return boost::math::ibeta(a, b, std::clamp(x, 0.0, 1.0));
}

double f_cdf(double x, double d1, double d2)
{
  if (x <= 0.0)
    return 0.0;
  return regularized_incomplete_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

double student_t_cdf(double t, double dof)
{
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
  return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double dof)
{
  return boost::math::quantile(boost::math::students_t_distribution<double>(dof), p);
}

double normal_cdf(double z)
{
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

FTestResult f_test(const SampleSummary& a, const SampleSummary& b)
{
  require_summary(a, "a");
  require_summary(b, "b");
  const double va = a.sd * a.sd;
  const double vb = b.sd * b.sd;
  if (!(va > 0.0) || !(vb > 0.0))
    throw DegenerateTest("F-test needs two positive variances");
  FTestResult r;
  if (va >= vb) {
    r.f_stat = va / vb;
    r.dof_num = a.n - 1.0;
    r.dof_den = b.n - 1.0;
  } else {
    r.f_stat = vb / va;
    r.dof_num = b.n - 1.0;
    r.dof_den = a.n - 1.0;
  }
  // Upper tail directly, avoiding 1 - cdf cancellation.
  const double upper =
      boost::math::ibetac(0.5 * r.dof_num, 0.5 * r.dof_den, r.dof_num * r.f_stat / (r.dof_num * r.f_stat + r.dof_den));
  r.p_value = std::min(1.0, 2.0 * upper);
  return r;
}

TTestResult t_test(const SampleSummary& a, const SampleSummary& b)
{
  require_summary(a, "a");
  require_summary(b, "b");
  const double se2 = welch_se2(a, b);
  if (!(se2 > 0.0))
    throw DegenerateTest("T-test needs a positive standard error (both variances are zero)");
  TTestResult r;
  r.t_stat = (a.mean - b.mean) / std::sqrt(se2);
  r.dof = welch_dof(a, b);
  r.p_value = std::min(1.0, regularized_incomplete_beta(0.5 * r.dof, 0.5, r.dof / (r.dof + r.t_stat * r.t_stat)));
  return r;
}

ConfidenceInterval mean_diff_ci(const SampleSummary& a, const SampleSummary& b, double level)
{
  if (!(level > 0.0 && level < 1.0))
    throw InvalidInput("confidence level must lie in (0, 1)");
  require_summary(a, "a");
  require_summary(b, "b");
  const double se2 = welch_se2(a, b);
  if (!(se2 > 0.0))
    throw DegenerateTest("confidence interval needs a positive standard error");
  const double tcrit = student_t_quantile(0.5 + 0.5 * level, welch_dof(a, b));
  const double half = tcrit * std::sqrt(se2);
  const double diff = b.mean - a.mean;
  return {diff - half, diff + half};
}

TestReport compare_samples(const SampleSummary& controller,
                           const SampleSummary& benchmark,
                           double significance,
                           double level)
{
  TestReport r;
  r.f = f_test(controller, benchmark);
  r.t = t_test(controller, benchmark);
  r.ci = mean_diff_ci(benchmark, controller, level);
  r.level = level;
  r.significance = significance;
  r.f_pass = r.f.p_value >= significance;
  r.t_pass = r.t.p_value >= significance;
  return r;
}

}  // namespace swarmcov
