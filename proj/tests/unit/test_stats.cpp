#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "swarmcov/errors.hpp"
#include "swarmcov/stats.hpp"

using namespace swarmcov;

namespace {

double log_beta(double a, double b)
{
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double integrate(const std::function<double(double)>& f, double a, double b)
{
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, a, b, 1e-15);
}

std::vector<double> draw(std::mt19937_64& rng, std::size_t n, double mu, double sd)
{
  std::normal_distribution<double> d(mu, sd);
  std::vector<double> v(n);
  for (double& x : v)
    x = d(rng);
  return v;
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST(ExpFit, NoiselessRecovery)
{
  std::vector<double> t, e;
  for (int j = 0; j <= 300; ++j) {
    t.push_back(j);
    e.push_back(0.5 + 1.2 * std::exp(-j / 30.0));
  }
  const ExpFit f = fit_exponential(t, e);
  EXPECT_NEAR(f.alpha, 0.5, 1e-6);
  EXPECT_NEAR(f.beta, 1.2, 1e-6);
  EXPECT_NEAR(f.tau, 30.0, 1e-6);
  EXPECT_FALSE(f.at_bracket_edge);
  EXPECT_EQ(f.settling_time(), 4.0 * f.tau);
}

TEST(ExpFit, ShiftedTimeAxis)
{
  std::vector<double> t, e;
  for (int j = 0; j < 200; ++j) {
    t.push_back(1000.0 + 2.0 * j);
    e.push_back(0.3 + 0.8 * std::exp(-(t.back() - 1000.0) / 45.0));
  }
  const ExpFit f = fit_exponential(t, e);
  EXPECT_NEAR(f.tau, 45.0, 1e-6);
  EXPECT_NEAR(f(t[17]), e[17], 1e-9);
}

TEST(ExpFit, NoisyRecoveryMedianOverSeeds)
{
  std::vector<double> alpha, beta, tau;
  for (std::uint64_t seed = 1; seed <= 11; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> t, e;
    for (int j = 0; j < 500; ++j) {
      t.push_back(j * 0.5);
      e.push_back(0.5 + 1.2 * std::exp(-t.back() / 30.0) + noise(rng));
    }
    const ExpFit f = fit_exponential(t, e);
    alpha.push_back(f.alpha);
    beta.push_back(f.beta);
    tau.push_back(f.tau);
  }
  EXPECT_NEAR(median(alpha), 0.5, 0.05 * 0.5);
  EXPECT_NEAR(median(beta), 1.2, 0.05 * 1.2);
  EXPECT_NEAR(median(tau), 30.0, 0.05 * 30.0);
}

TEST(ExpFit, ConstantSeriesFlagsEdge)
{
  const std::vector<double> t{0, 1, 2, 3, 4, 5}, e(6, 0.42);
  const ExpFit f = fit_exponential(t, e);
  EXPECT_EQ(f.alpha, 0.42);
  EXPECT_NEAR(f.beta, 0.0, 1e-12);
  EXPECT_TRUE(f.at_bracket_edge);
}

TEST(ExpFit, RejectsBadSeries)
{
  EXPECT_THROW(fit_exponential(std::vector<double>{0, 1, 2}, std::vector<double>{1, 1, 1}), InsufficientData);
  EXPECT_THROW(fit_exponential(std::vector<double>{0, 1, 1, 2}, std::vector<double>{1, 2, 3, 4}), InvalidInput);
  EXPECT_THROW(fit_exponential(std::vector<double>{0, 1, 2, 3}, std::vector<double>{1, 2, 3}), InvalidInput);
}

TEST(Quantile, LinearInterpolationConvention)
{
  EXPECT_DOUBLE_EQ(quantile(std::vector<double>{1, 2, 3, 4}, 0.75), 3.25);
  EXPECT_DOUBLE_EQ(quantile(std::vector<double>{4, 1, 3, 2}, 0.75), 3.25);
  EXPECT_DOUBLE_EQ(quantile(std::vector<double>{7}, 0.75), 7.0);
  EXPECT_THROW(quantile(std::vector<double>{}, 0.5), InsufficientData);
  EXPECT_THROW(quantile(std::vector<double>{1.0}, 1.5), InvalidInput);
}

TEST(Quantile, PermutationInvariantAndMonotone)
{
  std::mt19937_64 rng(3);
  std::vector<double> v = draw(rng, 57, 0.0, 1.0);
  const double q = quantile(v, 0.75);
  std::shuffle(v.begin(), v.end(), rng);
  EXPECT_EQ(quantile(v, 0.75), q);
  for (double& x : v)
    x += std::abs(x) * 0.1 + 0.01;
  EXPECT_GT(quantile(v, 0.75), q);
}

TEST(SteadyState, UsesSamplesAfterSettling)
{
  ExpFit f;
  f.tau = 1.0;
  const std::vector<double> t{1, 2, 3, 4, 5, 6, 7, 8}, e{9, 9, 9, 9, 1, 2, 3, 4};
  const SteadyStateSummary s = steady_state_stats(t, e, f);
  EXPECT_EQ(s.t_s, 4.0);
  EXPECT_EQ(s.n, 4u);
  EXPECT_DOUBLE_EQ(s.q3, 3.25);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
}

TEST(SteadyState, IdenticalSamples)
{
  ExpFit f;
  f.tau = 0.1;
  const std::vector<double> t{1, 2, 3}, e{0.6, 0.6, 0.6};
  const SteadyStateSummary s = steady_state_stats(t, e, f);
  EXPECT_EQ(s.q3, 0.6);
  EXPECT_EQ(s.mean, 0.6);
  EXPECT_EQ(s.sd, 0.0);
}

TEST(SteadyState, NoSamplesIsInsufficient)
{
  ExpFit f;
  f.tau = 10.0;
  try {
    steady_state_stats(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1, 1}, f);
    FAIL();
  } catch (const InsufficientData& e) {
    EXPECT_NE(std::string(e.what()).find("40"), std::string::npos);
  }
}

TEST(SpecialFunctions, IncompleteBetaMatchesIntegration)
{
  for (double a : {0.5, 1.0, 2.5, 7.0})
    for (double b : {0.5, 1.5, 4.0})
      for (double x : {0.05, 0.3, 0.5, 0.77, 0.95}) {
        const double lb = log_beta(a, b);
        const double oracle =
            integrate([&](double u) { return std::exp((a - 1) * std::log(u) + (b - 1) * std::log1p(-u) - lb); }, 0.0, x);
        EXPECT_NEAR(regularized_incomplete_beta(a, b, x), oracle, 1e-10) << a << " " << b << " " << x;
      }
}

TEST(SpecialFunctions, NormalCdfMatchesIntegration)
{
  for (double z : {-3.0, -1.2, -0.1, 0.0, 0.4, 1.7, 2.9}) {
    const double oracle =
        0.5 + integrate([](double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); }, 0.0, z);
    EXPECT_NEAR(normal_cdf(z), oracle, 1e-10) << z;
  }
}

TEST(SpecialFunctions, FCdfMatchesDensityIntegral)
{
  for (double d1 : {3.0, 10.0, 999.0})
    for (double d2 : {4.0, 30.0, 999.0})
      for (double x : {0.4, 1.0831, 2.5}) {
        const double lb = log_beta(d1 / 2, d2 / 2);
        auto density = [&](double u) {
          return std::exp(0.5 * (d1 * std::log(d1 * u) + d2 * std::log(d2) - (d1 + d2) * std::log(d1 * u + d2)) -
                          std::log(u) - lb);
        };
        EXPECT_NEAR(f_cdf(x, d1, d2), integrate(density, 0.0, x), 1e-6) << d1 << " " << d2 << " " << x;
      }
}

TEST(SpecialFunctions, StudentTCdfMatchesDensityIntegral)
{
  for (double nu : {1.0, 2.5, 8.0, 150.0})
    for (double t : {-4.0, -1.0, 0.3, 2.2}) {
      const double lc = std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2) - 0.5 * std::log(nu * std::numbers::pi);
      auto density = [&](double u) { return std::exp(lc - (nu + 1) / 2 * std::log1p(u * u / nu)); };
      EXPECT_NEAR(student_t_cdf(t, nu), 0.5 + integrate(density, 0.0, t), 1e-6) << nu << " " << t;
    }
  EXPECT_NEAR(student_t_cdf(student_t_quantile(0.975, 12.0), 12.0), 0.975, 1e-12);
}

TEST(FTest, ReferenceStatistic)
{
  const FTestResult r = f_test({0.0, 0.02484, 1000}, {0.0, 0.02586, 500});
  EXPECT_NEAR(r.f_stat, 1.083, 0.002);
  EXPECT_EQ(r.dof_num, 499.0);
  EXPECT_EQ(r.dof_den, 999.0);
  EXPECT_GT(r.p_value, 0.0);
  EXPECT_LE(r.p_value, 1.0);
}

TEST(FTest, SymmetricAndIdentity)
{
  const SampleSummary a{0.1, 0.3, 20}, b{0.5, 0.2, 35};
  const FTestResult ab = f_test(a, b), ba = f_test(b, a);
  EXPECT_EQ(ab.f_stat, ba.f_stat);
  EXPECT_EQ(ab.p_value, ba.p_value);
  EXPECT_GE(ab.f_stat, 1.0);
  const FTestResult same = f_test(a, a);
  EXPECT_EQ(same.f_stat, 1.0);
  EXPECT_NEAR(same.p_value, 1.0, 1e-12);
  EXPECT_THROW(f_test({0.0, 0.0, 5}, b), DegenerateTest);
  EXPECT_THROW(f_test({0.0, 0.1, 1}, b), InvalidInput);
}

TEST(FTest, PValueFromDistribution)
{
  const FTestResult r = f_test({0, 2.0, 11}, {0, 1.0, 21});
  EXPECT_NEAR(r.p_value, 2.0 * (1.0 - f_cdf(4.0, 10.0, 20.0)), 1e-12);
}

TEST(TTest, IdenticalSummaries)
{
  const SampleSummary a{0.49, 0.025, 100};
  const TTestResult r = t_test(a, a);
  EXPECT_EQ(r.t_stat, 0.0);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
  EXPECT_NEAR(r.dof, 198.0, 1e-9);
  EXPECT_THROW(t_test({0.1, 0.0, 4}, {0.1, 0.0, 9}), DegenerateTest);
}

TEST(TTest, WelchDegreesOfFreedom)
{
  const SampleSummary a{1.0, 2.0, 10}, b{2.0, 1.0, 30};
  const double va = 4.0 / 10, vb = 1.0 / 30;
  const double dof = (va + vb) * (va + vb) / (va * va / 9 + vb * vb / 29);
  const TTestResult r = t_test(a, b);
  EXPECT_NEAR(r.dof, dof, 1e-12);
  EXPECT_NEAR(r.t_stat, -1.0 / std::sqrt(va + vb), 1e-12);
  EXPECT_NEAR(r.p_value, 2.0 * student_t_cdf(r.t_stat, dof), 1e-12);
}

TEST(TTest, SameMeanSimulation)
{
  std::mt19937_64 rng(2718);
  int small = 0;
  const int reps = 1000;
  for (int k = 0; k < reps; ++k) {
    const auto a = draw(rng, 200, 0.49, 0.025), b = draw(rng, 300, 0.49, 0.03);
    small += std::abs(t_test(summarize(a), summarize(b)).t_stat) < 3.0;
  }
  EXPECT_GE(small, 990);
}

TEST(ConfidenceInterval, CoverageSimulation)
{
  std::mt19937_64 rng(1618);
  int covered = 0;
  const int reps = 1000;
  const double truth = 0.52 - 0.49;
  for (int k = 0; k < reps; ++k) {
    const auto a = draw(rng, 40, 0.49, 0.025), b = draw(rng, 25, 0.52, 0.04);
    const ConfidenceInterval ci = mean_diff_ci(summarize(a), summarize(b), 0.95);
    covered += ci.lo <= truth && truth <= ci.hi;
  }
  EXPECT_NEAR(covered / static_cast<double>(reps), 0.95, 0.02);
}

TEST(ConfidenceInterval, HugeSamplesStraddleZero)
{
  const SampleSummary a{0.5, 0.02, 1000000};
  const ConfidenceInterval ci = mean_diff_ci(a, a);
  EXPECT_LT(ci.lo, 0.0);
  EXPECT_GT(ci.hi, 0.0);
  EXPECT_NEAR(ci.hi - ci.lo, 2.0 * 1.959964 * 0.02 * std::sqrt(2.0 / 1000000), 1e-8);
  EXPECT_THROW(mean_diff_ci(a, a, 1.0), InvalidInput);
}

TEST(CompareSamples, OrientationIsControllerMinusBenchmark)
{
  const SampleSummary controller{0.51, 0.026, 300}, benchmark{0.49, 0.025, 1000};
  const TestReport r = compare_samples(controller, benchmark);
  EXPECT_GT(r.t.t_stat, 0.0);
  EXPECT_LT(r.ci.lo, 0.02);
  EXPECT_GT(r.ci.hi, 0.02);
  EXPECT_GT(r.ci.lo, 0.0);
  EXPECT_FALSE(r.t_pass);
  EXPECT_TRUE(r.f_pass);
  EXPECT_EQ(r.level, 0.95);
}
