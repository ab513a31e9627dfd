#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "swarmcov/domain.hpp"
#include "swarmcov/errors.hpp"
#include "swarmcov/pdf_bench.hpp"

using namespace swarmcov;

namespace {

std::vector<double> normal_samples(std::size_t m, double mu, double sigma, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(mu, sigma);
  std::vector<double> v(m);
  for (double& x : v)
    x = d(rng);
  return v;
}

struct RingSetup {
  RectDomain dom{0.0, 48.0, 0.0, 70.0};
  QuadratureGrid grid{dom, 100, 100};
  TargetDensity rho = TargetDensity::reference_ring().normalized(grid);
  ScaledKernel k{KernelShape::gaussian, 2.0};
};

}  // namespace

TEST(EmpiricalCdf, RankCounts)
{
  const EmpiricalCdf F({0.6, 0.4, 0.5});
  EXPECT_NEAR(F(0.55), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(F(0.1), 0.0);
  EXPECT_EQ(F(0.7), 1.0);
  EXPECT_NEAR(F(0.5), 2.0 / 3.0, 1e-15);
}

TEST(EmpiricalCdf, Nondecreasing)
{
  const EmpiricalCdf F(normal_samples(300, 0.0, 1.0, 1));
  std::vector<double> q = normal_samples(1000, 0.0, 1.5, 2);
  std::sort(q.begin(), q.end());
  for (std::size_t i = 1; i < q.size(); ++i)
    EXPECT_LE(F(q[i - 1]), F(q[i]));
}

TEST(SupDistance, ChecksBothSidesOfJumps)
{
  const EmpiricalCdf F({1.0});
  EXPECT_NEAR(sup_distance(F, 1.0, 0.1), 0.5, 1e-15);
}

TEST(ErfFit, RecoversSyntheticNormal)
{
  const auto v = normal_samples(5000, 0.5, 0.03, 3);
  const ErfFit f = fit_erf_cdf(v);
  EXPECT_NEAR(f.mu, 0.5, 0.01);
  EXPECT_NEAR(f.sigma, 0.03, 0.005);
  EXPECT_GT(f.iterations, 0);
  EXPECT_LT(f.residual, 0.03);
}

TEST(ErfFit, WithinThreeStandardErrors)
{
  for (std::uint64_t seed : {10u, 11u, 12u}) {
    const std::size_t m = 1000;
    const auto v = normal_samples(m, 0.4933, 0.02484, seed);
    const ErfFit f = fit_erf_cdf(v);
    EXPECT_NEAR(f.mu, 0.4933, 3.0 * 0.02484 / std::sqrt(m)) << seed;
    EXPECT_NEAR(f.sigma, 0.02484, 3.0 * 0.02484 / std::sqrt(2.0 * m)) << seed;
  }
}

TEST(ErfFit, DegenerateSamplesFallBack)
{
  const std::vector<double> flat(50, 0.7);
  try {
    fit_erf_cdf(flat);
    FAIL() << "expected FitFailure";
  } catch (const FitFailure& e) {
    EXPECT_DOUBLE_EQ(e.fallback().mu, 0.7);
    EXPECT_GT(e.fallback().sigma, 0.0);
    EXPECT_EQ(e.kind(), ErrorKind::numerical);
  }
  EXPECT_THROW(fit_erf_cdf(std::vector<double>{0.1, 0.2, 0.3}), FitFailure);
}

TEST(NormalPdf, ModeHeightAndNormalization)
{
  const NormalPdf p = pdf_from_fit(ErfFit{0.4933, 0.02484, 0.0, 0});
  EXPECT_NEAR(p(0.4933), 16.06, 0.01);
  EXPECT_NEAR(p(0.4933), 1.0 / (0.02484 * std::sqrt(2.0 * std::numbers::pi)), 1e-12);
  const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(p, 0.0, 2.0, 15, 1e-12);
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(NormalPdf, DerivativeOfFittedCdf)
{
  const ErfFit fit{0.5, 0.03, 0.0, 0};
  const NormalPdf p = pdf_from_fit(fit);
  const double h = 1e-6;
  for (double z = 0.38; z <= 0.62; z += 0.01)
    EXPECT_NEAR((fit.cdf(z + h) - fit.cdf(z - h)) / (2 * h), p(z), 1e-6 * std::max(1.0, p(z))) << z;
}

TEST(Normality, SyntheticNormalPasses)
{
  const auto v = normal_samples(5000, 0.5, 0.03, 21);
  const NormalityReport r = normality_diagnostics(v);
  EXPECT_TRUE(r.residual_ok);
  EXPECT_TRUE(r.skewness_ok);
  EXPECT_TRUE(r.kurtosis_ok);
  EXPECT_TRUE(r.passed());
  EXPECT_DOUBLE_EQ(r.residual_limit, 0.03);
}

TEST(Normality, ExponentialFailsSkewness)
{
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> d(2.0);
  std::vector<double> v(2000);
  for (double& x : v)
    x = d(rng);
  const NormalityReport r = normality_diagnostics(v);
  EXPECT_FALSE(r.skewness_ok);
  EXPECT_GT(r.skewness, 1.5);
  EXPECT_FALSE(r.passed());
}

TEST(Normality, NeedsThirtySamples)
{
  EXPECT_THROW(normality_diagnostics(normal_samples(29, 0, 1, 1)), InsufficientData);
  EXPECT_NO_THROW(normality_diagnostics(normal_samples(30, 0, 1, 1)));
}

TEST(MonteCarlo, DeterministicAndBounded)
{
  const RingSetup r;
  const ErrorSampleSet a = monte_carlo_samples(r.rho, r.k, r.grid, 200, 40, 77);
  const ErrorSampleSet b = monte_carlo_samples(r.rho, r.k, r.grid, 200, 40, 77);
  const ErrorSampleSet c = monte_carlo_samples(r.rho, r.k, r.grid, 200, 40, 77, 3);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.values, c.values);
  for (double e : a.values) {
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 2.0);
  }
  EXPECT_EQ(a.n_robots, 200u);
  EXPECT_EQ(a.delta, 2.0);
  EXPECT_EQ(a.density_id, "ring");
  EXPECT_NE(a.values, monte_carlo_samples(r.rho, r.k, r.grid, 200, 40, 78).values);
}

TEST(MonteCarlo, MeanShrinksWithMoreRobots)
{
  const RingSetup r;
  const ErrorSampleSet small = monte_carlo_samples(r.rho, r.k, r.grid, 200, 30, 1);
  const ErrorSampleSet large = monte_carlo_samples(r.rho, r.k, r.grid, 3200, 30, 1);
  EXPECT_LT(large.mean(), small.mean());
}

TEST(MonteCarlo, RejectsEmptyRequests)
{
  const RingSetup r;
  EXPECT_THROW(monte_carlo_samples(r.rho, r.k, r.grid, 0, 10, 1), EmptySwarm);
  EXPECT_THROW(monte_carlo_samples(r.rho, r.k, r.grid, 10, 0, 1), InvalidInput);
}

TEST(ErrorSampleSet, MeanAndSampleSd)
{
  ErrorSampleSet s;
  s.values = {1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(s.mean(), 2.5);
  EXPECT_NEAR(s.sd(), std::sqrt(5.0 / 3.0), 1e-15);
}
