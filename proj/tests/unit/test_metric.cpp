#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "swarmcov/domain.hpp"
#include "swarmcov/errors.hpp"
#include "swarmcov/metric.hpp"
#include "swarmcov/parallel.hpp"

using namespace swarmcov;

namespace {

const RectDomain kRing(0.0, 48.0, 0.0, 70.0);

double phi(double x)
{
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Direct evaluation of the boundary-corrected blob error on an n x n grid.
double brute_force_error(const RectDomain& d, const std::vector<Point>& robots, double delta,
                         const std::function<double(double, double)>& target, int nx, int ny)
{
  double denom = 0.0;
  for (const Point& p : robots)
    denom += (phi((d.x_max() - p.x) / delta) - phi((d.x_min() - p.x) / delta)) *
             (phi((d.y_max() - p.y) / delta) - phi((d.y_min() - p.y) / delta));
  const double hx = d.width() / nx, hy = d.height() / ny;
  double sum = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double x = d.x_min() + (i + 0.5) * hx, y = d.y_min() + (j + 0.5) * hy;
      double f = 0.0;
      for (const Point& p : robots) {
        const double r2 = (x - p.x) * (x - p.x) + (y - p.y) * (y - p.y);
        f += std::exp(-0.5 * r2 / (delta * delta)) / (2.0 * std::numbers::pi * delta * delta);
      }
      sum += std::abs(f / denom - target(x, y));
    }
  return sum * hx * hy;
}

TargetDensity random_density(std::mt19937_64& rng, const RectDomain& d)
{
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (kind(rng)) {
    case 0: return TargetDensity(d, UniformDensity{}, "uniform");
    case 1: {
      const double s = std::min(d.width(), d.height());
      RingDensity r{0.1 * s + 0.1 * s * u(rng), 0.3 * s + 0.15 * s * u(rng), 1.0, 1.0 + 50.0 * u(rng)};
      return TargetDensity(d, r, "ring");
    }
    default: {
      GaussianMixtureDensity g;
      const int k = 1 + static_cast<int>(3 * u(rng));
      for (int c = 0; c < k; ++c) {
        g.weights.push_back(0.1 + u(rng));
        g.means.push_back({d.x_min() + d.width() * u(rng), d.y_min() + d.height() * u(rng)});
        g.sigmas.push_back((0.05 + 0.3 * u(rng)) * std::max(d.width(), d.height()));
      }
      return TargetDensity(d, g, "mixture");
    }
  }
}

}  // namespace

TEST(BoundaryMass, InteriorIsOne)
{
  EXPECT_NEAR(boundary_mass(ScaledKernel(KernelShape::gaussian, 2.0), kRing, {24.0, 35.0}), 1.0, 1e-12);
  EXPECT_EQ(boundary_mass(ScaledKernel(KernelShape::indicator_disc, 2.0), kRing, {24.0, 35.0}), 1.0);
}

TEST(BoundaryMass, CornerIsAQuarter)
{
  EXPECT_NEAR(boundary_mass(ScaledKernel(KernelShape::gaussian, 2.0), kRing, {0.0, 0.0}), 0.25, 1e-6);
  EXPECT_NEAR(boundary_mass(ScaledKernel(KernelShape::gaussian, 2.0), kRing, {48.0, 70.0}), 0.25, 1e-6);
  EXPECT_NEAR(boundary_mass(ScaledKernel(KernelShape::indicator_disc, 2.0), kRing, {48.0, 0.0}), 0.25, 1e-6);
}

TEST(BoundaryMass, GaussianMatchesNumericQuadrature)
{
  using boost::math::quadrature::gauss_kronrod;
  for (const Point x : {Point{2.0, 35.0}, Point{0.5, 69.0}, Point{45.0, 3.0}}) {
    const ScaledKernel k(KernelShape::gaussian, 5.0);
    auto inner = [&](double zx) {
      auto f = [&](double zy) { return k({zx - x.x, zy - x.y}); };
      return gauss_kronrod<double, 61>::integrate(f, 0.0, 70.0, 12, 1e-14);
    };
    const double oracle = gauss_kronrod<double, 61>::integrate(inner, 0.0, 48.0, 12, 1e-14);
    EXPECT_NEAR(boundary_mass(k, kRing, x), oracle, 1e-6) << x.x << "," << x.y;
  }
}

TEST(BoundaryMass, DiscMatchesCircularSegment)
{
  // Disc of radius r whose center sits d inside one edge: area outside is a circular segment.
  for (const double d : {0.0, 0.3, 0.9, 1.7}) {
    const double r = 2.0;
    const double segment = r * r * std::acos(d / r) - d * std::sqrt(r * r - d * d);
    const double oracle = 1.0 - segment / (std::numbers::pi * r * r);
    EXPECT_NEAR(boundary_mass(ScaledKernel(KernelShape::indicator_disc, r), kRing, {d, 35.0}), oracle, 1e-6) << d;
  }
}

TEST(BlobFunction, SingleRobotAtCenter)
{
  const QuadratureGrid g(kRing, 240, 350);
  const BlobField f = blob_function(SwarmConfig({{24.0, 35.0}}), ScaledKernel(KernelShape::gaussian, 0.8), g);
  EXPECT_NEAR(f.mass(g), 1.0, 1e-3);
  Eigen::Index i = 0, j = 0;
  f.values.maxCoeff(&i, &j);
  EXPECT_NEAR(g.x(static_cast<int>(i)), 24.0, g.hx());
  EXPECT_NEAR(g.y(static_cast<int>(j)), 35.0, g.hy());
  EXPECT_GE(f.values.minCoeff(), 0.0);
}

TEST(BlobFunction, CoincidentRobotsActLikeOne)
{
  const QuadratureGrid g(kRing, 100, 100);
  const ScaledKernel k(KernelShape::gaussian, 2.0);
  const BlobField one = blob_function(SwarmConfig({{3.0, 4.0}}), k, g);
  const BlobField many = blob_function(SwarmConfig(std::vector<Point>(25, {3.0, 4.0})), k, g);
  EXPECT_LT((one.values - many.values).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(BlobFunction, FarFromBoundaryMatchesKernelDensityForm)
{
  const QuadratureGrid g(kRing, 100, 100);
  const ScaledKernel k(KernelShape::gaussian, 0.5);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(18.0, 30.0), uy(29.0, 41.0);
  std::vector<Point> pts(200);
  for (Point& p : pts)
    p = {ux(rng), uy(rng)};
  const SwarmConfig s(pts);
  const BlobField corrected = blob_function(s, k, g, BlobNormalization::boundary_corrected);
  const BlobField kde = blob_function(s, k, g, BlobNormalization::robot_count);
  EXPECT_LT((corrected.values - kde.values).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(BlobFunction, EmptyAndOutsideRejected)
{
  const QuadratureGrid g(kRing, 10, 10);
  const ScaledKernel k(KernelShape::gaussian, 2.0);
  EXPECT_THROW(blob_function(SwarmConfig{}, k, g), EmptySwarm);
  EXPECT_THROW(blob_function(SwarmConfig({{-1.0, 3.0}}), k, g), InvalidInput);
}

TEST(ErrorMetric, TargetEqualToOwnBlobField)
{
  const RectDomain d(0.0, 10.0, 0.0, 10.0);
  const QuadratureGrid g(d, 50, 50);
  const ScaledKernel k(KernelShape::gaussian, 3.0);
  const SwarmConfig s({{2.0, 3.0}, {7.5, 6.0}, {5.0, 9.0}});
  const BlobField f = blob_function(s, k, g);
  GridDensity gd{d, g.nx(), g.ny(), {}};
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      gd.values.push_back(f.values(i, j));
  const MetricResult r = error_metric(s, TargetDensity(d, gd, "self"), k, g);
  EXPECT_NEAR(r.e, 0.0, 1e-12);
}

TEST(ErrorMetric, RingCornerClusterNearUpperBound)
{
  const QuadratureGrid g = QuadratureGrid::for_kernel(kRing, 2.0);
  const TargetDensity ring = TargetDensity::reference_ring().normalized(g);
  const MetricResult r =
      error_metric(SwarmConfig(std::vector<Point>(200, {0.5, 0.5})), ring, ScaledKernel(KernelShape::gaussian, 2.0), g);
  EXPECT_NEAR(r.e, 1.9867, 0.02 * 1.9867);
  EXPECT_LE(r.e, 2.0);
  EXPECT_EQ(r.n_robots, 200u);
  EXPECT_EQ(r.density_id, "ring");
}

TEST(ErrorMetric, UniformSquareAgainstFinerGrid)
{
  const RectDomain d(0.0, 1.0, 0.0, 1.0);
  const QuadratureGrid g(d, 100, 100);
  const TargetDensity u = TargetDensity(d, UniformDensity{}, "uniform").normalized(g);
  const double e = error_metric(SwarmConfig({{0.5, 0.5}}), u, ScaledKernel(KernelShape::gaussian, 0.1), g).e;
  const double oracle = brute_force_error(d, {{0.5, 0.5}}, 0.1, [](double, double) { return 1.0; }, 400, 400);
  EXPECT_NEAR(e, oracle, 1e-2);
}

TEST(ErrorMetric, PermutationInvariant)
{
  const QuadratureGrid g(kRing, 100, 100);
  const TargetDensity ring = TargetDensity::reference_ring().normalized(g);
  const ScaledKernel k(KernelShape::gaussian, 2.0);
  const SwarmConfig drawn = sample_positions(ring, 60, 3);
  std::vector<Point> pts(drawn.positions().begin(), drawn.positions().end());
  const double e = error_metric(SwarmConfig(pts), ring, k, g).e;
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 5; ++rep) {
    std::shuffle(pts.begin(), pts.end(), rng);
    EXPECT_NEAR(error_metric(SwarmConfig(pts), ring, k, g).e, e, 1e-12);
  }
}

TEST(ErrorMetric, BoundsOnRandomCases)
{
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int cases = 0;
  for (; cases < 1200; ++cases) {
    const RectDomain d(0.0, 1.0 + 60.0 * u(rng), -5.0, -5.0 + 1.0 + 60.0 * u(rng));
    const QuadratureGrid g(d, 20 + static_cast<int>(60 * u(rng)), 20 + static_cast<int>(60 * u(rng)));
    const TargetDensity rho = random_density(rng, d).normalized(g);
    const double delta = (0.01 + 0.5 * u(rng)) * std::min(d.width(), d.height());
    const KernelShape shape = u(rng) < 0.8 ? KernelShape::gaussian : KernelShape::indicator_disc;
    const std::size_t n = 1 + static_cast<std::size_t>(80 * u(rng));
    SwarmConfig s;
    try {
      s = u(rng) < 0.5 ? uniform_positions(d, n, rng) : sample_positions(rho, n, rng);
    } catch (const SamplingFailure&) {
      s = uniform_positions(d, n, rng);
    }
    const MetricResult r = error_metric(s, rho, ScaledKernel(shape, delta), g);
    ASSERT_GE(r.e, 0.0) << "case " << cases;
    // Exact integrals give e <= 2; the grid can only add its mass defect.
    ASSERT_LE(r.e, 2.0 + r.mass_defect + 1e-12) << "case " << cases;
    // e - 2 e_hat equals the blob mass minus the target mass on the grid.
    ASSERT_LE(std::abs(r.e - 2.0 * r.e_hat), 2.0 * r.mass_defect + 1e-12) << "case " << cases;
  }
  EXPECT_GE(cases, 1000);
}

TEST(ErrorMetric, OneSidedIsHalfOnCleanGrid)
{
  const QuadratureGrid g(kRing, 100, 100);
  const TargetDensity ring = TargetDensity::reference_ring().normalized(g);
  const MetricResult r = error_metric(sample_positions(ring, 200, 9), ring, ScaledKernel(KernelShape::gaussian, 2.0), g);
  EXPECT_NEAR(r.e, 2.0 * r.e_hat, 2.0 * r.mass_defect + 1e-12);
  EXPECT_LT(r.mass_defect, 1e-2);
}

TEST(ErrorMetric, QuadratureConvergesAtLeastLinearly)
{
  const GaussianMixtureDensity mix{{0.6, 0.4}, {{15.0, 20.0}, {32.0, 50.0}}, {6.0, 9.0}};
  const TargetDensity rho(kRing, mix, "mixture");
  const SwarmConfig s = sample_positions(rho, 40, 7);
  const ScaledKernel k(KernelShape::gaussian, 2.0);
  auto e_at = [&](int n) {
    const QuadratureGrid g(kRing, n, n);
    return error_metric(s, rho.normalized(g), k, g).e;
  };
  const double oracle = e_at(3200);
  const double coarse = std::abs(e_at(100) - oracle);
  const double fine = std::abs(e_at(800) - oracle);
  EXPECT_GE(std::cbrt(coarse / fine), 1.5);
}

TEST(CumulativeError, SingleFrameEqualsInstantaneous)
{
  const QuadratureGrid g(kRing, 100, 100);
  const TargetDensity ring = TargetDensity::reference_ring().normalized(g);
  const ScaledKernel k(KernelShape::gaussian, 2.0);
  const SwarmConfig s = sample_positions(ring, 50, 1);
  TrajectorySeries one;
  one.push_back(0.0, s);
  EXPECT_NEAR(cumulative_error(one, ring, k, g), error_metric(s, ring, k, g).e, 1e-12);

  TrajectorySeries same;
  for (int t = 0; t < 4; ++t)
    same.push_back(t, s);
  EXPECT_NEAR(cumulative_error(same, ring, k, g), error_metric(s, ring, k, g).e, 1e-12);
}

TEST(CumulativeError, FramesActLikeOneLargeSwarm)
{
  const QuadratureGrid g(kRing, 100, 100);
  const TargetDensity ring = TargetDensity::reference_ring().normalized(g);
  const ScaledKernel k(KernelShape::gaussian, 1.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(12.0, 36.0), uy(15.0, 55.0);
  TrajectorySeries traj;
  std::vector<Point> all;
  for (int t = 0; t < 3; ++t) {
    std::vector<Point> frame(30);
    for (Point& p : frame)
      p = {ux(rng), uy(rng)};
    all.insert(all.end(), frame.begin(), frame.end());
    traj.push_back(t, SwarmConfig(frame));
  }
  EXPECT_NEAR(cumulative_error(traj, ring, k, g), error_metric(SwarmConfig(all), ring, k, g).e, 1e-9);
}

TEST(TrajectorySeries, RejectsMalformedFrames)
{
  TrajectorySeries t;
  t.push_back(0.0, SwarmConfig({{1, 1}, {2, 2}}));
  EXPECT_THROW(t.push_back(0.0, SwarmConfig({{1, 1}, {2, 2}})), MalformedTrajectory);
  EXPECT_THROW(t.push_back(1.0, SwarmConfig({{1, 1}})), MalformedTrajectory);
  EXPECT_THROW(TrajectorySeries({0.0, 1.0}, {SwarmConfig({{1, 1}})}), MalformedTrajectory);
}

TEST(DiscretizationMetric, SingleRegionIsZero)
{
  const TargetDensity ring = TargetDensity::reference_ring();
  EXPECT_EQ(discretization_metric(sample_positions(ring, 37, 2), ring, Partition(kRing, 1, 1)), 0.0);
}

TEST(DiscretizationMetric, QuadrantExamples)
{
  const RectDomain d(0, 1, 0, 1);
  const TargetDensity u(d, UniformDensity{});
  const Partition p(d, 2, 2);
  EXPECT_NEAR(discretization_metric(SwarmConfig({{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}}), u, p), 0.0,
              1e-12);
  EXPECT_NEAR(discretization_metric(SwarmConfig({{0.1, 0.1}, {0.2, 0.2}, {0.3, 0.1}, {0.4, 0.4}}), u, p), 1.5, 1e-12);
}

TEST(DiscretizationMetric, EdgeRobotsUseHalfOpenCells)
{
  const RectDomain d(0, 1, 0, 1);
  const Partition p(d, 2, 2);
  EXPECT_EQ(p.region_of({0.5, 0.5}), 3u);
  EXPECT_EQ(p.region_of({0.0, 0.0}), 0u);
  EXPECT_EQ(p.region_of({1.0, 1.0}), 3u);
  EXPECT_EQ(p.region_of({0.49, 1.0}), 2u);
  const auto counts = p.counts(SwarmConfig({{0.5, 0.5}, {1.0, 0.0}}));
  EXPECT_EQ(counts[3], 1u);
  EXPECT_EQ(counts[1], 1u);
}

TEST(DiscretizationMetric, RefinementDrivesTowardTwo)
{
  const RectDomain d(0.0, 48.0, 0.0, 70.0);
  const TargetDensity u(d, UniformDensity{});
  std::mt19937_64 rng(31);
  const std::size_t n = 20;
  const SwarmConfig s = uniform_positions(d, n, rng);
  double last = 0.0;
  bool reached = false;
  for (int k : {2, 4, 8, 16, 32, 64, 128, 256}) {
    const Partition p(d, k, k);
    const auto counts = p.counts(s);
    const auto masses = p.target_masses(u);
    const double max_mass = *std::max_element(masses.begin(), masses.end());
    const bool sparse = std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c <= 1; }) &&
                        max_mass <= 1.0 / n;
    const double mu = discretization_metric(s, u, p);
    if (sparse) {
      EXPECT_GE(mu, 2.0 - 2.0 * n * max_mass - 1e-12) << k;
      reached = true;
    }
    last = mu;
  }
  EXPECT_TRUE(reached);
  EXPECT_GE(last, 1.9);
}
