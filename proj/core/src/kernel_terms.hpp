#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "swarmcov/domain.hpp"

namespace swarmcov::detail {

inline double std_normal_pdf(double t)
{
  return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
}

inline double std_normal_cdf(double t)
{
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

/// One-dimensional Gaussian factors of every robot kernel at every cell
/// center: gx(i, r) = phi((x_i - p_r) / delta) / delta, likewise gy.
struct SeparableGaussian {
  Eigen::MatrixXd gx;  // (nx, N)
  Eigen::MatrixXd gy;  // (ny, N)

  SeparableGaussian(const SwarmConfig& swarm, double delta, const QuadratureGrid& grid)
    : gx(grid.nx(), static_cast<Eigen::Index>(swarm.size())),
      gy(grid.ny(), static_cast<Eigen::Index>(swarm.size()))
  {
    for (Eigen::Index r = 0; r < gx.cols(); ++r) {
      const Point p = swarm[static_cast<std::size_t>(r)];
      for (int i = 0; i < grid.nx(); ++i)
        gx(i, r) = std_normal_pdf((grid.x(i) - p.x) / delta) / delta;
      for (int j = 0; j < grid.ny(); ++j)
        gy(j, r) = std_normal_pdf((grid.y(j) - p.y) / delta) / delta;
    }
  }

  /// Unnormalized kernel sum on the grid, (nx, ny).
  Eigen::MatrixXd sum() const { return gx * gy.transpose(); }
};

/// In-domain mass of a 1-D Gaussian factor and its derivative in the center.
struct IntervalMass {
  double mass;
  double dmass;
};

inline IntervalMass interval_mass(double center, double lo, double hi, double delta)
{
  const double a = (lo - center) / delta;
  const double b = (hi - center) / delta;
  // Difference of upper tails keeps precision when both ends sit in one tail.
  double mass;
  if (a > 0.0)
    mass = std_normal_cdf(-a) - std_normal_cdf(-b);
  else if (b < 0.0)
    mass = std_normal_cdf(b) - std_normal_cdf(a);
  else
    mass = 1.0 - std_normal_cdf(a) - std_normal_cdf(-b);
  return {mass, (std_normal_pdf(a) - std_normal_pdf(b)) / delta};
}

}  // namespace swarmcov::detail
