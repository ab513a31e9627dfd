#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "swarmcov/domain.hpp"

namespace swarmcov {

/// How the kernel sum is turned into a density.
enum class BlobNormalization {
  boundary_corrected,  // divide by the summed in-domain kernel masses
  robot_count,         // divide by N (the kernel density estimator form)
};

/// Swarm blob function sampled at the cell centers of a quadrature grid.
struct BlobField {
  Eigen::MatrixXd values;              // (nx, ny)
  std::vector<double> boundary_masses;  // in-domain mass of each robot's kernel
  double denominator = 0.0;

  double mass(const QuadratureGrid& grid) const { return values.sum() * grid.cell_area(); }
};

struct MetricResult {
  double e = 0.0;
  double e_hat = 0.0;  // L1 deficit where the blob field is at or below the target
  /// |blob mass - 1| + |target mass - 1| on the quadrature grid.
  double mass_defect = 0.0;
  int nx = 0;
  int ny = 0;
  std::size_t n_robots = 0;
  double delta = 0.0;
  KernelShape kernel = KernelShape::gaussian;
  std::string density_id;
};

/// In-domain mass of the kernel centered at x. Closed form for the Gaussian,
/// quadrature for the disc.
double boundary_mass(const ScaledKernel& k, const RectDomain& dom, Point x);

/// Throws EmptySwarm for N = 0 and InvalidInput for robots outside the grid's domain.
BlobField blob_function(const SwarmConfig& swarm,
                        const ScaledKernel& k,
                        const QuadratureGrid& grid,
                        BlobNormalization norm = BlobNormalization::boundary_corrected);

/// Error metric against target values already sampled on `grid`.
MetricResult error_metric(const BlobField& field, const Eigen::MatrixXd& target, const QuadratureGrid& grid);

MetricResult error_metric(const SwarmConfig& swarm,
                          const TargetDensity& rho,
                          const ScaledKernel& k,
                          const QuadratureGrid& grid,
                          BlobNormalization norm = BlobNormalization::boundary_corrected);

/// Robot configurations at increasing times with a constant robot count.
class TrajectorySeries {
public:
  TrajectorySeries() = default;
  /// Throws MalformedTrajectory on non-increasing times or a changing N.
  TrajectorySeries(std::vector<double> times, std::vector<SwarmConfig> frames);

  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  std::size_t n_robots() const { return frames_.empty() ? 0 : frames_.front().size(); }
  std::span<const double> times() const { return times_; }
  std::span<const SwarmConfig> frames() const { return frames_; }

  void push_back(double t, SwarmConfig frame);

private:
  std::vector<double> times_;
  std::vector<SwarmConfig> frames_;
};

/// L1 distance between the time-averaged blob field and the target.
double cumulative_error(const TrajectorySeries& traj,
                        const TargetDensity& rho,
                        const ScaledKernel& k,
                        const QuadratureGrid& grid);

/// rows x cols equal rectangles over a domain; cells are half-open with the
/// last row/column closed.
class Partition {
public:
  Partition(const RectDomain& domain, int cols, int rows);

  const RectDomain& domain() const { return domain_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  std::size_t size() const { return static_cast<std::size_t>(cols_) * rows_; }
  std::size_t region_of(Point p) const;

  std::vector<std::size_t> counts(const SwarmConfig& swarm) const;
  /// Region masses by a sub x sub midpoint rule inside each region, scaled so
  /// they sum to one.
  std::vector<double> target_masses(const TargetDensity& rho, int sub = 4) const;

private:
  RectDomain domain_;
  int cols_, rows_;
};

/// Sum over regions of |target mass - N_i / N|.
double discretization_metric(const SwarmConfig& swarm, const TargetDensity& rho, const Partition& part, int sub = 4);

}  // namespace swarmcov
