#include "swarmcov/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kernel_terms.hpp"
#include "swarmcov/errors.hpp"

namespace swarmcov {

namespace {

double disc_boundary_mass(double delta, const RectDomain& dom, Point x)
{
  if (x.x - delta >= dom.x_min() && x.x + delta <= dom.x_max() && x.y - delta >= dom.y_min() &&
      x.y + delta <= dom.y_max())
    return 1.0;

  // Area of disc ∩ rectangle: integrate clipped vertical chords over the
  // angle s = x + delta sin(theta), which removes the sqrt endpoint singularity.
  const double lo = std::asin(std::clamp((dom.x_min() - x.x) / delta, -1.0, 1.0));
  const double hi = std::asin(std::clamp((dom.x_max() - x.x) / delta, -1.0, 1.0));
  if (!(hi > lo))
    return 0.0;
  constexpr int kPanels = 4096;  // even, Simpson
  const double h = (hi - lo) / kPanels;
  auto f = [&](double theta) {
    const double c = delta * std::cos(theta);
    const double overlap = std::min(x.y + c, dom.y_max()) - std::max(x.y - c, dom.y_min());
    return c * std::max(0.0, overlap);
  };
  double sum = f(lo) + f(hi);
  for (int k = 1; k < kPanels; ++k)
    sum += (k % 2 ? 4.0 : 2.0) * f(lo + k * h);
  const double area = sum * h / 3.0;
  return std::clamp(area / (std::numbers::pi * delta * delta), 0.0, 1.0);
}

void add_disc_kernels(const SwarmConfig& swarm, double delta, const QuadratureGrid& grid, Eigen::MatrixXd& out)
{
  const double height = 1.0 / (std::numbers::pi * delta * delta);
  const double d2 = delta * delta;
  const RectDomain& dom = grid.domain();
  for (const Point& p : swarm.positions()) {
    const int i0 = std::max(0, static_cast<int>(std::floor((p.x - delta - dom.x_min()) / grid.hx())));
    const int i1 = std::min(grid.nx() - 1, static_cast<int>(std::floor((p.x + delta - dom.x_min()) / grid.hx())));
    const int j0 = std::max(0, static_cast<int>(std::floor((p.y - delta - dom.y_min()) / grid.hy())));
    const int j1 = std::min(grid.ny() - 1, static_cast<int>(std::floor((p.y + delta - dom.y_min()) / grid.hy())));
    for (int j = j0; j <= j1; ++j) {
      const double dy = grid.y(j) - p.y;
      for (int i = i0; i <= i1; ++i) {
        const double dx = grid.x(i) - p.x;
        if (dx * dx + dy * dy < d2)
          out(i, j) += height;
      }
    }
  }
}

}  // namespace

double boundary_mass(const ScaledKernel& k, const RectDomain& dom, Point x)
{
  switch (k.shape()) {
  case KernelShape::gaussian:
    return detail::interval_mass(x.x, dom.x_min(), dom.x_max(), k.delta()).mass *
           detail::interval_mass(x.y, dom.y_min(), dom.y_max(), k.delta()).mass;
  case KernelShape::indicator_disc:
    return disc_boundary_mass(k.delta(), dom, x);
  }
  return 0.0;
}

BlobField blob_function(const SwarmConfig& swarm,
                        const ScaledKernel& k,
                        const QuadratureGrid& grid,
                        BlobNormalization norm)
{
  if (swarm.empty())
    throw EmptySwarm("blob function needs at least one robot");
  swarm.require_inside(grid.domain());

  BlobField field;
  if (k.shape() == KernelShape::gaussian) {
    field.values = detail::SeparableGaussian(swarm, k.delta(), grid).sum();
  } else {
    field.values = Eigen::MatrixXd::Zero(grid.nx(), grid.ny());
    add_disc_kernels(swarm, k.delta(), grid, field.values);
  }

  field.boundary_masses.reserve(swarm.size());
  for (const Point& p : swarm.positions())
    field.boundary_masses.push_back(boundary_mass(k, grid.domain(), p));

  if (norm == BlobNormalization::boundary_corrected) {
    double d = 0.0;
    for (double m : field.boundary_masses)
      d += m;
    field.denominator = d;
  } else {
    field.denominator = static_cast<double>(swarm.size());
  }
  field.values /= field.denominator;
  return field;
}

MetricResult error_metric(const BlobField& field, const Eigen::MatrixXd& target, const QuadratureGrid& grid)
{
  if (field.values.rows() != grid.nx() || field.values.cols() != grid.ny() || target.rows() != grid.nx() ||
      target.cols() != grid.ny())
    throw InvalidInput("blob field, target and grid dimensions differ");

  double abs_sum = 0.0;
  double deficit = 0.0;
  const Eigen::Index n = field.values.size();
  const double* f = field.values.data();
  const double* t = target.data();
  for (Eigen::Index c = 0; c < n; ++c) {
    const double d = f[c] - t[c];
    abs_sum += std::abs(d);
    if (d <= 0.0)
      deficit -= d;
  }
  const double area = grid.cell_area();

  MetricResult r;
  r.e = abs_sum * area;
  r.e_hat = deficit * area;
  r.mass_defect = std::abs(field.values.sum() * area - 1.0) + std::abs(target.sum() * area - 1.0);
  r.nx = grid.nx();
  r.ny = grid.ny();
  r.n_robots = field.boundary_masses.size();
  return r;
}

MetricResult error_metric(const SwarmConfig& swarm,
                          const TargetDensity& rho,
                          const ScaledKernel& k,
                          const QuadratureGrid& grid,
                          BlobNormalization norm)
{
  if (!(rho.domain() == grid.domain()))
    throw InvalidInput("quadrature grid does not tile the density's domain");
  MetricResult r = error_metric(blob_function(swarm, k, grid, norm), rho.on_grid(grid), grid);
  r.delta = k.delta();
  r.kernel = k.shape();
  r.density_id = rho.id();
  return r;
}

TrajectorySeries::TrajectorySeries(std::vector<double> times, std::vector<SwarmConfig> frames)
{
  if (times.size() != frames.size())
    throw MalformedTrajectory("trajectory needs one time per frame");
  for (std::size_t j = 0; j < times.size(); ++j)
    push_back(times[j], std::move(frames[j]));
}

void TrajectorySeries::push_back(double t, SwarmConfig frame)
{
  if (!std::isfinite(t))
    throw MalformedTrajectory("trajectory time is not finite");
  if (!times_.empty() && !(t > times_.back())) {
    std::ostringstream msg;
    msg << "trajectory times must be strictly increasing (" << times_.back() << " then " << t << ")";
    throw MalformedTrajectory(msg.str());
  }
  if (!frames_.empty() && frame.size() != frames_.front().size()) {
    std::ostringstream msg;
    msg << "frame at t=" << t << " has " << frame.size() << " robots, expected " << frames_.front().size();
    throw MalformedTrajectory(msg.str());
  }
  if (frame.empty())
    throw MalformedTrajectory("trajectory frame at t=" + std::to_string(t) + " has no robots");
  times_.push_back(t);
  frames_.push_back(std::move(frame));
}

double cumulative_error(const TrajectorySeries& traj,
                        const TargetDensity& rho,
                        const ScaledKernel& k,
                        const QuadratureGrid& grid)
{
  if (traj.empty())
    throw MalformedTrajectory("cumulative error needs at least one frame");
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(grid.nx(), grid.ny());
  for (const SwarmConfig& frame : traj.frames())
    mean += blob_function(frame, k, grid).values;
  mean /= static_cast<double>(traj.size());
  return (mean - rho.on_grid(grid)).cwiseAbs().sum() * grid.cell_area();
}

Partition::Partition(const RectDomain& domain, int cols, int rows) : domain_(domain), cols_(cols), rows_(rows)
{
  if (cols < 1 || rows < 1)
    throw InvalidInput("partition needs at least one row and one column");
}

std::size_t Partition::region_of(Point p) const
{
  const double hx = domain_.width() / cols_;
  const double hy = domain_.height() / rows_;
  const int i = std::clamp(static_cast<int>(std::floor((p.x - domain_.x_min()) / hx)), 0, cols_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((p.y - domain_.y_min()) / hy)), 0, rows_ - 1);
  return static_cast<std::size_t>(j) * cols_ + i;
}

std::vector<std::size_t> Partition::counts(const SwarmConfig& swarm) const
{
  std::vector<std::size_t> n(size(), 0);
  for (const Point& p : swarm.positions())
    ++n[region_of(p)];
  return n;
}

std::vector<double> Partition::target_masses(const TargetDensity& rho, int sub) const
{
  if (sub < 1)
    throw InvalidInput("partition sub-sampling must be >= 1");
  const double hx = domain_.width() / cols_;
  const double hy = domain_.height() / rows_;
  std::vector<double> m(size(), 0.0);
  double total = 0.0;
  for (int j = 0; j < rows_; ++j) {
    for (int i = 0; i < cols_; ++i) {
      double s = 0.0;
      for (int b = 0; b < sub; ++b)
        for (int a = 0; a < sub; ++a)
          s += rho({domain_.x_min() + (i + (a + 0.5) / sub) * hx, domain_.y_min() + (j + (b + 0.5) / sub) * hy});
      m[static_cast<std::size_t>(j) * cols_ + i] = s;
      total += s;
    }
  }
  for (double& v : m)
    v /= total;
  return m;
}

double discretization_metric(const SwarmConfig& swarm, const TargetDensity& rho, const Partition& part, int sub)
{
  if (swarm.empty())
    throw EmptySwarm("discretization metric needs at least one robot");
  if (!(part.domain() == rho.domain()))
    throw InvalidInput("partition does not tile the density's domain");
  swarm.require_inside(part.domain());
  const auto counts = part.counts(swarm);
  const auto masses = part.target_masses(rho, sub);
  const double n = static_cast<double>(swarm.size());
  double mu = 0.0;
  for (std::size_t r = 0; r < counts.size(); ++r)
    mu += std::abs(masses[r] - counts[r] / n);
  return mu;
}

}  // namespace swarmcov
