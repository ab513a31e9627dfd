#include "swarmcov/sim.hpp"

#include <cmath>

#include "swarmcov/errors.hpp"
#include "swarmcov/parallel.hpp"

namespace swarmcov {

void ControllerParams::validate() const
{
  if (!(step_scale > 0.0))
    throw InvalidInput("controller step scale must be positive");
  if (n_steps < 1 || stride < 1)
    throw InvalidInput("controller needs n_steps >= 1 and stride >= 1");
}

TrajectorySeries run_trajectory(const TargetDensity& rho,
                                const RectDomain& dom,
                                std::size_t n_robots,
                                const ControllerParams& params)
{
  params.validate();
  if (n_robots == 0)
    throw EmptySwarm("controller needs at least one robot");

  std::vector<Point> pos;
  if (params.start) {
    if (params.start->size() != n_robots)
      throw InvalidInput("controller start configuration has the wrong robot count");
    params.start->require_inside(dom);
    pos.assign(params.start->positions().begin(), params.start->positions().end());
  } else {
    const Point c = params.cluster_at.value_or(
        Point{dom.x_min() + 0.05 * dom.width(), dom.y_min() + 0.05 * dom.height()});
    if (!dom.contains(c))
      throw InvalidInput("controller cluster point lies outside the domain");
    pos.assign(n_robots, c);
  }

  const std::size_t n_frames = params.n_steps / params.stride + 1;
  std::vector<std::vector<Point>> frames(n_frames, std::vector<Point>(n_robots));

  // Robots are independent, so each walks its whole path on its own stream.
  for (std::size_t r = 0; r < n_robots; ++r) {
    auto rng = make_stream(params.seed, r);
    std::normal_distribution<double> step(0.0, params.step_scale);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Point p = pos[r];
    double dens = rho.raw(p);
    frames[0][r] = p;
    for (std::size_t s = 1; s <= params.n_steps; ++s) {
      const Point q{p.x + step(rng), p.y + step(rng)};
      const double accept_draw = u(rng);
      if (dom.contains(q)) {
        const double dq = rho.raw(q);
        if (accept_draw * dens < dq) {
          p = q;
          dens = dq;
        }
      }
      if (s % params.stride == 0)
        frames[s / params.stride][r] = p;
    }
  }

  TrajectorySeries out;
  for (std::size_t f = 0; f < n_frames; ++f)
    out.push_back(static_cast<double>(f * params.stride), SwarmConfig(std::move(frames[f])));
  return out;
}

ErrorSeries error_time_series(const TrajectorySeries& traj,
                              const TargetDensity& rho,
                              const ScaledKernel& k,
                              const QuadratureGrid& grid,
                              int threads)
{
  if (traj.empty())
    throw MalformedTrajectory("error time series needs a nonempty trajectory");
  const Eigen::MatrixXd target = rho.on_grid(grid);
  ErrorSeries out;
  out.t.assign(traj.times().begin(), traj.times().end());
  out.e.resize(traj.size());
  parallel_for(traj.size(), threads, [&](std::size_t j) {
    out.e[j] = error_metric(blob_function(traj.frames()[j], k, grid), target, grid).e;
  });
  return out;
}

}  // namespace swarmcov
