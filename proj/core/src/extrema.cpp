#include "swarmcov/extrema.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "kernel_terms.hpp"
#include "swarmcov/errors.hpp"
#include "swarmcov/parallel.hpp"

namespace swarmcov {

namespace {

double dot(std::span<const Point> a, std::span<const Point> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i].x * b[i].x + a[i].y * b[i].y;
  return s;
}

SwarmConfig clustered_positions(const RectDomain& domain, std::size_t n, std::mt19937_64& rng)
{
  const Point c = uniform_positions(domain, 1, rng)[0];
  return SwarmConfig(std::vector<Point>(n, c));
}

double sign(double v)
{
  return (v > 0.0) - (v < 0.0);
}

}  // namespace

void OptimizerSettings::validate() const
{
  if (n_starts < 1)
    throw InvalidInput("optimizer needs n_starts >= 1");
  if (max_iters < 1 || stall_window < 1)
    throw InvalidInput("optimizer needs max_iters >= 1 and stall_window >= 1");
  if (!(initial_step > 0.0) || !(tolerance > 0.0))
    throw InvalidInput("optimizer step and tolerance must be positive");
  if (!(backtracking > 0.0 && backtracking < 1.0))
    throw InvalidInput("backtracking factor must lie in (0, 1)");
}

std::string_view to_string(Sense s)
{
  return s == Sense::minimize ? "min" : "max";
}

ErrorObjective::ErrorObjective(const TargetDensity& rho, const ScaledKernel& k, const QuadratureGrid& grid)
  : kernel_(k), grid_(grid), target_(rho.on_grid(grid))
{
  if (!(rho.domain() == grid.domain()))
    throw InvalidInput("quadrature grid does not tile the density's domain");
}

double ErrorObjective::value(const SwarmConfig& swarm) const
{
  return error_metric(blob_function(swarm, kernel_, grid_), target_, grid_).e;
}

ObjectiveGradient ErrorObjective::analytic(const SwarmConfig& swarm) const
{
  if (kernel_.shape() != KernelShape::gaussian)
    throw UnsupportedGradient("analytic gradient needs the gaussian kernel; use finite differences");
  if (swarm.empty())
    throw EmptySwarm("objective needs at least one robot");
  swarm.require_inside(grid_.domain());

  const double delta = kernel_.delta();
  const RectDomain& dom = grid_.domain();
  const std::size_t n = swarm.size();
  const detail::SeparableGaussian g(swarm, delta, grid_);

  std::vector<detail::IntervalMass> mx(n), my(n);
  double denom = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    mx[r] = detail::interval_mass(swarm[r].x, dom.x_min(), dom.x_max(), delta);
    my[r] = detail::interval_mass(swarm[r].y, dom.y_min(), dom.y_max(), delta);
    denom += mx[r].mass * my[r].mass;
  }

  const Eigen::MatrixXd field = g.sum() / denom;
  const Eigen::MatrixXd diff = field - target_;
  const Eigen::MatrixXd s = diff.unaryExpr([](double v) { return sign(v); });
  const double area = grid_.cell_area();

  ObjectiveGradient out;
  out.e = diff.cwiseAbs().sum() * area;
  // d e / d D, from the shared denominator.
  const double shared = (s.array() * field.array()).sum() * area / denom;

  const Eigen::MatrixXd s_gy = s * g.gy;               // (nx, N)
  const Eigen::MatrixXd s_gx = s.transpose() * g.gx;   // (ny, N)
  const Eigen::VectorXd xs = grid_.xs();
  const Eigen::VectorXd ys = grid_.ys();

  out.gradient.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto col = static_cast<Eigen::Index>(r);
    // d/dp of phi((x - p) / delta) / delta is the same factor times (x - p) / delta^2.
    const auto dgx = g.gx.col(col).array() * (xs.array() - swarm[r].x) / (delta * delta);
    const auto dgy = g.gy.col(col).array() * (ys.array() - swarm[r].y) / (delta * delta);
    const double tx = (dgx * s_gy.col(col).array()).sum() * area / denom;
    const double ty = (dgy * s_gx.col(col).array()).sum() * area / denom;
    out.gradient[r].x = tx - shared * mx[r].dmass * my[r].mass;
    out.gradient[r].y = ty - shared * mx[r].mass * my[r].dmass;
  }
  return out;
}

ObjectiveGradient ErrorObjective::finite_difference(const SwarmConfig& swarm, double h) const
{
  ObjectiveGradient out;
  out.e = value(swarm);
  out.gradient.resize(swarm.size());
  const RectDomain& dom = grid_.domain();
  SwarmConfig probe = swarm;
  auto& pos = probe.mutable_positions();
  for (std::size_t r = 0; r < swarm.size(); ++r) {
    for (int axis = 0; axis < 2; ++axis) {
      double& coord = axis == 0 ? pos[r].x : pos[r].y;
      const double lo_bound = axis == 0 ? dom.x_min() : dom.y_min();
      const double hi_bound = axis == 0 ? dom.x_max() : dom.y_max();
      const double base = coord;
      const double hi = std::min(base + h, hi_bound);
      const double lo = std::max(base - h, lo_bound);
      coord = hi;
      const double f_hi = value(probe);
      coord = lo;
      const double f_lo = value(probe);
      coord = base;
      const double d = hi > lo ? (f_hi - f_lo) / (hi - lo) : 0.0;
      (axis == 0 ? out.gradient[r].x : out.gradient[r].y) = d;
    }
  }
  return out;
}

ObjectiveGradient ErrorObjective::value_and_gradient(const SwarmConfig& swarm) const
{
  if (kernel_.shape() == KernelShape::gaussian)
    return analytic(swarm);
  return finite_difference(swarm);
}

ObjectiveGradient objective_subgradient(const SwarmConfig& swarm,
                                        const TargetDensity& rho,
                                        const ScaledKernel& k,
                                        const QuadratureGrid& grid)
{
  return ErrorObjective(rho, k, grid).analytic(swarm);
}

LocalResult local_minimize(const SwarmConfig& start,
                           const ErrorObjective& objective,
                           const OptimizerSettings& settings,
                           Sense sense)
{
  settings.validate();
  start.require_inside(objective.domain());
  const double sgn = sense == Sense::minimize ? 1.0 : -1.0;
  const RectDomain& dom = objective.domain();

  auto evaluate = [&](const SwarmConfig& x) {
    ObjectiveGradient og = objective.value_and_gradient(x);
    if (!std::isfinite(og.e)) {
      std::ostringstream msg;
      msg << "non-finite objective (" << og.e << ") for " << x.size() << " robots";
      throw OptimizationFailure(msg.str());
    }
    for (Point& p : og.gradient) {
      p.x *= sgn;
      p.y *= sgn;
    }
    return og;
  };

  LocalResult out;
  SwarmConfig x = start;
  ObjectiveGradient cur = evaluate(x);
  out.history.push_back(cur.e);
  double step = settings.initial_step;
  constexpr double kArmijo = 1e-4;
  const double min_step = 1e-12 * settings.initial_step;

  for (int it = 1; it <= settings.max_iters; ++it) {
    double t = step;
    SwarmConfig trial;
    ObjectiveGradient next;
    std::vector<Point> dx(x.size());
    bool accepted = false;
    while (true) {
      std::vector<Point> pts(x.size());
      double max_move = 0.0;
      for (std::size_t r = 0; r < x.size(); ++r) {
        pts[r] = dom.project({x[r].x - t * cur.gradient[r].x, x[r].y - t * cur.gradient[r].y});
        dx[r] = {pts[r].x - x[r].x, pts[r].y - x[r].y};
        max_move = std::max({max_move, std::abs(dx[r].x), std::abs(dx[r].y)});
      }
      if (max_move == 0.0)
        break;  // projected gradient vanishes: fixed point
      trial = SwarmConfig(std::move(pts));
      next = evaluate(trial);
      if (sgn * next.e <= sgn * cur.e + kArmijo * dot(cur.gradient, dx)) {
        accepted = true;
        break;
      }
      t *= settings.backtracking;
      if (t < min_step)
        break;
    }
    if (!accepted) {
      out.converged = true;
      break;
    }

    std::vector<Point> dg(x.size());
    for (std::size_t r = 0; r < x.size(); ++r)
      dg[r] = {next.gradient[r].x - cur.gradient[r].x, next.gradient[r].y - cur.gradient[r].y};
    const double sy = dot(dx, dg);
    const double ss = dot(dx, dx);
    step = sy > 0.0 ? ss / sy : 2.0 * t;
    step = std::clamp(step, 1e-6 * settings.initial_step, 1e8 * settings.initial_step);

    x = std::move(trial);
    cur = std::move(next);
    out.history.push_back(cur.e);
    out.iterations = it;

    const std::size_t w = static_cast<std::size_t>(settings.stall_window);
    if (out.history.size() > w) {
      const double now = out.history.back();
      const double then = out.history[out.history.size() - 1 - w];
      if (std::abs(then - now) <= settings.tolerance * std::max(std::abs(now), 1e-12)) {
        out.converged = true;
        break;
      }
    }
  }
  out.e = cur.e;
  out.config = std::move(x);
  return out;
}

LocalResult local_minimize(const SwarmConfig& start,
                           const TargetDensity& rho,
                           const ScaledKernel& k,
                           const QuadratureGrid& grid,
                           const OptimizerSettings& settings,
                           Sense sense)
{
  return local_minimize(start, ErrorObjective(rho, k, grid), settings, sense);
}

namespace {

ExtremaResult run_multistart(const TargetDensity& rho,
                             const ScaledKernel& k,
                             const QuadratureGrid& grid,
                             std::size_t n_robots,
                             const OptimizerSettings& settings,
                             bool with_max)
{
  settings.validate();
  if (n_robots == 0)
    throw EmptySwarm("multistart needs at least one robot");
  const ErrorObjective objective(rho, k, grid);
  const std::size_t n = static_cast<std::size_t>(settings.n_starts);
  const std::size_t tasks = with_max ? 2 * n : n;

  std::vector<StartRecord> records(tasks);
  std::vector<SwarmConfig> finals(tasks);
  parallel_for(tasks, settings.threads, [&](std::size_t t) {
    StartRecord& rec = records[t];
    rec.start_id = t % n;
    rec.sense = t < n ? Sense::minimize : Sense::maximize;
    rec.seed = t;
    auto rng = make_stream(settings.seed, t);
    try {
      SwarmConfig start;
      if (rec.start_id == 0 && rec.sense == Sense::minimize) {
        rec.layout = "sampled";
        start = sample_positions(rho, n_robots, rng);
      } else if (rec.start_id == 0) {
        rec.layout = "clustered";
        start = clustered_positions(grid.domain(), n_robots, rng);
      } else {
        rec.layout = "uniform";
        start = uniform_positions(grid.domain(), n_robots, rng);
      }
      rec.initial = objective.value(start);
      LocalResult res = local_minimize(start, objective, settings, rec.sense);
      rec.value = res.e;
      rec.iterations = res.iterations;
      finals[t] = std::move(res.config);
    } catch (const Error& e) {
      rec.failed = true;
      rec.error = e.what();
    }
  });

  ExtremaResult out;
  out.n_starts = n;
  const double inf = std::numeric_limits<double>::infinity();
  double best_min = inf, best_max = -inf;
  std::size_t arg_min = tasks, arg_max = tasks;
  for (std::size_t t = 0; t < tasks; ++t) {
    const StartRecord& rec = records[t];
    if (rec.failed)
      continue;
    if (rec.sense == Sense::minimize && rec.value < best_min) {
      best_min = rec.value;
      arg_min = t;
    }
    if (rec.sense == Sense::maximize && rec.value > best_max) {
      best_max = rec.value;
      arg_max = t;
    }
  }
  if (arg_min == tasks || (with_max && arg_max == tasks)) {
    std::string first_error;
    for (const auto& rec : records)
      if (rec.failed) {
        first_error = rec.error;
        break;
      }
    throw OptimizationFailure("all multistart runs failed: " + first_error);
  }
  out.e_minus = best_min;
  out.argmin = finals[arg_min];
  if (with_max) {
    out.e_plus = best_max;
    out.argmax = finals[arg_max];
  }
  out.per_start = std::move(records);
  return out;
}

}  // namespace

ExtremaResult multistart_extrema(const TargetDensity& rho,
                                 const ScaledKernel& k,
                                 const QuadratureGrid& grid,
                                 std::size_t n_robots,
                                 const OptimizerSettings& settings)
{
  return run_multistart(rho, k, grid, n_robots, settings, true);
}

ExtremaResult multistart_minimum(const TargetDensity& rho,
                                 const ScaledKernel& k,
                                 const QuadratureGrid& grid,
                                 std::size_t n_robots,
                                 const OptimizerSettings& settings)
{
  return run_multistart(rho, k, grid, n_robots, settings, false);
}

RelativeErrorReport relative_error(double e_observed, double e_minus, double e_plus)
{
  if (!(e_plus > e_minus)) {
    std::ostringstream msg;
    msg << "degenerate extrema: e_plus (" << e_plus << ") must exceed e_minus (" << e_minus << ")";
    throw DegenerateBenchmark(msg.str());
  }
  RelativeErrorReport r;
  r.e_observed = e_observed;
  r.e_minus = e_minus;
  r.e_plus = e_plus;
  r.e_rel = (e_observed - e_minus) / (e_plus - e_minus);
  if (r.e_rel < 0.10)
    r.assessment = "near_best";
  else if (r.e_rel >= 0.30)
    r.assessment = "poor";
  else
    r.assessment = "intermediate";
  return r;
}

RelativeErrorReport relative_error(double e_observed, const ExtremaResult& extrema)
{
  return relative_error(e_observed, extrema.e_minus, extrema.e_plus);
}

std::vector<SweepRow> design_sweep(const TargetDensity& rho,
                                   const ScaledKernel& k,
                                   const QuadratureGrid& grid,
                                   std::span<const std::size_t> n_values,
                                   const OptimizerSettings& settings,
                                   bool optimize_delta,
                                   DeltaRange range)
{
  if (n_values.empty())
    throw InvalidInput("design sweep needs at least one robot count");
  const RectDomain& dom = grid.domain();
  const double lo = range.lo > 0.0 ? range.lo : 0.1;
  const double hi = range.hi > 0.0 ? range.hi : 0.5 * std::min(dom.width(), dom.height());
  if (!(hi > lo))
    throw InvalidInput("design sweep delta range is empty");

  std::vector<std::size_t> ns(n_values.begin(), n_values.end());
  std::sort(ns.begin(), ns.end());

  std::vector<SweepRow> rows;
  double best_so_far = std::numeric_limits<double>::infinity();
  for (std::size_t n : ns) {
    SweepRow row;
    row.n_robots = n;
    try {
      auto minimum_at = [&](double delta) {
        return multistart_minimum(rho, k.with_delta(delta), grid, n, settings).e_minus;
      };
      row.delta = k.delta();
      row.e_min = minimum_at(k.delta());
      if (optimize_delta) {
        // Golden section on the (noisy, empirically unimodal) map delta -> e_minus.
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = lo, b = hi;
        double c = b - invphi * (b - a), d = a + invphi * (b - a);
        double fc = minimum_at(c), fd = minimum_at(d);
        auto consider = [&](double delta, double f) {
          if (f < row.e_min) {
            row.e_min = f;
            row.delta = delta;
          }
        };
        consider(c, fc);
        consider(d, fd);
        while (b - a > 0.02 * (hi - lo)) {
          if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = minimum_at(c);
            consider(c, fc);
          } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = minimum_at(d);
            consider(d, fd);
          }
        }
      }
      row.suspect = row.e_min > 1.02 * best_so_far;
      best_so_far = std::min(best_so_far, row.e_min);
    } catch (const Error& e) {
      row.failed = true;
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace swarmcov
