#include "swarmcov/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "swarmcov/errors.hpp"
#include "swarmcov/parallel.hpp"

namespace swarmcov {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Half-open cell index with the last cell closed.
int cell_index(double v, double lo, double h, int n)
{
  int i = static_cast<int>(std::floor((v - lo) / h));
  return std::clamp(i, 0, n - 1);
}

void check_shape(const RectDomain& domain, const DensityShape& shape)
{
  std::visit(overloaded{
                 [](const UniformDensity&) {},
                 [](const RingDensity& r) {
                   if (!(r.r1 >= 0.0 && r.r2 > r.r1))
                     throw InvalidDensity("ring density needs 0 <= r1 < r2");
                   if (!(r.rho0 > 0.0) || !(r.contrast > 0.0))
                     throw InvalidDensity("ring density needs rho0 > 0 and contrast > 0");
                 },
                 [](const GaussianMixtureDensity& g) {
                   if (g.weights.empty() || g.weights.size() != g.means.size() ||
                       g.weights.size() != g.sigmas.size())
                     throw InvalidDensity("gaussian mixture needs matching nonempty weights, means, sigmas");
                   for (std::size_t k = 0; k < g.weights.size(); ++k)
                     if (!(g.weights[k] > 0.0) || !(g.sigmas[k] > 0.0))
                       throw InvalidDensity("gaussian mixture weights and sigmas must be positive");
                 },
                 [&](const GridDensity& g) {
                   if (g.nx < 1 || g.ny < 1 ||
                       g.values.size() != static_cast<std::size_t>(g.nx) * g.ny)
                     throw InvalidDensity("grid density size does not match nx*ny");
                   if (!(g.bounds == domain))
                     throw InvalidDensity("grid density bounds differ from the scenario domain");
                   for (double v : g.values)
                     if (!(v > 0.0))
                       throw InvalidDensity("grid density values must be strictly positive");
                 },
             },
             shape);
}

}  // namespace

RectDomain::RectDomain(double x_min, double x_max, double y_min, double y_max)
  : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max)
{
  if (!(x_min < x_max) || !(y_min < y_max) || !std::isfinite(area()))
    throw InvalidInput("domain needs x_min < x_max and y_min < y_max");
}

bool RectDomain::contains(Point p) const
{
  return p.x >= x_min_ && p.x <= x_max_ && p.y >= y_min_ && p.y <= y_max_;
}

Point RectDomain::project(Point p) const
{
  return {std::clamp(p.x, x_min_, x_max_), std::clamp(p.y, y_min_, y_max_)};
}

std::string_view to_string(KernelShape shape)
{
  switch (shape) {
  case KernelShape::gaussian:
    return "gaussian";
  case KernelShape::indicator_disc:
    return "indicator_disc";
  }
  return "unknown";
}

KernelShape kernel_shape_from_string(std::string_view name)
{
  if (name == "gaussian")
    return KernelShape::gaussian;
  if (name == "indicator_disc" || name == "disc")
    return KernelShape::indicator_disc;
  throw InvalidInput("unknown kernel '" + std::string(name) + "'");
}

ScaledKernel::ScaledKernel(KernelShape shape, double delta) : shape_(shape), delta_(delta)
{
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw InvalidInput("kernel radius delta must be positive");
}

double ScaledKernel::radial(double r2) const
{
  const double d2 = delta_ * delta_;
  switch (shape_) {
  case KernelShape::gaussian:
    return std::exp(-0.5 * r2 / d2) / (2.0 * std::numbers::pi * d2);
  case KernelShape::indicator_disc:
    return r2 < d2 ? 1.0 / (std::numbers::pi * d2) : 0.0;
  }
  return 0.0;
}

QuadratureGrid::QuadratureGrid(const RectDomain& domain, int nx, int ny)
  : domain_(domain), nx_(nx), ny_(ny)
{
  if (nx < 1 || ny < 1)
    throw InvalidInput("quadrature grid needs at least one cell per axis");
  hx_ = domain.width() / nx;
  hy_ = domain.height() / ny;
}

QuadratureGrid QuadratureGrid::for_kernel(const RectDomain& domain, double delta)
{
  auto cells = [delta](double extent) {
    return std::max(100, static_cast<int>(std::ceil(2.0 * extent / delta)));
  };
  return QuadratureGrid(domain, cells(domain.width()), cells(domain.height()));
}

Eigen::VectorXd QuadratureGrid::xs() const
{
  Eigen::VectorXd v(nx_);
  for (int i = 0; i < nx_; ++i)
    v[i] = x(i);
  return v;
}

Eigen::VectorXd QuadratureGrid::ys() const
{
  Eigen::VectorXd v(ny_);
  for (int j = 0; j < ny_; ++j)
    v[j] = y(j);
  return v;
}

void SwarmConfig::require_inside(const RectDomain& domain) const
{
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    const Point& p = positions_[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !domain.contains(p))
      bad.push_back(i);
  }
  if (bad.empty())
    return;
  std::ostringstream msg;
  msg << bad.size() << " position(s) outside the domain at index";
  for (std::size_t k = 0; k < bad.size() && k < 20; ++k)
    msg << (k ? ", " : " ") << bad[k];
  if (bad.size() > 20)
    msg << ", ...";
  throw InvalidInput(msg.str());
}

TargetDensity::TargetDensity(const RectDomain& domain, DensityShape shape, std::string id)
  : domain_(domain), shape_(std::move(shape)), id_(std::move(id))
{
  check_shape(domain_, shape_);
  if (id_.empty()) {
    id_ = std::visit(overloaded{
                         [](const UniformDensity&) { return std::string("uniform"); },
                         [](const RingDensity&) { return std::string("ring"); },
                         [](const GaussianMixtureDensity&) { return std::string("gaussian_mixture"); },
                         [](const GridDensity&) { return std::string("grid"); },
                     },
                     shape_);
  }
}

TargetDensity TargetDensity::reference_ring()
{
  return TargetDensity(RectDomain(0.0, 48.0, 0.0, 70.0), RingDensity{}, "ring");
}

double TargetDensity::raw(Point z) const
{
  return std::visit(
      overloaded{
          [&](const UniformDensity&) { return 1.0 / domain_.area(); },
          [&](const RingDensity& r) {
            const Point c = domain_.center();
            const double dx = z.x - c.x;
            const double dy = z.y - c.y;
            const double q = dx * dx + dy * dy;
            return (q > r.r1 * r.r1 && q < r.r2 * r.r2) ? r.contrast * r.rho0 : r.rho0;
          },
          [&](const GaussianMixtureDensity& g) {
            double s = 0.0;
            for (std::size_t k = 0; k < g.weights.size(); ++k) {
              const double dx = z.x - g.means[k].x;
              const double dy = z.y - g.means[k].y;
              const double v = g.sigmas[k] * g.sigmas[k];
              s += g.weights[k] * std::exp(-0.5 * (dx * dx + dy * dy) / v) / (2.0 * std::numbers::pi * v);
            }
            return s;
          },
          [&](const GridDensity& g) {
            const int i = cell_index(z.x, g.bounds.x_min(), g.bounds.width() / g.nx, g.nx);
            const int j = cell_index(z.y, g.bounds.y_min(), g.bounds.height() / g.ny, g.ny);
            return g.values[static_cast<std::size_t>(j) * g.nx + i];
          },
      },
      shape_);
}

double TargetDensity::raw_upper_bound() const
{
  return std::visit(overloaded{
                        [&](const UniformDensity&) { return 1.0 / domain_.area(); },
                        [](const RingDensity& r) { return r.rho0 * std::max(1.0, r.contrast); },
                        [](const GaussianMixtureDensity& g) {
                          double s = 0.0;
                          for (std::size_t k = 0; k < g.weights.size(); ++k)
                            s += g.weights[k] / (2.0 * std::numbers::pi * g.sigmas[k] * g.sigmas[k]);
                          return s;
                        },
                        [](const GridDensity& g) { return *std::max_element(g.values.begin(), g.values.end()); },
                    },
                    shape_);
}

Eigen::MatrixXd TargetDensity::on_grid(const QuadratureGrid& grid) const
{
  Eigen::MatrixXd values(grid.nx(), grid.ny());
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i)
      values(i, j) = (*this)({grid.x(i), grid.y(j)});
  return values;
}

TargetDensity TargetDensity::normalized(const QuadratureGrid& grid) const
{
  if (!(grid.domain() == domain_))
    throw InvalidInput("quadrature grid does not tile the density's domain");
  TargetDensity out = *this;
  out.scale_ = 1.0;
  const double mass = density_mass(out, grid);
  out.scale_ = 1.0 / mass;
  out.normalized_ = true;
  return out;
}

double density_mass(const TargetDensity& rho, const QuadratureGrid& grid)
{
  double sum = 0.0;
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const double v = rho({grid.x(i), grid.y(j)});
      if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "density '" << rho.id() << "' is not strictly positive at (" << grid.x(i) << ", "
            << grid.y(j) << "): " << v;
        throw InvalidDensity(msg.str());
      }
      sum += v;
    }
  }
  return sum * grid.cell_area();
}

SwarmConfig sample_positions(const TargetDensity& rho, std::size_t n, std::mt19937_64& rng)
{
  if (n == 0)
    throw InvalidInput("sample_positions needs n >= 1");

  const RectDomain& dom = rho.domain();
  const double bound = rho.raw_upper_bound();
  // Expected acceptance is (raw mass) / (bound * area); the raw mass is estimated
  // cheaply so pathological densities fail fast instead of spinning.
  constexpr double kAcceptanceFloor = 1e-4;
  const QuadratureGrid probe(dom, 64, 64);
  double raw_mass = 0.0;
  for (int j = 0; j < probe.ny(); ++j)
    for (int i = 0; i < probe.nx(); ++i)
      raw_mass += rho.raw({probe.x(i), probe.y(j)});
  raw_mass *= probe.cell_area();
  const double expected = raw_mass / (bound * dom.area());
  if (!(expected >= kAcceptanceFloor)) {
    std::ostringstream msg;
    msg << "rejection sampler acceptance " << expected << " below floor " << kAcceptanceFloor
        << " for density '" << rho.id() << "' (bound " << bound << ", raw mass " << raw_mass << ")";
    throw SamplingFailure(msg.str());
  }

  std::uniform_real_distribution<double> ux(dom.x_min(), dom.x_max());
  std::uniform_real_distribution<double> uy(dom.y_min(), dom.y_max());
  std::uniform_real_distribution<double> uv(0.0, bound);

  std::vector<Point> pts;
  pts.reserve(n);
  const std::size_t max_tries = static_cast<std::size_t>(50.0 * n / expected) + 1000;
  std::size_t tries = 0;
  while (pts.size() < n) {
    if (++tries > max_tries) {
      std::ostringstream msg;
      msg << "rejection sampler accepted " << pts.size() << " of " << n << " after " << tries - 1
          << " proposals (expected acceptance " << expected << ")";
      throw SamplingFailure(msg.str());
    }
    Point p{ux(rng), uy(rng)};
    if (uv(rng) < rho.raw(p))
      pts.push_back(p);
  }
  return SwarmConfig(std::move(pts));
}

SwarmConfig sample_positions(const TargetDensity& rho, std::size_t n, std::uint64_t seed)
{
  auto rng = make_stream(seed, 0);
  return sample_positions(rho, n, rng);
}

SwarmConfig uniform_positions(const RectDomain& domain, std::size_t n, std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> ux(domain.x_min(), domain.x_max());
  std::uniform_real_distribution<double> uy(domain.y_min(), domain.y_max());
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.x = ux(rng);
    p.y = uy(rng);
  }
  return SwarmConfig(std::move(pts));
}

}  // namespace swarmcov
