#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace swarmcov {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
class RectDomain {
public:
  RectDomain(double x_min, double x_max, double y_min, double y_max);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  double width() const { return x_max_ - x_min_; }
  double height() const { return y_max_ - y_min_; }
  double area() const { return width() * height(); }
  Point center() const { return {0.5 * (x_min_ + x_max_), 0.5 * (y_min_ + y_max_)}; }

  bool contains(Point p) const;
  /// Componentwise projection onto the closed rectangle.
  Point project(Point p) const;

  friend bool operator==(const RectDomain&, const RectDomain&) = default;

private:
  double x_min_, x_max_, y_min_, y_max_;
};

enum class KernelShape { gaussian, indicator_disc };

std::string_view to_string(KernelShape shape);
KernelShape kernel_shape_from_string(std::string_view name);

/// Unit-mass radially symmetric kernel K scaled to K^delta(z) = K(z / delta) / delta^2.
class ScaledKernel {
public:
  ScaledKernel(KernelShape shape, double delta);

  KernelShape shape() const { return shape_; }
  double delta() const { return delta_; }

  double operator()(Point z) const { return radial(z.x * z.x + z.y * z.y); }
  /// Kernel value as a function of the squared distance from its center.
  double radial(double r2) const;

  ScaledKernel with_delta(double delta) const { return {shape_, delta}; }

private:
  KernelShape shape_;
  double delta_;
};

/// Midpoint rectangle-rule grid: nx by ny equal cells tiling a domain.
class QuadratureGrid {
public:
  QuadratureGrid(const RectDomain& domain, int nx, int ny);

  /// Two cells per kernel radius along each axis, never fewer than 100.
  static QuadratureGrid for_kernel(const RectDomain& domain, double delta);

  const RectDomain& domain() const { return domain_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double cell_area() const { return hx_ * hy_; }
  double x(int i) const { return domain_.x_min() + (i + 0.5) * hx_; }
  double y(int j) const { return domain_.y_min() + (j + 0.5) * hy_; }

  Eigen::VectorXd xs() const;
  Eigen::VectorXd ys() const;

private:
  RectDomain domain_;
  int nx_, ny_;
  double hx_, hy_;
};

class SwarmConfig {
public:
  SwarmConfig() = default;
  explicit SwarmConfig(std::vector<Point> positions) : positions_(std::move(positions)) {}

  std::size_t size() const { return positions_.size(); }
  bool empty() const { return positions_.empty(); }
  std::span<const Point> positions() const { return positions_; }
  std::vector<Point>& mutable_positions() { return positions_; }
  const Point& operator[](std::size_t i) const { return positions_[i]; }

  /// Throws InvalidInput naming every robot index outside the domain.
  void require_inside(const RectDomain& domain) const;

  friend bool operator==(const SwarmConfig&, const SwarmConfig&) = default;

private:
  std::vector<Point> positions_;
};

struct UniformDensity {};

/// Annulus of elevated density on a constant background, centered in the domain.
struct RingDensity {
  double r1 = 11.4;
  double r2 = 20.6;
  double rho0 = 2.79e-5;
  double contrast = 36.0;
};

struct GaussianMixtureDensity {
  std::vector<double> weights;
  std::vector<Point> means;
  std::vector<double> sigmas;
};

/// Piecewise-constant density sampled on its own cell grid.
struct GridDensity {
  RectDomain bounds;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;  // row-major, row j holds the cells at y index j
};

using DensityShape = std::variant<UniformDensity, RingDensity, GaussianMixtureDensity, GridDensity>;

class TargetDensity {
public:
  TargetDensity(const RectDomain& domain, DensityShape shape, std::string id = {});

  /// The 48 x 70 ring scenario used throughout the benchmarks.
  static TargetDensity reference_ring();

  const RectDomain& domain() const { return domain_; }
  const DensityShape& shape() const { return shape_; }
  const std::string& id() const { return id_; }
  double normalization_constant() const { return scale_; }
  bool normalized() const { return normalized_; }

  /// Density before the normalization constant is applied.
  double raw(Point z) const;
  double operator()(Point z) const { return scale_ * raw(z); }
  /// Upper bound of raw() over the domain.
  double raw_upper_bound() const;

  Eigen::MatrixXd on_grid(const QuadratureGrid& grid) const;

  /// Copy whose rectangle-rule mass on `grid` is one.
  TargetDensity normalized(const QuadratureGrid& grid) const;

private:
  RectDomain domain_;
  DensityShape shape_;
  std::string id_;
  double scale_ = 1.0;
  bool normalized_ = false;
};

/// Rectangle-rule mass of rho (with its current constant). Throws InvalidDensity
/// if any cell-center value is not strictly positive.
double density_mass(const TargetDensity& rho, const QuadratureGrid& grid);

/// Rejection sampling with a uniform proposal over the domain.
SwarmConfig sample_positions(const TargetDensity& rho, std::size_t n, std::mt19937_64& rng);
SwarmConfig sample_positions(const TargetDensity& rho, std::size_t n, std::uint64_t seed);

SwarmConfig uniform_positions(const RectDomain& domain, std::size_t n, std::mt19937_64& rng);

}  // namespace swarmcov
