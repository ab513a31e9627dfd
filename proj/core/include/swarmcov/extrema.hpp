#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "swarmcov/domain.hpp"
#include "swarmcov/metric.hpp"

namespace swarmcov {

struct OptimizerSettings {
  int n_starts = 50;
  int max_iters = 2000;
  double initial_step = 1.0;
  double backtracking = 0.5;
  /// Stop once the objective changes by less than this (relative) over
  /// `stall_window` iterations.
  double tolerance = 1e-6;
  int stall_window = 10;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

enum class Sense { minimize, maximize };

std::string_view to_string(Sense s);

/// Error metric value together with its gradient in every robot position.
struct ObjectiveGradient {
  double e = 0.0;
  std::vector<Point> gradient;
};

/// Quadrature objective with the target cached on the grid. The analytic
/// gradient is a subgradient of the rectangle-rule objective, taking
/// sign(0) = 0 at cells where the blob field equals the target.
class ErrorObjective {
public:
  ErrorObjective(const TargetDensity& rho, const ScaledKernel& k, const QuadratureGrid& grid);

  const ScaledKernel& kernel() const { return kernel_; }
  const QuadratureGrid& grid() const { return grid_; }
  const RectDomain& domain() const { return grid_.domain(); }

  double value(const SwarmConfig& swarm) const;
  /// Analytic for the Gaussian kernel; throws UnsupportedGradient otherwise.
  ObjectiveGradient analytic(const SwarmConfig& swarm) const;
  /// Central differences with step h, usable with any kernel.
  ObjectiveGradient finite_difference(const SwarmConfig& swarm, double h = 1e-4) const;
  /// analytic() when available, finite_difference() otherwise.
  ObjectiveGradient value_and_gradient(const SwarmConfig& swarm) const;

private:
  ScaledKernel kernel_;
  QuadratureGrid grid_;
  Eigen::MatrixXd target_;
};

ObjectiveGradient objective_subgradient(const SwarmConfig& swarm,
                                        const TargetDensity& rho,
                                        const ScaledKernel& k,
                                        const QuadratureGrid& grid);

struct LocalResult {
  SwarmConfig config;
  double e = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // error metric after every accepted iterate
};

/// Projected gradient descent (on -e for Sense::maximize) with
/// Barzilai-Borwein trial steps and Armijo backtracking. Every iterate is
/// projected onto the domain and the objective is monotone in the requested
/// sense.
LocalResult local_minimize(const SwarmConfig& start,
                           const ErrorObjective& objective,
                           const OptimizerSettings& settings,
                           Sense sense);

LocalResult local_minimize(const SwarmConfig& start,
                           const TargetDensity& rho,
                           const ScaledKernel& k,
                           const QuadratureGrid& grid,
                           const OptimizerSettings& settings,
                           Sense sense);

struct StartRecord {
  std::size_t start_id = 0;
  Sense sense = Sense::minimize;
  std::uint64_t seed = 0;
  std::string layout;  // "uniform", "sampled" or "clustered"
  double initial = 0.0;
  double value = 0.0;
  int iterations = 0;
  bool failed = false;
  std::string error;
};

/// Multistart bounds. e_minus is an upper bound on the global minimum of the
/// error metric and e_plus a lower bound on its global maximum.
struct ExtremaResult {
  double e_minus = 0.0;
  double e_plus = 0.0;
  SwarmConfig argmin;
  SwarmConfig argmax;
  std::size_t n_starts = 0;
  std::vector<StartRecord> per_start;  // minimize runs, then maximize runs
};

/// Start 0 of each sense is informed (minimize: sampled from rho; maximize:
/// all robots coincident at a uniform point); the rest are uniform on the
/// domain. Throws OptimizationFailure if every start of a sense fails.
ExtremaResult multistart_extrema(const TargetDensity& rho,
                                 const ScaledKernel& k,
                                 const QuadratureGrid& grid,
                                 std::size_t n_robots,
                                 const OptimizerSettings& settings);

/// Minimize-only multistart used by the design sweep.
ExtremaResult multistart_minimum(const TargetDensity& rho,
                                 const ScaledKernel& k,
                                 const QuadratureGrid& grid,
                                 std::size_t n_robots,
                                 const OptimizerSettings& settings);

struct RelativeErrorReport {
  double e_observed = 0.0;
  double e_minus = 0.0;
  double e_plus = 0.0;
  double e_rel = 0.0;
  std::string assessment;  // "near_best" (< 10%), "intermediate", "poor" (>= 30%)
};

RelativeErrorReport relative_error(double e_observed, double e_minus, double e_plus);
RelativeErrorReport relative_error(double e_observed, const ExtremaResult& extrema);

struct DeltaRange {
  double lo = 0.0;  // 0 selects 0.1
  double hi = 0.0;  // 0 selects min(width, height) / 2
};

struct SweepRow {
  std::size_t n_robots = 0;
  double delta = 0.0;
  double e_min = 0.0;
  bool suspect = false;  // exceeds an earlier (smaller N) minimum by more than 2%
  bool failed = false;
  std::string error;
};

/// Minimum error metric per robot count; optionally optimizes delta by
/// golden-section search wrapped around the position multistart. Failures are
/// recorded per row without aborting the sweep.
std::vector<SweepRow> design_sweep(const TargetDensity& rho,
                                   const ScaledKernel& k,
                                   const QuadratureGrid& grid,
                                   std::span<const std::size_t> n_values,
                                   const OptimizerSettings& settings,
                                   bool optimize_delta,
                                   DeltaRange range = {});

}  // namespace swarmcov
