#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "swarmcov/domain.hpp"
#include "swarmcov/metric.hpp"
#include "swarmcov/pdf_bench.hpp"
#include "swarmcov/sim.hpp"

namespace swarmcov {

/// Everything needed to evaluate the metric for one setting. The density is
/// normalized on `grid`.
struct Scenario {
  std::string id;
  RectDomain domain;
  TargetDensity density;
  ScaledKernel kernel;
  QuadratureGrid grid;
  std::uint64_t seed = 1;
};

/// Ring target on the 48 x 70 domain with a gaussian kernel of radius 2.
Scenario reference_ring_scenario();

/// Scenario descriptor:
///
///   {
///     "id": "ring",
///     "domain": {"x_min": 0, "x_max": 48, "y_min": 0, "y_max": 70},
///     "density": {"type": "ring", "r1": 11.4, "r2": 20.6, "rho0": 2.79e-5, "contrast": 36},
///     "kernel": "gaussian",
///     "delta": 2.0,
///     "grid": {"nx": 100, "ny": 100},
///     "seed": 1
///   }
///
/// Density types: uniform, ring, gaussian_mixture {weights, means: [[x, y]],
/// sigmas}, grid {csv: path relative to the descriptor}. "grid" and "seed"
/// are optional; unknown keys are rejected.
Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);
/// Inverse of parse_scenario for non-grid densities.
std::string scenario_to_json(const Scenario& s);

/// Grid density CSV: a header line `nx,ny,x_min,x_max,y_min,y_max`, one line
/// with those values, then ny rows of nx comma-separated values (row j at y
/// index j, from y_min upward).
GridDensity read_grid_density_csv(const std::filesystem::path& path);
void write_grid_density_csv(const std::filesystem::path& path, const GridDensity& g);

/// Positions CSV: header `x,y` or `x,y,t`, one robot per row, frames grouped
/// by t in increasing order.
SwarmConfig read_positions_csv(const std::filesystem::path& path);
TrajectorySeries read_trajectory_csv(const std::filesystem::path& path);
/// As above, rejecting rows outside `dom` with their line number.
SwarmConfig read_positions_csv(const std::filesystem::path& path, const RectDomain& dom);
TrajectorySeries read_trajectory_csv(const std::filesystem::path& path, const RectDomain& dom);
void write_positions_csv(const std::filesystem::path& path, const SwarmConfig& swarm);
void write_trajectory_csv(const std::filesystem::path& path, const TrajectorySeries& traj);

/// Sample-set CSV: `# key=value` metadata comments, an `e` header, one value per row.
ErrorSampleSet read_samples_csv(const std::filesystem::path& path);
void write_samples_csv(const std::filesystem::path& path, const ErrorSampleSet& samples);

/// Field CSV in long form `x,y,value` at cell centers.
void write_field_csv(const std::filesystem::path& path, const QuadratureGrid& grid, const Eigen::MatrixXd& values);
/// Returns (nx, ny) values; the grid must match the file's cell centers.
Eigen::MatrixXd read_field_csv(const std::filesystem::path& path, const QuadratureGrid& grid);

/// Two-column CSV with a header, e.g. `t,e` or `z,F`.
void write_columns_csv(const std::filesystem::path& path,
                       std::string_view header_a,
                       std::string_view header_b,
                       const std::vector<double>& a,
                       const std::vector<double>& b);
ErrorSeries read_error_series_csv(const std::filesystem::path& path);

}  // namespace swarmcov
