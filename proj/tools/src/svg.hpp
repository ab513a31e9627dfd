#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "swarmcov/domain.hpp"

namespace swarmcov::cli {

struct Curve {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool markers = false;  // draw points instead of a polyline
};

/// Cell values as colored rectangles (white to dark blue), robots as dots.
void write_heatmap_svg(const std::filesystem::path& path,
                       const QuadratureGrid& grid,
                       const Eigen::MatrixXd& values,
                       const std::vector<Point>& robots,
                       const std::string& title);

void write_curves_svg(const std::filesystem::path& path,
                      const std::vector<Curve>& curves,
                      const std::string& x_label,
                      const std::string& y_label,
                      const std::string& title);

}  // namespace swarmcov::cli
