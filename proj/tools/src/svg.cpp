#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "swarmcov/errors.hpp"

namespace swarmcov::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

std::ofstream open_svg(const std::filesystem::path& path)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out)
    throw InvalidInput("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string escape(const std::string& s)
{
  std::string r;
  for (char c : s) {
    switch (c) {
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '&': r += "&amp;"; break;
      default: r += c;
    }
  }
  return r;
}

std::string shade(double t)
{
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255 * (1.0 - 0.9 * t)));
  const int g = static_cast<int>(std::lround(255 * (1.0 - 0.75 * t)));
  const int b = static_cast<int>(std::lround(255 * (1.0 - 0.45 * t)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

void write_heatmap_svg(const std::filesystem::path& path,
                       const QuadratureGrid& grid,
                       const Eigen::MatrixXd& values,
                       const std::vector<Point>& robots,
                       const std::string& title)
{
  const RectDomain& d = grid.domain();
  const double scale = std::min((kWidth - 2 * kMargin) / d.width(), (kHeight - 2 * kMargin) / d.height());
  const double w = d.width() * scale, h = d.height() * scale;
  auto px = [&](double x) { return kMargin + (x - d.x_min()) * scale; };
  auto py = [&](double y) { return kMargin + h - (y - d.y_min()) * scale; };

  const double vmax = values.size() ? values.maxCoeff() : 1.0;
  auto out = open_svg(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  out << "<text x=\"" << kMargin << "\" y=\"30\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title)
      << "</text>\n";
  const double cw = grid.hx() * scale, ch = grid.hy() * scale;
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i)
      out << "<rect x=\"" << px(grid.x(i) - 0.5 * grid.hx()) << "\" y=\"" << py(grid.y(j) + 0.5 * grid.hy())
          << "\" width=\"" << cw + 0.05 << "\" height=\"" << ch + 0.05 << "\" fill=\""
          << shade(vmax > 0 ? values(i, j) / vmax : 0.0) << "\"/>\n";
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const Point& p : robots)
    out << "<circle cx=\"" << px(p.x) << "\" cy=\"" << py(p.y) << "\" r=\"2\" fill=\"#d62728\"/>\n";
  out << "</svg>\n";
}

void write_curves_svg(const std::filesystem::path& path,
                      const std::vector<Curve>& curves,
                      const std::string& x_label,
                      const std::string& y_label,
                      const std::string& title)
{
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Curve& c : curves) {
    for (double v : c.x) {
      x0 = std::min(x0, v);
      x1 = std::max(x1, v);
    }
    for (double v : c.y) {
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  if (!(x1 > x0)) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pw = kWidth - 2 * kMargin, ph = kHeight - 2 * kMargin;
  auto px = [&](double x) { return kMargin + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kMargin + ph - (y - y0) / (y1 - y0) * ph; };

  auto out = open_svg(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\""
      << " font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<text x=\"" << kMargin << "\" y=\"30\" font-size=\"14\">" << escape(title) << "</text>\n";
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kMargin + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"15\" y=\"" << kMargin + ph / 2 << "\" transform=\"rotate(-90 15 " << kMargin + ph / 2
      << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + k * (x1 - x0) / 4, yv = y0 + k * (y1 - y0) / 4;
    out << "<text x=\"" << px(xv) << "\" y=\"" << kMargin + ph + 16 << "\" text-anchor=\"middle\">" << xv
        << "</text>\n";
    out << "<text x=\"" << kMargin - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << yv << "</text>\n";
  }
  double legend_y = kMargin + 14;
  for (const Curve& c : curves) {
    const std::size_t n = std::min(c.x.size(), c.y.size());
    if (c.markers) {
      for (std::size_t i = 0; i < n; ++i)
        out << "<circle cx=\"" << px(c.x[i]) << "\" cy=\"" << py(c.y[i]) << "\" r=\"2\" fill=\"" << c.color
            << "\"/>\n";
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << c.color << "\" points=\"";
      for (std::size_t i = 0; i < n; ++i)
        out << px(c.x[i]) << ',' << py(c.y[i]) << ' ';
      out << "\"/>\n";
    }
    if (!c.label.empty()) {
      out << "<text x=\"" << kMargin + pw - 8 << "\" y=\"" << legend_y << "\" text-anchor=\"end\" fill=\"" << c.color
          << "\">" << escape(c.label) << "</text>\n";
      legend_y += 16;
    }
  }
  out << "</svg>\n";
}

}  // namespace swarmcov::cli
