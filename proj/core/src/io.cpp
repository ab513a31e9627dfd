#include "swarmcov/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "swarmcov/errors.hpp"

namespace swarmcov {

namespace {

using nlohmann::json;

std::string location(const std::filesystem::path& path, std::size_t line)
{
  return path.string() + ":" + std::to_string(line) + ": ";
}

std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line)
{
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+')
    ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw InvalidInput(location(path, line) + "expected a finite number, got '" + s + "'");
  return v;
}

std::ifstream open_in(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw InvalidInput("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out)
    throw InvalidInput("cannot open '" + path.string() + "' for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

// Rejects keys outside `allowed` so typos in descriptors fail loudly.
void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where)
{
  if (!obj.is_object())
    throw InvalidInput("scenario: '" + where + "' must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.count(key))
      throw InvalidInput("scenario: unknown key '" + key + "' in " + where);
}

double number(const json& obj, const char* key, const std::string& where)
{
  if (!obj.contains(key))
    throw InvalidInput(std::string("scenario: missing '") + key + "' in " + where);
  const json& v = obj.at(key);
  if (!v.is_number())
    throw InvalidInput(std::string("scenario: '") + key + "' in " + where + " must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where)
{
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

TargetDensity parse_density(const json& d, const RectDomain& dom, const std::string& id,
                            const std::filesystem::path& base_dir)
{
  if (!d.is_object() || !d.contains("type") || !d.at("type").is_string())
    throw InvalidInput("scenario: density needs a string 'type'");
  const std::string type = d.at("type").get<std::string>();
  if (type == "uniform") {
    check_keys(d, {"type"}, "density");
    return TargetDensity(dom, UniformDensity{}, id);
  }
  if (type == "ring") {
    check_keys(d, {"type", "r1", "r2", "rho0", "contrast"}, "density");
    RingDensity r;
    r.r1 = number_or(d, "r1", r.r1, "density");
    r.r2 = number_or(d, "r2", r.r2, "density");
    r.rho0 = number_or(d, "rho0", r.rho0, "density");
    r.contrast = number_or(d, "contrast", r.contrast, "density");
    return TargetDensity(dom, r, id);
  }
  if (type == "gaussian_mixture") {
    check_keys(d, {"type", "weights", "means", "sigmas"}, "density");
    GaussianMixtureDensity g;
    try {
      g.weights = d.at("weights").get<std::vector<double>>();
      g.sigmas = d.at("sigmas").get<std::vector<double>>();
      for (const auto& m : d.at("means")) {
        const auto xy = m.get<std::vector<double>>();
        if (xy.size() != 2)
          throw InvalidInput("scenario: gaussian_mixture means must be [x, y] pairs");
        g.means.push_back({xy[0], xy[1]});
      }
    } catch (const json::exception& e) {
      throw InvalidInput(std::string("scenario: malformed gaussian_mixture: ") + e.what());
    }
    return TargetDensity(dom, std::move(g), id);
  }
  if (type == "grid") {
    check_keys(d, {"type", "csv"}, "density");
    if (!d.contains("csv") || !d.at("csv").is_string())
      throw InvalidInput("scenario: grid density needs a 'csv' path");
    std::filesystem::path p = d.at("csv").get<std::string>();
    if (p.is_relative())
      p = base_dir / p;
    return TargetDensity(dom, read_grid_density_csv(p), id);
  }
  throw InvalidInput("scenario: unknown density type '" + type + "'");
}

}  // namespace

Scenario reference_ring_scenario()
{
  const RectDomain dom(0.0, 48.0, 0.0, 70.0);
  const ScaledKernel k(KernelShape::gaussian, 2.0);
  const QuadratureGrid grid = QuadratureGrid::for_kernel(dom, k.delta());
  return Scenario{"ring", dom, TargetDensity(dom, RingDensity{}, "ring").normalized(grid), k, grid, 1};
}

Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir)
{
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("scenario: ") + e.what());
  }
  check_keys(j, {"id", "domain", "density", "kernel", "delta", "grid", "seed"}, "scenario");

  std::string id = "scenario";
  if (j.contains("id")) {
    if (!j.at("id").is_string())
      throw InvalidInput("scenario: 'id' must be a string");
    id = j.at("id").get<std::string>();
  }
  if (!j.contains("domain"))
    throw InvalidInput("scenario: missing 'domain'");
  const json& dj = j.at("domain");
  check_keys(dj, {"x_min", "x_max", "y_min", "y_max"}, "domain");
  const RectDomain dom(number(dj, "x_min", "domain"), number(dj, "x_max", "domain"), number(dj, "y_min", "domain"),
                       number(dj, "y_max", "domain"));

  if (!j.contains("density"))
    throw InvalidInput("scenario: missing 'density'");
  TargetDensity rho = parse_density(j.at("density"), dom, id, base_dir);

  KernelShape shape = KernelShape::gaussian;
  if (j.contains("kernel")) {
    if (!j.at("kernel").is_string())
      throw InvalidInput("scenario: 'kernel' must be a string");
    shape = kernel_shape_from_string(j.at("kernel").get<std::string>());
  }
  const ScaledKernel k(shape, number(j, "delta", "scenario"));

  QuadratureGrid grid = QuadratureGrid::for_kernel(dom, k.delta());
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, {"nx", "ny"}, "grid");
    if (!g.contains("nx") || !g.contains("ny") || !g.at("nx").is_number_integer() || !g.at("ny").is_number_integer())
      throw InvalidInput("scenario: grid needs integer 'nx' and 'ny'");
    grid = QuadratureGrid(dom, g.at("nx").get<int>(), g.at("ny").get<int>());
  }

  std::uint64_t seed = 1;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned())
      throw InvalidInput("scenario: 'seed' must be a nonnegative integer");
    seed = j.at("seed").get<std::uint64_t>();
  }
  return Scenario{id, dom, rho.normalized(grid), k, grid, seed};
}

Scenario load_scenario(const std::filesystem::path& path)
{
  auto in = open_in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str(), path.parent_path());
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

std::string scenario_to_json(const Scenario& s)
{
  json j;
  j["id"] = s.id;
  j["domain"] = {{"x_min", s.domain.x_min()}, {"x_max", s.domain.x_max()},
                 {"y_min", s.domain.y_min()}, {"y_max", s.domain.y_max()}};
  const DensityShape& shape = s.density.shape();
  if (std::holds_alternative<UniformDensity>(shape)) {
    j["density"] = {{"type", "uniform"}};
  } else if (const auto* r = std::get_if<RingDensity>(&shape)) {
    j["density"] = {{"type", "ring"}, {"r1", r->r1}, {"r2", r->r2}, {"rho0", r->rho0}, {"contrast", r->contrast}};
  } else if (const auto* g = std::get_if<GaussianMixtureDensity>(&shape)) {
    json means = json::array();
    for (const Point& m : g->means)
      means.push_back({m.x, m.y});
    j["density"] = {{"type", "gaussian_mixture"}, {"weights", g->weights}, {"means", means}, {"sigmas", g->sigmas}};
  } else {
    throw InvalidInput("grid densities are stored as CSV and cannot be inlined in a descriptor");
  }
  j["kernel"] = std::string(to_string(s.kernel.shape()));
  j["delta"] = s.kernel.delta();
  j["grid"] = {{"nx", s.grid.nx()}, {"ny", s.grid.ny()}};
  j["seed"] = s.seed;
  return j.dump(2);
}

GridDensity read_grid_density_csv(const std::filesystem::path& path)
{
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() {
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (!t.empty() && t[0] != '#') {
        line = t;
        return true;
      }
    }
    return false;
  };
  if (!next_line() || split(line) != std::vector<std::string>{"nx", "ny", "x_min", "x_max", "y_min", "y_max"})
    throw InvalidInput(location(path, lineno) + "expected header 'nx,ny,x_min,x_max,y_min,y_max'");
  if (!next_line())
    throw InvalidInput(location(path, lineno) + "missing grid geometry line");
  const auto geo = split(line);
  if (geo.size() != 6)
    throw InvalidInput(location(path, lineno) + "grid geometry needs 6 values");
  const double nxd = parse_double(geo[0], path, lineno);
  const double nyd = parse_double(geo[1], path, lineno);
  if (nxd < 1 || nyd < 1 || nxd != std::floor(nxd) || nyd != std::floor(nyd))
    throw InvalidInput(location(path, lineno) + "nx and ny must be positive integers");
  GridDensity g{RectDomain(parse_double(geo[2], path, lineno), parse_double(geo[3], path, lineno),
                           parse_double(geo[4], path, lineno), parse_double(geo[5], path, lineno)),
                static_cast<int>(nxd), static_cast<int>(nyd), {}};
  g.values.reserve(static_cast<std::size_t>(g.nx) * g.ny);
  for (int j = 0; j < g.ny; ++j) {
    if (!next_line())
      throw InvalidInput(location(path, lineno) + "expected " + std::to_string(g.ny) + " value rows, got " +
                         std::to_string(j));
    const auto cells = split(line);
    if (cells.size() != static_cast<std::size_t>(g.nx))
      throw InvalidInput(location(path, lineno) + "expected " + std::to_string(g.nx) + " values, got " +
                         std::to_string(cells.size()));
    for (const auto& c : cells)
      g.values.push_back(parse_double(c, path, lineno));
  }
  if (next_line())
    throw InvalidInput(location(path, lineno) + "unexpected extra row");
  return g;
}

void write_grid_density_csv(const std::filesystem::path& path, const GridDensity& g)
{
  auto out = open_out(path);
  out << "nx,ny,x_min,x_max,y_min,y_max\n"
      << g.nx << ',' << g.ny << ',' << g.bounds.x_min() << ',' << g.bounds.x_max() << ',' << g.bounds.y_min() << ','
      << g.bounds.y_max() << '\n';
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i)
      out << (i ? "," : "") << g.values[static_cast<std::size_t>(j) * g.nx + i];
    out << '\n';
  }
}

namespace {

TrajectorySeries read_trajectory(const std::filesystem::path& path, const RectDomain* dom)
{
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  bool has_t = false;
  bool header = false;
  std::vector<double> times;
  std::vector<std::vector<Point>> frames;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const auto cells = split(t);
    if (!header) {
      if (cells == std::vector<std::string>{"x", "y"})
        has_t = false;
      else if (cells == std::vector<std::string>{"x", "y", "t"})
        has_t = true;
      else
        throw InvalidInput(location(path, lineno) + "expected header 'x,y' or 'x,y,t'");
      header = true;
      continue;
    }
    if (cells.size() != (has_t ? 3u : 2u))
      throw InvalidInput(location(path, lineno) + "expected " + std::to_string(has_t ? 3 : 2) + " columns, got " +
                         std::to_string(cells.size()));
    const Point p{parse_double(cells[0], path, lineno), parse_double(cells[1], path, lineno)};
    if (dom && !dom->contains(p)) {
      std::ostringstream msg;
      msg << location(path, lineno) << "position (" << p.x << ", " << p.y << ") lies outside the domain ["
          << dom->x_min() << ", " << dom->x_max() << "] x [" << dom->y_min() << ", " << dom->y_max() << "]";
      throw InvalidInput(msg.str());
    }
    const double time = has_t ? parse_double(cells[2], path, lineno) : 0.0;
    if (times.empty() || time != times.back()) {
      if (!times.empty() && !(time > times.back()))
        throw InvalidInput(location(path, lineno) + "frames must be grouped by increasing t");
      times.push_back(time);
      frames.emplace_back();
    }
    frames.back().push_back(p);
  }
  if (!header)
    throw InvalidInput(path.string() + ": empty positions file");
  if (frames.empty())
    throw InvalidInput(path.string() + ": positions file has no rows");
  std::vector<SwarmConfig> configs;
  configs.reserve(frames.size());
  for (auto& f : frames)
    configs.emplace_back(std::move(f));
  try {
    return TrajectorySeries(std::move(times), std::move(configs));
  } catch (const MalformedTrajectory& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

SwarmConfig single_frame(const std::filesystem::path& path, const TrajectorySeries& traj)
{
  if (traj.size() != 1)
    throw InvalidInput(path.string() + ": expected a single frame, found " + std::to_string(traj.size()));
  return traj.frames()[0];
}

}  // namespace

TrajectorySeries read_trajectory_csv(const std::filesystem::path& path)
{
  return read_trajectory(path, nullptr);
}

TrajectorySeries read_trajectory_csv(const std::filesystem::path& path, const RectDomain& dom)
{
  return read_trajectory(path, &dom);
}

SwarmConfig read_positions_csv(const std::filesystem::path& path)
{
  return single_frame(path, read_trajectory(path, nullptr));
}

SwarmConfig read_positions_csv(const std::filesystem::path& path, const RectDomain& dom)
{
  return single_frame(path, read_trajectory(path, &dom));
}

void write_positions_csv(const std::filesystem::path& path, const SwarmConfig& swarm)
{
  auto out = open_out(path);
  out << "x,y\n";
  for (const Point& p : swarm.positions())
    out << p.x << ',' << p.y << '\n';
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectorySeries& traj)
{
  auto out = open_out(path);
  out << "x,y,t\n";
  for (std::size_t j = 0; j < traj.size(); ++j)
    for (const Point& p : traj.frames()[j].positions())
      out << p.x << ',' << p.y << ',' << traj.times()[j] << '\n';
}

ErrorSampleSet read_samples_csv(const std::filesystem::path& path)
{
  auto in = open_in(path);
  ErrorSampleSet s;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty())
      continue;
    if (t[0] == '#') {
      std::istringstream meta(t.substr(1));
      std::string kv;
      while (meta >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
          continue;
        const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "n_robots")
          s.n_robots = static_cast<std::size_t>(parse_double(val, path, lineno));
        else if (key == "delta")
          s.delta = parse_double(val, path, lineno);
        else if (key == "density_id")
          s.density_id = val;
        else if (key == "seed")
          s.seed = std::stoull(val);
      }
      continue;
    }
    if (!header) {
      if (t != "e")
        throw InvalidInput(location(path, lineno) + "expected header 'e'");
      header = true;
      continue;
    }
    s.values.push_back(parse_double(t, path, lineno));
  }
  if (!header)
    throw InvalidInput(path.string() + ": missing 'e' header");
  return s;
}

void write_samples_csv(const std::filesystem::path& path, const ErrorSampleSet& samples)
{
  auto out = open_out(path);
  out << "# n_robots=" << samples.n_robots << " delta=" << samples.delta << " density_id=" << samples.density_id
      << " seed=" << samples.seed << " M=" << samples.values.size() << '\n'
      << "e\n";
  for (double v : samples.values)
    out << v << '\n';
}

void write_field_csv(const std::filesystem::path& path, const QuadratureGrid& grid, const Eigen::MatrixXd& values)
{
  if (values.rows() != grid.nx() || values.cols() != grid.ny())
    throw InvalidInput("field dimensions do not match the grid");
  auto out = open_out(path);
  out << "x,y,value\n";
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i)
      out << grid.x(i) << ',' << grid.y(j) << ',' << values(i, j) << '\n';
}

Eigen::MatrixXd read_field_csv(const std::filesystem::path& path, const QuadratureGrid& grid)
{
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  Eigen::MatrixXd values(grid.nx(), grid.ny());
  std::size_t k = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    if (!header) {
      if (split(t) != std::vector<std::string>{"x", "y", "value"})
        throw InvalidInput(location(path, lineno) + "expected header 'x,y,value'");
      header = true;
      continue;
    }
    const auto cells = split(t);
    if (cells.size() != 3 || k >= grid.size())
      throw InvalidInput(location(path, lineno) + "unexpected field row");
    const int i = static_cast<int>(k % grid.nx());
    const int j = static_cast<int>(k / grid.nx());
    const double x = parse_double(cells[0], path, lineno);
    const double y = parse_double(cells[1], path, lineno);
    if (std::abs(x - grid.x(i)) > 1e-9 * (1.0 + std::abs(x)) || std::abs(y - grid.y(j)) > 1e-9 * (1.0 + std::abs(y)))
      throw InvalidInput(location(path, lineno) + "cell center does not match the grid");
    values(i, j) = parse_double(cells[2], path, lineno);
    ++k;
  }
  if (k != grid.size())
    throw InvalidInput(path.string() + ": expected " + std::to_string(grid.size()) + " field rows, got " +
                       std::to_string(k));
  return values;
}

void write_columns_csv(const std::filesystem::path& path,
                       std::string_view header_a,
                       std::string_view header_b,
                       const std::vector<double>& a,
                       const std::vector<double>& b)
{
  if (a.size() != b.size())
    throw InvalidInput("column lengths differ");
  auto out = open_out(path);
  out << header_a << ',' << header_b << '\n';
  for (std::size_t i = 0; i < a.size(); ++i)
    out << a[i] << ',' << b[i] << '\n';
}

ErrorSeries read_error_series_csv(const std::filesystem::path& path)
{
  auto in = open_in(path);
  ErrorSeries s;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const auto cells = split(t);
    if (!header) {
      if (cells != std::vector<std::string>{"t", "e"})
        throw InvalidInput(location(path, lineno) + "expected header 't,e'");
      header = true;
      continue;
    }
    if (cells.size() != 2)
      throw InvalidInput(location(path, lineno) + "expected 2 columns");
    s.t.push_back(parse_double(cells[0], path, lineno));
    s.e.push_back(parse_double(cells[1], path, lineno));
  }
  if (!header)
    throw InvalidInput(path.string() + ": missing 't,e' header");
  return s;
}

}  // namespace swarmcov
