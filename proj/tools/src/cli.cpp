#include "swarmcov_cli/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "svg.hpp"
#include "swarmcov/errors.hpp"
#include "swarmcov/extrema.hpp"
#include "swarmcov/io.hpp"
#include "swarmcov/parallel.hpp"
#include "swarmcov/pdf_bench.hpp"
#include "swarmcov/sim.hpp"
#include "swarmcov/stats.hpp"

namespace swarmcov::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Reference inputs for the relative-error formula check.
constexpr double kRefObserved = 0.5157;
constexpr double kRefMinus = 0.28205;
constexpr double kRefPlus = 1.9867;
constexpr double kRefRelative = 0.1371;
constexpr double kRefTolerance = 1e-4;

struct Common {
  std::string scenario;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string grid;
  std::optional<double> delta;
  bool svg = false;
};

struct SimOptions {
  std::size_t steps = 4000;
  std::size_t stride = 20;
  double step_scale = 3.0;
};

void add_common(CLI::App* cmd, Common& c)
{
  cmd->add_option("--scenario", c.scenario, "Scenario descriptor (JSON); the ring scenario when omitted")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out_dir, "Directory for reports and plot data");
  cmd->add_option("--seed", c.seed, "Seed overriding the scenario's");
  cmd->add_option("--threads", c.threads, "Worker threads (default: SWARMCOV_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--grid", c.grid, "Quadrature grid override, NXxNY");
  cmd->add_option("--delta", c.delta, "Kernel radius override")->check(CLI::PositiveNumber);
  cmd->add_flag("--svg", c.svg, "Also render SVG plots");
}

void add_sim_options(CLI::App* cmd, SimOptions& s)
{
  cmd->add_option("--steps", s.steps, "Controller steps")->check(CLI::PositiveNumber);
  cmd->add_option("--stride", s.stride, "Record every k-th step")->check(CLI::PositiveNumber);
  cmd->add_option("--step-scale", s.step_scale, "Proposal standard deviation")->check(CLI::PositiveNumber);
}

std::pair<int, int> parse_pair(const std::string& text, const char* flag)
{
  const auto x = text.find_first_of("xX");
  int a = 0, b = 0;
  try {
    if (x == std::string::npos)
      throw std::invalid_argument("no separator");
    std::size_t used_a = 0, used_b = 0;
    a = std::stoi(text.substr(0, x), &used_a);
    b = std::stoi(text.substr(x + 1), &used_b);
    if (used_a != x || used_b != text.size() - x - 1)
      throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw InvalidInput(std::string(flag) + " expects AxB with positive integers, got '" + text + "'");
  }
  if (a < 1 || b < 1)
    throw InvalidInput(std::string(flag) + " expects positive integers, got '" + text + "'");
  return {a, b};
}

// a:b expands to a, 2a, 4a, ... below b, then b itself.
std::vector<std::size_t> parse_sweep(const std::string& text)
{
  const auto colon = text.find(':');
  long long a = 0, b = 0;
  try {
    if (colon == std::string::npos)
      throw std::invalid_argument("no separator");
    std::size_t used_a = 0, used_b = 0;
    a = std::stoll(text.substr(0, colon), &used_a);
    b = std::stoll(text.substr(colon + 1), &used_b);
    if (used_a != colon || used_b != text.size() - colon - 1)
      throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw InvalidInput("--sweep expects a:b with positive integers, got '" + text + "'");
  }
  if (a < 1 || b < a)
    throw InvalidInput("--sweep expects 1 <= a <= b, got '" + text + "'");
  std::vector<std::size_t> n;
  for (long long v = a; v < b; v *= 2)
    n.push_back(static_cast<std::size_t>(v));
  n.push_back(static_cast<std::size_t>(b));
  return n;
}

Scenario resolve(const Common& c)
{
  Scenario s = c.scenario.empty() ? reference_ring_scenario() : load_scenario(c.scenario);
  if (c.seed)
    s.seed = *c.seed;
  if (c.delta)
    s.kernel = s.kernel.with_delta(*c.delta);
  if (!c.grid.empty()) {
    const auto [nx, ny] = parse_pair(c.grid, "--grid");
    s.grid = QuadratureGrid(s.domain, nx, ny);
    s.density = s.density.normalized(s.grid);
  }
  return s;
}

fs::path out_path(const Common& c, const std::string& name)
{
  return fs::path(c.out_dir) / name;
}

void emit(const json& report, const Common& c, const std::string& name, std::ostream& out)
{
  const std::string text = report.dump(2);
  out << text << '\n';
  if (c.out_dir.empty())
    return;
  fs::create_directories(c.out_dir);
  std::ofstream f(out_path(c, name));
  if (!f)
    throw InvalidInput("cannot write '" + out_path(c, name).string() + "'");
  f << text << '\n';
}

json scenario_json(const Scenario& s)
{
  return {{"density_id", s.density.id()},
          {"kernel", std::string(to_string(s.kernel.shape()))},
          {"delta", s.kernel.delta()},
          {"grid", {{"nx", s.grid.nx()}, {"ny", s.grid.ny()}}},
          {"seed", s.seed}};
}

std::vector<Point> to_vector(const SwarmConfig& swarm)
{
  return {swarm.positions().begin(), swarm.positions().end()};
}

double diameter(const SwarmConfig& swarm)
{
  double d2 = 0.0;
  for (std::size_t i = 0; i < swarm.size(); ++i)
    for (std::size_t j = i + 1; j < swarm.size(); ++j) {
      const double dx = swarm[i].x - swarm[j].x, dy = swarm[i].y - swarm[j].y;
      d2 = std::max(d2, dx * dx + dy * dy);
    }
  return std::sqrt(d2);
}

// ---- eval -----------------------------------------------------------------

struct EvalOptions {
  std::string positions;
  bool mu = false;
  std::string partition = "8x8";
};

int cmd_eval(const Common& c, const EvalOptions& o, std::ostream& out)
{
  const Scenario s = resolve(c);
  const SwarmConfig swarm = read_positions_csv(o.positions, s.domain);
  const BlobField field = blob_function(swarm, s.kernel, s.grid);
  MetricResult r = error_metric(field, s.density.on_grid(s.grid), s.grid);
  r.delta = s.kernel.delta();
  r.kernel = s.kernel.shape();
  r.density_id = s.density.id();

  json report{{"e", r.e},
              {"e_hat", r.e_hat},
              {"N", r.n_robots},
              {"delta", r.delta},
              {"grid", {{"nx", r.nx}, {"ny", r.ny}}},
              {"kernel", std::string(to_string(r.kernel))},
              {"density_id", r.density_id},
              {"mass_defect", r.mass_defect}};
  if (o.mu) {
    const auto [rows, cols] = parse_pair(o.partition, "--partition");
    const Partition part(s.domain, cols, rows);
    report["mu"] = discretization_metric(swarm, s.density, part);
    report["partition"] = {{"rows", rows}, {"cols", cols}};
  }
  emit(report, c, "metric.json", out);
  if (!c.out_dir.empty()) {
    write_field_csv(out_path(c, "blob_field.csv"), s.grid, field.values);
    write_field_csv(out_path(c, "target_field.csv"), s.grid, s.density.on_grid(s.grid));
    if (c.svg)
      write_heatmap_svg(out_path(c, "blob_field.svg"), s.grid, field.values, to_vector(swarm), "blob function");
  }
  return ok;
}

// ---- extrema --------------------------------------------------------------

struct ExtremaOptions {
  std::size_t n_robots = 200;
  int starts = 50;
  int max_iters = 2000;
  std::string sweep;
  bool optimize_delta = false;
};

OptimizerSettings settings_for(const Common& c, const Scenario& s, int starts, int max_iters)
{
  OptimizerSettings st;
  st.n_starts = starts;
  st.max_iters = max_iters;
  st.seed = s.seed;
  st.threads = c.threads;
  st.validate();
  return st;
}

json extrema_json(const ExtremaResult& r, const Scenario& s, std::size_t n_robots)
{
  json per_start = json::array();
  json seeds = json::array();
  for (const StartRecord& rec : r.per_start) {
    seeds.push_back(rec.seed);
    json j{{"start_id", rec.start_id},
           {"sense", std::string(to_string(rec.sense))},
           {"seed", rec.seed},
           {"layout", rec.layout},
           {"initial", rec.initial},
           {"value", rec.value},
           {"iters", rec.iterations},
           {"failed", rec.failed}};
    if (rec.failed)
      j["error"] = rec.error;
    per_start.push_back(std::move(j));
  }
  json report{{"e_minus", r.e_minus},
              {"e_plus", r.e_plus},
              {"N", n_robots},
              {"n_starts", r.n_starts},
              {"argmax_diameter", diameter(r.argmax)},
              {"argmin_csv", "argmin.csv"},
              {"argmax_csv", "argmax.csv"}};
  report.update(scenario_json(s));
  report["seeds"] = seeds;
  report["per_start"] = per_start;
  return report;
}

int cmd_extrema(const Common& c, const ExtremaOptions& o, std::ostream& out)
{
  const Scenario s = resolve(c);
  const OptimizerSettings st = settings_for(c, s, o.starts, o.max_iters);

  if (!o.sweep.empty()) {
    const std::vector<std::size_t> n = parse_sweep(o.sweep);
    const std::vector<SweepRow> rows = design_sweep(s.density, s.kernel, s.grid, n, st, o.optimize_delta);
    json table = json::array();
    bool any_failed = false;
    for (const SweepRow& r : rows) {
      json j{{"N", r.n_robots}, {"delta", r.delta}, {"e_min", r.e_min}, {"suspect", r.suspect}, {"failed", r.failed}};
      if (r.failed)
        j["error"] = r.error;
      any_failed = any_failed || r.failed;
      table.push_back(std::move(j));
    }
    json report{{"sweep", table}, {"optimize_delta", o.optimize_delta}, {"n_starts", o.starts}, {"sweep_csv", "sweep.csv"}};
    report.update(scenario_json(s));
    emit(report, c, "sweep.json", out);
    if (!c.out_dir.empty()) {
      fs::create_directories(c.out_dir);
      std::ofstream f(out_path(c, "sweep.csv"));
      f << std::setprecision(std::numeric_limits<double>::max_digits10) << "N,delta,e_min,suspect,failed\n";
      for (const SweepRow& r : rows)
        f << r.n_robots << ',' << r.delta << ',' << r.e_min << ',' << r.suspect << ',' << r.failed << '\n';
      if (c.svg) {
        Curve curve{"minimum error", {}, {}, "#1f77b4", true};
        for (const SweepRow& r : rows)
          if (!r.failed) {
            curve.x.push_back(static_cast<double>(r.n_robots));
            curve.y.push_back(r.e_min);
          }
        write_curves_svg(out_path(c, "sweep.svg"), {curve}, "N", "minimum error", "error minimum against swarm size");
      }
    }
    return any_failed ? numerical_failure : ok;
  }

  const ExtremaResult r = multistart_extrema(s.density, s.kernel, s.grid, o.n_robots, st);
  emit(extrema_json(r, s, o.n_robots), c, "extrema.json", out);
  if (!c.out_dir.empty()) {
    write_positions_csv(out_path(c, "argmin.csv"), r.argmin);
    write_positions_csv(out_path(c, "argmax.csv"), r.argmax);
    const BlobField fmin = blob_function(r.argmin, s.kernel, s.grid);
    const BlobField fmax = blob_function(r.argmax, s.kernel, s.grid);
    write_field_csv(out_path(c, "field_argmin.csv"), s.grid, fmin.values);
    write_field_csv(out_path(c, "field_argmax.csv"), s.grid, fmax.values);
    write_field_csv(out_path(c, "target_field.csv"), s.grid, s.density.on_grid(s.grid));
    if (c.svg) {
      write_heatmap_svg(out_path(c, "argmin.svg"), s.grid, fmin.values, to_vector(r.argmin), "minimizing configuration");
      write_heatmap_svg(out_path(c, "argmax.svg"), s.grid, fmax.values, to_vector(r.argmax), "maximizing configuration");
    }
  }
  return ok;
}

// ---- pdf ------------------------------------------------------------------

struct PdfOptions {
  std::size_t n_robots = 200;
  std::size_t m = 1000;
};

struct FittedBenchmark {
  ErfFit fit;
  bool fit_ok = true;
  std::string fit_error;
};

FittedBenchmark fit_benchmark(const ErrorSampleSet& samples)
{
  FittedBenchmark b;
  try {
    b.fit = fit_erf_cdf(samples);
  } catch (const FitFailure& f) {
    b.fit = f.fallback();
    b.fit_ok = false;
    b.fit_error = f.what();
  }
  return b;
}

json diagnostics_json(const ErrorSampleSet& samples, const ErfFit& fit)
{
  if (samples.values.size() < 30)
    return {{"available", false}, {"reason", "normality diagnostics need at least 30 samples"}};
  const NormalityReport d = normality_diagnostics(samples.values, fit);
  return {{"available", true},
          {"residual", d.residual},
          {"residual_limit", d.residual_limit},
          {"skewness", d.skewness},
          {"skewness_limit", d.skewness_limit},
          {"excess_kurtosis", d.excess_kurtosis},
          {"kurtosis_limit", d.kurtosis_limit},
          {"residual_ok", d.residual_ok},
          {"skewness_ok", d.skewness_ok},
          {"kurtosis_ok", d.kurtosis_ok},
          {"passed", d.passed()}};
}

int cmd_pdf(const Common& c, const PdfOptions& o, std::ostream& out, std::ostream& err)
{
  const Scenario s = resolve(c);
  const ErrorSampleSet samples =
      monte_carlo_samples(s.density, s.kernel, s.grid, o.n_robots, o.m, s.seed, c.threads);
  const FittedBenchmark b = fit_benchmark(samples);

  json report{{"mu", b.fit.mu},
              {"sigma", b.fit.sigma},
              {"residual", b.fit.residual},
              {"M", samples.values.size()},
              {"N", samples.n_robots},
              {"delta", samples.delta},
              {"sample_mean", samples.mean()},
              {"sample_sd", samples.sd()},
              {"fit_ok", b.fit_ok},
              {"fit_iterations", b.fit.iterations}};
  if (!b.fit_ok)
    report["fit_error"] = b.fit_error;
  report["diagnostics"] = diagnostics_json(samples, b.fit);
  report.update(scenario_json(s));
  report["samples_csv"] = "samples.csv";
  emit(report, c, "pdf.json", out);

  if (!c.out_dir.empty()) {
    write_samples_csv(out_path(c, "samples.csv"), samples);
    const EmpiricalCdf ecdf(samples.values);
    std::vector<double> z(ecdf.sorted().begin(), ecdf.sorted().end()), f(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
      f[i] = static_cast<double>(i + 1) / static_cast<double>(z.size());
    write_columns_csv(out_path(c, "cdf.csv"), "z", "F", z, f);

    const NormalPdf pdf = pdf_from_fit(b.fit);
    constexpr int kPoints = 201;
    const double lo = std::min(z.front(), b.fit.mu - 4 * b.fit.sigma);
    const double hi = std::max(z.back(), b.fit.mu + 4 * b.fit.sigma);
    std::vector<double> zz(kPoints), ff(kPoints), pp(kPoints);
    for (int i = 0; i < kPoints; ++i) {
      zz[i] = lo + (hi - lo) * i / (kPoints - 1);
      ff[i] = b.fit.cdf(zz[i]);
      pp[i] = pdf(zz[i]);
    }
    write_columns_csv(out_path(c, "erf_fit.csv"), "z", "F", zz, ff);
    write_columns_csv(out_path(c, "pdf.csv"), "z", "p", zz, pp);
    if (c.svg) {
      write_curves_svg(out_path(c, "cdf.svg"),
                       {Curve{"empirical", z, f, "#1f77b4", true}, Curve{"erf fit", zz, ff, "#d62728", false}},
                       "error metric", "CDF", "error metric CDF");
      write_curves_svg(out_path(c, "pdf.svg"), {Curve{"fitted pdf", zz, pp, "#d62728", false}}, "error metric",
                       "density", "error metric PDF");
    }
  }
  if (!b.fit_ok) {
    err << "swarmcov: " << b.fit_error << " (moment estimates reported instead)\n";
    return numerical_failure;
  }
  return ok;
}

// ---- simulate -------------------------------------------------------------

ControllerParams controller_params(const Scenario& s, const SimOptions& o)
{
  ControllerParams p;
  p.step_scale = o.step_scale;
  p.n_steps = o.steps;
  p.stride = o.stride;
  p.seed = s.seed;
  p.validate();
  return p;
}

void write_series(const Common& c, const ErrorSeries& series, const ExpFit* fit)
{
  write_columns_csv(out_path(c, "error_series.csv"), "t", "e", series.t, series.e);
  std::vector<Curve> curves{Curve{"error", series.t, series.e, "#1f77b4", false}};
  if (fit) {
    std::vector<double> f(series.t.size());
    for (std::size_t i = 0; i < f.size(); ++i)
      f[i] = (*fit)(series.t[i]);
    write_columns_csv(out_path(c, "exp_fit.csv"), "t", "e", series.t, f);
    curves.push_back(Curve{"exponential fit", series.t, f, "#d62728", false});
  }
  if (c.svg)
    write_curves_svg(out_path(c, "error_series.svg"), curves, "t", "error metric", "error over time");
}

struct SimulateOptions {
  std::size_t n_robots = 200;
  SimOptions sim;
};

int cmd_simulate(const Common& c, const SimulateOptions& o, std::ostream& out)
{
  const Scenario s = resolve(c);
  const ControllerParams p = controller_params(s, o.sim);
  const TrajectorySeries traj = run_trajectory(s.density, s.domain, o.n_robots, p);
  const ErrorSeries series = error_time_series(traj, s.density, s.kernel, s.grid, c.threads);

  json report{{"N", o.n_robots},
              {"steps", p.n_steps},
              {"stride", p.stride},
              {"step_scale", p.step_scale},
              {"frames", traj.size()},
              {"e_first", series.e.front()},
              {"e_last", series.e.back()},
              {"trajectory_csv", "trajectory.csv"},
              {"error_series_csv", "error_series.csv"}};
  report.update(scenario_json(s));
  emit(report, c, "simulate.json", out);
  if (!c.out_dir.empty()) {
    write_trajectory_csv(out_path(c, "trajectory.csv"), traj);
    write_series(c, series, nullptr);
  }
  return ok;
}

// ---- assess ---------------------------------------------------------------

struct AssessOptions {
  std::string positions;
  bool simulate = false;
  std::size_t n_robots = 200;
  SimOptions sim;
  std::string extrema_report;
  std::string samples;
  int starts = 50;
  int max_iters = 2000;
  std::size_t m = 1000;
  double significance = 0.05;
  bool reference = false;
};

int cmd_reference(const Common& c, std::ostream& out)
{
  const RelativeErrorReport r = relative_error(kRefObserved, kRefMinus, kRefPlus);
  const bool pass = std::abs(r.e_rel - kRefRelative) <= kRefTolerance;
  json report{{"reference",
               {{"e_observed", r.e_observed},
                {"e_minus", r.e_minus},
                {"e_plus", r.e_plus},
                {"e_rel", r.e_rel},
                {"expected", kRefRelative},
                {"tolerance", kRefTolerance},
                {"pass", pass}}}};
  emit(report, c, "reference.json", out);
  return pass ? ok : numerical_failure;
}

std::pair<double, double> load_extrema_bounds(const std::string& path, std::size_t n_robots)
{
  std::ifstream in(path);
  if (!in)
    throw InvalidInput("cannot open extrema report '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  for (const char* key : {"e_minus", "e_plus"})
    if (!j.contains(key) || !j.at(key).is_number())
      throw InvalidInput(path + ": extrema report needs a numeric '" + key + "'");
  if (j.contains("N") && j.at("N").is_number_unsigned() && j.at("N").get<std::size_t>() != n_robots)
    throw InvalidInput(path + ": extrema report is for N = " + std::to_string(j.at("N").get<std::size_t>()) +
                       ", the trajectory has N = " + std::to_string(n_robots));
  return {j.at("e_minus").get<double>(), j.at("e_plus").get<double>()};
}

int cmd_assess(const Common& c, const AssessOptions& o, std::ostream& out)
{
  if (o.reference)
    return cmd_reference(c, out);
  if (o.positions.empty() == !o.simulate)
    throw InvalidInput("assess needs exactly one of --positions or --simulate");
  if (!(o.significance > 0.0 && o.significance < 1.0))
    throw InvalidInput("--significance must lie in (0, 1)");

  const Scenario s = resolve(c);
  TrajectorySeries traj;
  if (o.simulate)
    traj = run_trajectory(s.density, s.domain, o.n_robots, controller_params(s, o.sim));
  else
    traj = read_trajectory_csv(o.positions, s.domain);
  const std::size_t n_robots = traj.n_robots();

  const ErrorSeries series = error_time_series(traj, s.density, s.kernel, s.grid, c.threads);
  const ExpFit fit = fit_exponential(series.t, series.e);
  if (!c.out_dir.empty()) {
    // Written before the steady-state check so a failing run can be inspected.
    if (o.simulate)
      write_trajectory_csv(out_path(c, "trajectory.csv"), traj);
    write_series(c, series, &fit);
  }
  const SteadyStateSummary steady = steady_state_stats(series.t, series.e, fit);

  double e_minus = 0.0, e_plus = 0.0;
  if (!o.extrema_report.empty()) {
    std::tie(e_minus, e_plus) = load_extrema_bounds(o.extrema_report, n_robots);
  } else {
    const ExtremaResult ex =
        multistart_extrema(s.density, s.kernel, s.grid, n_robots, settings_for(c, s, o.starts, o.max_iters));
    e_minus = ex.e_minus;
    e_plus = ex.e_plus;
  }

  ErrorSampleSet samples;
  if (!o.samples.empty()) {
    samples = read_samples_csv(o.samples);
    if (samples.n_robots != 0 && samples.n_robots != n_robots)
      throw InvalidInput(o.samples + ": samples are for N = " + std::to_string(samples.n_robots) +
                         ", the trajectory has N = " + std::to_string(n_robots));
  } else {
    samples = monte_carlo_samples(s.density, s.kernel, s.grid, n_robots, o.m, s.seed, c.threads);
  }
  const FittedBenchmark bench = fit_benchmark(samples);

  const RelativeErrorReport rel = relative_error(steady.q3, e_minus, e_plus);
  const SampleSummary controller{steady.mean, steady.sd, steady.n};
  const TestReport tests = compare_samples(controller, summarize(samples.values), o.significance);

  json report{
      {"exp_fit", {{"alpha", fit.alpha}, {"beta", fit.beta}, {"tau", fit.tau}, {"t_s", fit.settling_time()},
                   {"at_bracket_edge", fit.at_bracket_edge}}},
      {"steady_state", {{"q3", steady.q3}, {"mean", steady.mean}, {"sd", steady.sd}, {"n", steady.n}}},
      {"benchmark", {{"mu", bench.fit.mu}, {"sigma", bench.fit.sigma}, {"M", samples.values.size()},
                     {"sample_mean", samples.mean()}, {"sample_sd", samples.sd()}, {"fit_ok", bench.fit_ok}}},
      {"tests", {{"f_stat", tests.f.f_stat}, {"f_dof", {tests.f.dof_num, tests.f.dof_den}}, {"f_p", tests.f.p_value},
                 {"t_stat", tests.t.t_stat}, {"t_dof", tests.t.dof}, {"t_p", tests.t.p_value},
                 {"ci_95", {tests.ci.lo, tests.ci.hi}}, {"significance", tests.significance},
                 {"variances_consistent", tests.f_pass}, {"means_consistent", tests.t_pass}}},
      {"e_q3", rel.e_observed},
      {"e_minus", rel.e_minus},
      {"e_plus", rel.e_plus},
      {"e_rel", rel.e_rel},
      {"assessment", rel.assessment},
      {"N", n_robots},
      {"frames", traj.size()},
      {"source", o.simulate ? "simulated" : o.positions},
  };
  report.update(scenario_json(s));
  report["caveats"] = {"steady-state samples are consecutive frames of one run and are autocorrelated; "
                       "the F and T tests treat them as independent"};
  if (!bench.fit_ok)
    report["caveats"].push_back("benchmark erf fit failed (" + bench.fit_error + "); moment estimates reported");
  if (fit.at_bracket_edge)
    report["caveats"].push_back("time constant sits on its search bracket edge; no decay is resolved");
  emit(report, c, "assess.json", out);
  return ok;
}

int exit_code(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::input: return input_error;
    case ErrorKind::numerical: return numerical_failure;
    case ErrorKind::insufficient: return insufficient_data;
  }
  return unexpected;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Swarm coverage error metric, its extrema and its sampling distribution", "swarmcov"};
  app.require_subcommand(1);

  Common common;
  common.threads = default_thread_count();

  EvalOptions eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Error metric of one robot configuration");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--positions", eval.positions, "Positions CSV (x,y)")->required();
  eval_cmd->add_flag("--mu", eval.mu, "Also report the discretization metric");
  eval_cmd->add_option("--partition", eval.partition, "Partition for --mu, RxC (rows x columns)");

  ExtremaOptions extrema;
  CLI::App* extrema_cmd = app.add_subcommand("extrema", "Multistart bounds on the error metric's extrema");
  add_common(extrema_cmd, common);
  extrema_cmd->add_option("--n", extrema.n_robots, "Robot count")->check(CLI::PositiveNumber);
  extrema_cmd->add_option("--starts", extrema.starts, "Starts per sense")->check(CLI::PositiveNumber);
  extrema_cmd->add_option("--max-iters", extrema.max_iters, "Iteration cap per local run")->check(CLI::PositiveNumber);
  extrema_cmd->add_option("--sweep", extrema.sweep, "Minimum error for N = a, 2a, 4a, ..., b");
  extrema_cmd->add_flag("--optimize-delta", extrema.optimize_delta, "Also optimize the kernel radius in --sweep");

  PdfOptions pdf;
  CLI::App* pdf_cmd = app.add_subcommand("pdf", "Monte Carlo distribution of the error metric");
  add_common(pdf_cmd, common);
  pdf_cmd->add_option("--n", pdf.n_robots, "Robot count")->check(CLI::PositiveNumber);
  pdf_cmd->add_option("--m", pdf.m, "Monte Carlo samples")->check(CLI::PositiveNumber);

  SimulateOptions simulate;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Run the stand-in Metropolis controller");
  add_common(simulate_cmd, common);
  simulate_cmd->add_option("--n", simulate.n_robots, "Robot count")->check(CLI::PositiveNumber);
  add_sim_options(simulate_cmd, simulate.sim);

  AssessOptions assess;
  CLI::App* assess_cmd = app.add_subcommand("assess", "Full controller assessment");
  add_common(assess_cmd, common);
  assess_cmd->add_option("--positions", assess.positions, "Trajectory CSV (x,y,t)");
  assess_cmd->add_flag("--simulate", assess.simulate, "Assess a simulated Metropolis run");
  assess_cmd->add_option("--n", assess.n_robots, "Robot count for --simulate")->check(CLI::PositiveNumber);
  add_sim_options(assess_cmd, assess.sim);
  assess_cmd->add_option("--extrema-report", assess.extrema_report, "Reuse an extrema.json");
  assess_cmd->add_option("--samples", assess.samples, "Reuse a Monte Carlo samples CSV");
  assess_cmd->add_option("--starts", assess.starts, "Starts per sense")->check(CLI::PositiveNumber);
  assess_cmd->add_option("--max-iters", assess.max_iters, "Iteration cap per local run")->check(CLI::PositiveNumber);
  assess_cmd->add_option("--m", assess.m, "Monte Carlo samples")->check(CLI::PositiveNumber);
  assess_cmd->add_option("--significance", assess.significance, "Test significance level");
  assess_cmd->add_flag("--reference", assess.reference, "Check the relative-error formula on reference values");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "swarmcov: " << e.what() << '\n';
    return input_error;
  }

  try {
    if (eval_cmd->parsed())
      return cmd_eval(common, eval, out);
    if (extrema_cmd->parsed())
      return cmd_extrema(common, extrema, out);
    if (pdf_cmd->parsed())
      return cmd_pdf(common, pdf, out, err);
    if (simulate_cmd->parsed())
      return cmd_simulate(common, simulate, out);
    if (assess_cmd->parsed())
      return cmd_assess(common, assess, out);
  } catch (const Error& e) {
    err << "swarmcov: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    err << "swarmcov: " << e.what() << '\n';
    return input_error;
  } catch (const fs::filesystem_error& e) {
    err << "swarmcov: " << e.what() << '\n';
    return input_error;
  } catch (const std::exception& e) {
    err << "swarmcov: unexpected failure: " << e.what() << '\n';
    return unexpected;
  }
  return unexpected;
}

}  // namespace swarmcov::cli
