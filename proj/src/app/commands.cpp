#include "srcdelay/app/commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace srcdelay::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json config_json(const NetworkConfig& cfg) {
  return {{"n", cfg.n},   {"m", cfg.m}, {"delta", cfg.delta}, {"q", cfg.q},
          {"lambda", cfg.lambda}, {"f", cfg.f}, {"M", cfg.M},
          {"alpha", compute_alpha(cfg.m, cfg.delta)}};
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

SimulationOptions resolved_options(const RunSpec& spec) {
  SimulationOptions opts = spec.simulation;
  if (!spec.warmup_set) opts.warmup = default_warmup(spec.config);
  if (opts.slots <= opts.warmup) {
    throw std::invalid_argument("slots (" + std::to_string(opts.slots) + ") must exceed warmup (" +
                                std::to_string(opts.warmup) + ")");
  }
  return opts;
}

json simulation_json(const NetworkConfig& cfg, const SimulationOptions& opts, const EmpiricalDelay& emp) {
  const auto moments = sample_moments(emp.samples);
  const double generated = static_cast<double>(emp.generated);
  return {{"config", config_json(cfg)},
          {"seed", emp.seed},
          {"slots", opts.slots},
          {"warmup", opts.warmup},
          {"replicas", opts.replicas},
          {"samples", emp.samples.size()},
          {"generated", emp.generated},
          {"accepted", emp.accepted},
          {"dropped", emp.dropped},
          {"acceptance_rate", generated > 0 ? static_cast<double>(emp.accepted) / generated : 0.0},
          {"drop_rate", generated > 0 ? static_cast<double>(emp.dropped) / generated : 0.0},
          {"mean", moments.mean},
          {"mean_se", moments.mean_se},
          {"variance", moments.variance},
          {"variance_se", moments.variance_se},
          {"std_dev", std::sqrt(moments.variance)}};
}

void write_empirical_cdf(const fs::path& path, const NetworkConfig& cfg, const std::vector<std::int64_t>& samples) {
  const std::int64_t u_max = *std::max_element(samples.begin(), samples.end());
  const auto cdf = empirical_cdf(samples, u_max);
  auto out = open_output(path);
  out << config_header(cfg) << '\n' << "u,cdf\n" << std::setprecision(17);
  for (std::size_t u = 0; u < cdf.size(); ++u) out << u << ',' << cdf[u] << '\n';
}

}  // namespace

std::int64_t default_warmup(const NetworkConfig& cfg) {
  if (!(cfg.lambda > 0.0)) return 0;
  return static_cast<std::int64_t>(std::ceil(20.0 * mean(phase_type(cfg))));
}

CommandResult cmd_analytic(const RunSpec& spec) {
  const auto& cfg = spec.config;
  const auto rep = phase_type(cfg);
  const auto stats = summarize(rep);
  const std::int64_t horizon = adaptive_horizon(rep);
  const std::int64_t u_max = spec.u_max.value_or(horizon);
  const auto table = tabulate(rep, u_max);

  CommandResult result;
  const fs::path cdf_path = spec.output / "analytic_cdf.csv";
  {
    auto out = open_output(cdf_path);
    out << config_header(cfg) << '\n';
    write_cdf_csv(out, table);
  }
  const fs::path stats_path = spec.output / "analytic_stats.json";
  write_json(stats_path, {{"config", config_json(cfg)},
                          {"mean", stats.mean},
                          {"variance", stats.variance},
                          {"std_dev", stats.std_dev},
                          {"quantiles", {{"p50", stats.p50}, {"p90", stats.p90}, {"p99", stats.p99}}},
                          {"horizon", horizon}});
  result.files = {cdf_path, stats_path};
  result.summary = "mean=" + fmt(stats.mean) + " variance=" + fmt(stats.variance) + " std_dev=" + fmt(stats.std_dev);
  return result;
}

CommandResult cmd_simulate(const RunSpec& spec) {
  const auto& cfg = spec.config;
  validate_config(cfg);
  const auto opts = resolved_options(spec);
  const auto emp = run_replicas(cfg, opts);
  if (emp.samples.empty()) throw NoSamplesError();

  CommandResult result;
  const fs::path cdf_path = spec.output / "simulate_cdf.csv";
  write_empirical_cdf(cdf_path, cfg, emp.samples);
  const fs::path summary_path = spec.output / "simulate_summary.json";
  write_json(summary_path, simulation_json(cfg, opts, emp));
  result.files = {cdf_path, summary_path};
  if (spec.samples_csv) {
    auto out = open_output(*spec.samples_csv);
    out << "delay\n";
    for (auto s : emp.samples) out << s << '\n';
    result.files.push_back(*spec.samples_csv);
  }
  const auto moments = sample_moments(emp.samples);
  result.summary = "samples=" + std::to_string(emp.samples.size()) + " mean=" + fmt(moments.mean) +
                   " mean_se=" + fmt(moments.mean_se);
  return result;
}

CommandResult cmd_compare(const RunSpec& spec) {
  const auto& cfg = spec.config;
  const auto rep = phase_type(cfg);
  const auto opts = resolved_options(spec);
  const auto emp = run_replicas(cfg, opts);
  if (emp.samples.empty()) throw NoSamplesError();
  const auto cmp = compare(rep, emp.samples, spec.threshold);

  CommandResult result;
  const fs::path report_path = spec.output / "compare_report.json";
  write_json(report_path, {{"config", config_json(cfg)},
                           {"seed", emp.seed},
                           {"slots", opts.slots},
                           {"warmup", opts.warmup},
                           {"replicas", opts.replicas},
                           {"samples", cmp.empirical.count},
                           {"accepted", emp.accepted},
                           {"dropped", emp.dropped},
                           {"ks_distance", cmp.ks_distance},
                           {"threshold", cmp.threshold},
                           {"passed", cmp.passed},
                           {"support_max", cmp.support_max},
                           {"analytic_mean", cmp.analytic_mean},
                           {"analytic_variance", cmp.analytic_variance},
                           {"empirical_mean", cmp.empirical.mean},
                           {"empirical_mean_se", cmp.empirical.mean_se},
                           {"empirical_variance", cmp.empirical.variance},
                           {"empirical_variance_se", cmp.empirical.variance_se},
                           {"mean_delta", cmp.mean_delta},
                           {"variance_delta", cmp.variance_delta}});
  result.files = {report_path};
  result.exit_code = cmp.passed ? 0 : 1;
  result.summary = "ks_distance=" + fmt(cmp.ks_distance) + (cmp.passed ? " <= " : " > ") + fmt(cmp.threshold) +
                   (cmp.passed ? " PASS" : " FAIL");
  return result;
}

CommandResult cmd_sweep(const RunSpec& spec) {
  const auto grid = sweep_grid(spec.config, spec.axes);
  std::vector<SourceDelayStats> stats(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());

  const int threads = std::max(1, std::min<int>(worker_count(), static_cast<int>(grid.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        const auto rep = phase_type(grid[i]);
        stats[i].mean = mean(rep);
        stats[i].variance = variance(rep);
        stats[i].std_dev = std::sqrt(stats[i].variance);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  auto axis_value = [](const NetworkConfig& cfg, const std::string& name) -> double {
    if (name == "lambda") return cfg.lambda;
    if (name == "q") return cfg.q;
    if (name == "M") return cfg.M;
    if (name == "f") return cfg.f;
    if (name == "n") return cfg.n;
    return cfg.m;
  };

  CommandResult result;
  auto out = open_output(spec.output);
  if (spec.format == Format::csv) {
    out << config_header(spec.config) << '\n';
    for (const auto& axis : spec.axes) out << axis.name << ',';
    out << "mean,variance,std_dev\n" << std::setprecision(17);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (const auto& axis : spec.axes) out << axis_value(grid[i], axis.name) << ',';
      out << stats[i].mean << ',' << stats[i].variance << ',' << stats[i].std_dev << '\n';
    }
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      json row;
      for (const auto& axis : spec.axes) row[axis.name] = axis_value(grid[i], axis.name);
      row["mean"] = stats[i].mean;
      row["variance"] = stats[i].variance;
      row["std_dev"] = stats[i].std_dev;
      rows.push_back(row);
    }
    out << json{{"config", config_json(spec.config)}, {"points", rows}}.dump(2) << '\n';
  }
  result.files = {spec.output};
  result.summary = std::to_string(grid.size()) + " grid points";
  return result;
}

CommandResult dispatch(const RunSpec& spec) {
  switch (spec.mode) {
    case Mode::analytic: return cmd_analytic(spec);
    case Mode::simulate: return cmd_simulate(spec);
    case Mode::compare: return cmd_compare(spec);
    case Mode::sweep: return cmd_sweep(spec);
  }
  throw std::invalid_argument("unknown mode");
}

}  // namespace srcdelay::app
