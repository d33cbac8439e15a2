#include <CLI11.hpp>

#include <iostream>

#include "srcdelay/app/commands.hpp"

using namespace srcdelay;
using namespace srcdelay::app;

namespace {

struct Overrides {
  std::string config_file;
  std::optional<int> n, m, f, M, replicas;
  std::optional<double> delta, q, lambda;
  std::optional<std::int64_t> slots, warmup;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> axes;
  std::string format = "csv";
  std::optional<std::string> out;
};

void add_config_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_file, "key = value config file");
  cmd->add_option("--n", o.n, "number of nodes");
  cmd->add_option("--m", o.m, "cells per side");
  cmd->add_option("--delta", o.delta, "guard factor");
  cmd->add_option("--q", o.q, "source-destination probability");
  cmd->add_option("--lambda", o.lambda, "packet generation rate");
  cmd->add_option("--f", o.f, "copies per packet");
  cmd->add_option("--M", o.M, "local-queue size");
}

void add_simulation_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--slots", o.slots, "total slots per replica, warm-up included");
  cmd->add_option("--warmup", o.warmup, "slots discarded before recording (default 20 x analytic mean)");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--replicas", o.replicas, "independent replicas");
}

RunSpec build_spec(Mode mode, const Overrides& o) {
  RunSpec spec;
  spec.mode = mode;
  if (!o.config_file.empty()) {
    for (const auto& [k, v] : read_key_values(o.config_file)) apply_key_value(spec, k, v);
  }
  auto& c = spec.config;
  if (o.n) c.n = *o.n;
  if (o.m) c.m = *o.m;
  if (o.delta) c.delta = *o.delta;
  if (o.q) c.q = *o.q;
  if (o.lambda) c.lambda = *o.lambda;
  if (o.f) c.f = *o.f;
  if (o.M) c.M = *o.M;
  if (o.slots) spec.simulation.slots = *o.slots;
  if (o.warmup) {
    spec.simulation.warmup = *o.warmup;
    spec.warmup_set = true;
  }
  if (o.seed) spec.simulation.seed = *o.seed;
  if (o.replicas) spec.simulation.replicas = *o.replicas;
  for (const auto& a : o.axes) spec.axes.push_back(parse_axis(a));
  spec.format = o.format == "json" ? Format::json : Format::csv;
  if (o.out) {
    spec.output = *o.out;
  } else if (mode == Mode::sweep) {
    spec.output = spec.format == Format::json ? "sweep.json" : "sweep.csv";
  }
  validate_config(spec.config);
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Source delay of a buffered two-hop relay MANET: analytic model and simulator"};
  app.require_subcommand(1);

  Overrides o;
  std::optional<std::int64_t> u_max;
  std::optional<std::string> samples;
  double threshold = 0.02;

  auto* analytic = app.add_subcommand("analytic", "analytic CDF and moments");
  add_config_options(analytic, o);
  analytic->add_option("--out", o.out, "output directory");
  analytic->add_option("--u-max", u_max, "last u in the CDF file (default adaptive horizon)");

  auto* simulate = app.add_subcommand("simulate", "slotted simulation");
  add_config_options(simulate, o);
  add_simulation_options(simulate, o);
  simulate->add_option("--out", o.out, "output directory");
  simulate->add_option("--samples", samples, "also write raw delays to this CSV");

  auto* cmp = app.add_subcommand("compare", "analytic vs simulated CDF");
  add_config_options(cmp, o);
  add_simulation_options(cmp, o);
  cmp->add_option("--out", o.out, "output directory");
  cmp->add_option("--threshold", threshold, "KS pass threshold");

  auto* sweep = app.add_subcommand("sweep", "analytic parameter sweep");
  add_config_options(sweep, o);
  sweep->add_option("--axis", o.axes, "name=v1,v2,... or name=start:stop:step (repeat for a second axis)")
      ->required();
  sweep->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--out", o.out, "output file");

  CLI11_PARSE(app, argc, argv);

  Mode mode = Mode::analytic;
  if (*simulate) mode = Mode::simulate;
  if (*cmp) mode = Mode::compare;
  if (*sweep) mode = Mode::sweep;

  try {
    RunSpec spec = build_spec(mode, o);
    spec.u_max = u_max;
    spec.threshold = threshold;
    if (samples) spec.samples_csv = *samples;
    const auto result = dispatch(spec);
    std::cout << result.summary << '\n';
    for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
    return result.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "invalid config:";
    for (const auto& v : e.violations()) std::cerr << ' ' << v << ';';
    std::cerr << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
