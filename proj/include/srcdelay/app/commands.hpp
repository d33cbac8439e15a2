#ifndef SRCDELAY_APP_COMMANDS_HPP
#define SRCDELAY_APP_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "srcdelay/compare.hpp"
#include "srcdelay/simulator.hpp"
#include "srcdelay/source_delay.hpp"

namespace srcdelay::app {

enum class Mode { analytic, simulate, compare, sweep };
enum class Format { csv, json };

struct SweepAxis {
  std::string name;  // one of lambda, M, q, f, n, m
  std::vector<double> values;
};

struct RunSpec {
  Mode mode = Mode::analytic;
  NetworkConfig config;
  SimulationOptions simulation;
  bool warmup_set = false;  // otherwise 20 x analytic mean, or 0 when lambda = 0
  std::vector<SweepAxis> axes;
  std::filesystem::path output = ".";  // directory; a file for sweep
  Format format = Format::csv;
  double threshold = 0.02;
  std::optional<std::int64_t> u_max;          // CDF export range for analytic
  std::optional<std::filesystem::path> samples_csv;  // raw simulated delays
};

/// No delay sample survived the warm-up.
class NoSamplesError : public std::runtime_error {
 public:
  NoSamplesError() : std::runtime_error("no samples") {}
};

struct CommandResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> files;
  std::string summary;
};

/// Reads `key = value` lines ('#' starts a comment). Keys are the config
/// symbols (n, m, delta, q, lambda, f, M) and simulation options (slots,
/// warmup, seed, replicas). Unknown keys and malformed lines throw.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);
void apply_key_value(RunSpec& spec, const std::string& key, const std::string& value);

/// "lambda=0.001,0.002" or "lambda=0.0005:0.005:0.0005" (inclusive range).
SweepAxis parse_axis(const std::string& text);

/// Grid points in row-major axis order, validated against NetworkConfig.
std::vector<NetworkConfig> sweep_grid(const NetworkConfig& base, const std::vector<SweepAxis>& axes);

/// Default warm-up: 20 x analytic mean delay, 0 when lambda = 0.
std::int64_t default_warmup(const NetworkConfig& cfg);

/// One-line "# n=... M=..." header written first in every CSV output.
std::string config_header(const NetworkConfig& cfg);

CommandResult cmd_analytic(const RunSpec& spec);
CommandResult cmd_simulate(const RunSpec& spec);
CommandResult cmd_compare(const RunSpec& spec);
CommandResult cmd_sweep(const RunSpec& spec);
CommandResult dispatch(const RunSpec& spec);

}  // namespace srcdelay::app

#endif  // SRCDELAY_APP_COMMANDS_HPP
