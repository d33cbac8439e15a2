#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "srcdelay/app/commands.hpp"

namespace srcdelay::app {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw std::invalid_argument("bad number for " + key + ": '" + text + "'");
  return v;
}

std::int64_t parse_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw std::invalid_argument("bad integer for " + key + ": '" + text + "'");
  return v;
}

int as_int(const std::string& key, double v) {
  if (v != std::floor(v) || std::abs(v) > 1e9) throw std::invalid_argument(key + " must be an integer");
  return static_cast<int>(v);
}

void set_axis_value(NetworkConfig& cfg, const std::string& name, double v) {
  if (name == "lambda") {
    cfg.lambda = v;
  } else if (name == "q") {
    cfg.q = v;
  } else if (name == "M") {
    cfg.M = as_int(name, v);
  } else if (name == "f") {
    cfg.f = as_int(name, v);
  } else if (name == "n") {
    cfg.n = as_int(name, v);
  } else if (name == "m") {
    cfg.m = as_int(name, v);
  } else {
    throw std::invalid_argument("sweep axis must be one of lambda, M, q, f, n, m (got '" + name + "')");
  }
}

}  // namespace

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(number) + ": expected key = value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_key_value(RunSpec& spec, const std::string& key, const std::string& value) {
  auto& cfg = spec.config;
  if (key == "n") {
    cfg.n = static_cast<int>(parse_integer(key, value));
  } else if (key == "m") {
    cfg.m = static_cast<int>(parse_integer(key, value));
  } else if (key == "delta") {
    cfg.delta = parse_double(key, value);
  } else if (key == "q") {
    cfg.q = parse_double(key, value);
  } else if (key == "lambda") {
    cfg.lambda = parse_double(key, value);
  } else if (key == "f") {
    cfg.f = static_cast<int>(parse_integer(key, value));
  } else if (key == "M") {
    cfg.M = static_cast<int>(parse_integer(key, value));
  } else if (key == "slots") {
    spec.simulation.slots = parse_integer(key, value);
  } else if (key == "warmup") {
    spec.simulation.warmup = parse_integer(key, value);
    spec.warmup_set = true;
  } else if (key == "seed") {
    spec.simulation.seed = static_cast<std::uint64_t>(parse_integer(key, value));
  } else if (key == "replicas") {
    spec.simulation.replicas = static_cast<int>(parse_integer(key, value));
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

SweepAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("sweep axis must look like name=values: '" + text + "'");
  SweepAxis axis;
  axis.name = trim(text.substr(0, eq));
  const std::string body = trim(text.substr(eq + 1));
  NetworkConfig probe;
  set_axis_value(probe, axis.name, 1.0);  // rejects unknown names

  if (body.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_double(axis.name, trim(item)));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
      throw std::invalid_argument("range must be start:stop:step with step > 0 and stop >= start");
    }
    const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
    for (long k = 0; k < count; ++k) axis.values.push_back(parts[0] + static_cast<double>(k) * parts[2]);
  } else {
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) axis.values.push_back(parse_double(axis.name, trim(item)));
  }
  if (axis.values.empty()) throw std::invalid_argument("sweep axis '" + axis.name + "' has no values");
  return axis;
}

std::vector<NetworkConfig> sweep_grid(const NetworkConfig& base, const std::vector<SweepAxis>& axes) {
  if (axes.empty() || axes.size() > 2) throw std::invalid_argument("sweep needs one or two axes");
  if (axes.size() == 2 && axes[0].name == axes[1].name) throw std::invalid_argument("sweep axes must differ");
  std::vector<NetworkConfig> grid;
  const auto& first = axes[0];
  const std::size_t inner = axes.size() == 2 ? axes[1].values.size() : 1;
  for (double a : first.values) {
    for (std::size_t k = 0; k < inner; ++k) {
      NetworkConfig cfg = base;
      set_axis_value(cfg, first.name, a);
      if (axes.size() == 2) set_axis_value(cfg, axes[1].name, axes[1].values[k]);
      validate_config(cfg);
      if (!(cfg.lambda > 0.0)) throw std::invalid_argument("lambda > 0 required for conditional distribution");
      grid.push_back(cfg);
    }
  }
  return grid;
}

std::string config_header(const NetworkConfig& cfg) {
  std::ostringstream out;
  out << std::setprecision(17) << "# n=" << cfg.n << " m=" << cfg.m << " delta=" << cfg.delta << " q=" << cfg.q
      << " lambda=" << cfg.lambda << " f=" << cfg.f << " M=" << cfg.M;
  return out.str();
}

}  // namespace srcdelay::app
