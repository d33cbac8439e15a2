#include "srcdelay/model_params.hpp"

#include <cmath>

namespace srcdelay {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out = "invalid network config: ";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += "; ";
    out += parts[i];
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::invalid_argument(join(violations)), violations_(std::move(violations)) {}

std::vector<std::string> config_violations(const NetworkConfig& cfg) {
  std::vector<std::string> v;
  if (cfg.n < 2) v.emplace_back("n >= 2 required");
  if (cfg.m < 4) v.emplace_back("m >= 4 required");
  if (!(cfg.delta >= 0.0) || !std::isfinite(cfg.delta)) v.emplace_back("delta >= 0 required");
  if (!(cfg.q > 0.0 && cfg.q < 1.0)) v.emplace_back("0 < q < 1 required");
  if (!(cfg.lambda >= 0.0 && cfg.lambda < 1.0)) v.emplace_back("0 <= lambda < 1 required");
  if (cfg.f < 1) v.emplace_back("f >= 1 required");
  if (cfg.M < 1) v.emplace_back("M >= 1 required");
  return v;
}

NetworkConfig validate_config(const NetworkConfig& cfg) {
  auto v = config_violations(cfg);
  if (!v.empty()) throw ConfigError(std::move(v));
  return cfg;
}

int compute_alpha(int m, double delta) {
  const double reach = (1.0 + delta) * std::sqrt(8.0) + 2.0;
  const double a = std::ceil(reach);
  if (a >= static_cast<double>(m)) return m;
  return static_cast<int>(a);
}

ContactProbabilities contact_probabilities(const NetworkConfig& cfg) {
  validate_config(cfg);
  const double n = cfg.n;
  const double m2 = static_cast<double>(cfg.m) * cfg.m;
  const int alpha = compute_alpha(cfg.m, cfg.delta);
  const double a2 = static_cast<double>(alpha) * alpha;

  // ((m^2 - 1) / m^2)^(n - 1): probability that none of the other n - 1
  // nodes shares a given cell.
  const double empty = std::exp((n - 1.0) * std::log1p(-1.0 / m2));
  const double nn1 = n * (n - 1.0);

  ContactProbabilities p;
  p.alpha = alpha;
  p.p0 = ((9.0 * n - m2) / nn1 - empty * (8.0 * n + 1.0 - m2) / nn1) / a2;
  p.p1 = cfg.q * (m2 - 9.0) / (a2 * (n - 1.0)) * (1.0 - empty);
  p.p2 = 1.0 - p.p0 - p.p1;
  return p;
}

}  // namespace srcdelay
