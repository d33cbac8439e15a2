#ifndef SRCDELAY_MODEL_PARAMS_HPP
#define SRCDELAY_MODEL_PARAMS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace srcdelay {

/// Parameters of a cell-partitioned torus MANET running PD-f dispatch.
struct NetworkConfig {
  int n = 100;          // nodes
  int m = 8;            // cells per torus side
  double delta = 0.0;   // protocol-model guard factor
  double q = 0.4;       // dispatch probability when D is out of range
  double lambda = 0.001;  // per-slot packet generation probability
  int f = 2;            // dispatch limit
  int M = 7;            // local-queue buffer size (packets)

  bool operator==(const NetworkConfig&) const = default;
};

/// Thrown when a NetworkConfig violates one or more bounds. what() joins
/// every violation; violations() lists them individually.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Every violated bound of cfg, in field order. Empty means valid.
std::vector<std::string> config_violations(const NetworkConfig& cfg);

/// Returns cfg unchanged, or throws ConfigError naming every violation.
NetworkConfig validate_config(const NetworkConfig& cfg);

/// EC partition parameter: min(ceil((1 + delta) * sqrt(8) + 2), m).
int compute_alpha(int m, double delta);

/// Per-slot outcome probabilities of a backlogged source node.
struct ContactProbabilities {
  double p0 = 0.0;  // source-destination transmission
  double p1 = 0.0;  // packet-dispatch transmission
  double p2 = 1.0;  // neither
  int alpha = 1;
};

/// Closed-form p0, p1, p2 for cfg. Throws ConfigError for invalid configs.
ContactProbabilities contact_probabilities(const NetworkConfig& cfg);

}  // namespace srcdelay

#endif  // SRCDELAY_MODEL_PARAMS_HPP
