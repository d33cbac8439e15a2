#ifndef SRCDELAY_SIMULATOR_HPP
#define SRCDELAY_SIMULATOR_HPP

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "srcdelay/qbd.hpp"

namespace srcdelay {

struct Packet {
  std::int64_t inserted_slot = 0;
  int dispatches = 0;
};

/// Per-node indicators for one slot. Exactly one of source_destination,
/// dispatch, idle is set.
struct NodeEvents {
  bool source_destination = false;  // I0
  bool dispatch = false;            // I1
  bool idle = false;                // I2
  bool generated = false;           // I3
  bool acceptable = false;          // I4: queue below M after service
  bool accepted = false;            // generated && acceptable
};

struct Removal {
  int node = 0;
  std::int64_t inserted_slot = 0;
  std::int64_t removed_slot = 0;

  std::int64_t delay() const { return removed_slot - inserted_slot; }
};

struct SlotEvents {
  std::int64_t slot = 0;
  int active_ec = 0;
  std::vector<NodeEvents> nodes;
  std::vector<int> transmitters;
  std::vector<Removal> removals;
  int interference_violations = 0;
};

/// Slot-level state of the whole network: node cells, local queues and
/// the replica's random stream.
///
/// One slot runs: IID re-placement of every node; activation of EC number
/// (slot mod alpha^2) in row-major EC order; uniform selection of one node
/// per occupied active cell; PD-f at each selected node; then Bernoulli
/// generation at every node, accepted iff the queue is below M after
/// service.
class World {
 public:
  World(const NetworkConfig& cfg, std::uint64_t seed, std::uint64_t stream = 0);

  const NetworkConfig& config() const { return cfg_; }
  int alpha() const { return alpha_; }
  std::int64_t slot() const { return slot_; }
  const std::vector<int>& cells() const { return cells_; }
  const std::deque<Packet>& queue(int node) const { return queues_.at(static_cast<std::size_t>(node)); }
  QueueState queue_state(int node) const;

  /// Replaces a node's queue; used to seed scenarios in tests and oracles.
  void set_queue(int node, std::deque<Packet> packets);

  /// Fixed permutation traffic: node i sends to (i + 1) mod n.
  int destination(int node) const { return (node + 1) % cfg_.n; }

  /// Row-major EC index of a cell: (row mod alpha) * alpha + (col mod alpha).
  int ec_of_cell(int cell) const;

  /// True when cell b is in the 3 x 3 torus neighbourhood of cell a.
  bool in_range(int cell_a, int cell_b) const;

  /// Counts transmitter pairs violating the protocol-model guard distance.
  void set_interference_check(bool enabled) { check_interference_ = enabled; }

  SlotEvents step();
  void step(SlotEvents& events);

 private:
  void place_nodes();
  void select_transmitters(SlotEvents& events);
  void run_dispatch(int node, SlotEvents& events);
  void generate(SlotEvents& events);
  int count_interference(const std::vector<int>& transmitters) const;

  NetworkConfig cfg_;
  int alpha_;
  std::int64_t slot_ = 0;
  std::vector<int> cells_;
  std::vector<std::deque<Packet>> queues_;
  std::mt19937_64 rng_;
  bool check_interference_ = false;

  std::vector<std::vector<int>> occupants_;
  std::vector<int> touched_;
};

/// Delay samples of packets inserted at or after the warm-up and removed
/// before the run ended.
struct EmpiricalDelay {
  std::vector<std::int64_t> samples;
  std::int64_t generated = 0;  // post-warm-up generations
  std::int64_t accepted = 0;
  std::int64_t dropped = 0;
  std::int64_t slots_run = 0;    // per replica
  std::int64_t node_slots = 0;   // post-warm-up node-slots over all replicas
  std::uint64_t seed = 0;
  int replicas = 1;
};

EmpiricalDelay run(const NetworkConfig& cfg, std::int64_t slots, std::int64_t warmup, std::uint64_t seed,
                   std::uint64_t replica = 0);

struct SimulationOptions {
  std::int64_t slots = 100000;
  std::int64_t warmup = 0;
  std::uint64_t seed = 1;
  int replicas = 1;
  int threads = 0;  // 0: worker_count()
};

/// Independent replicas (streams seeded from (seed, replica)) merged in
/// replica order; the result does not depend on the thread count.
EmpiricalDelay run_replicas(const NetworkConfig& cfg, const SimulationOptions& options);

/// Per-slot frequencies of the three transmission outcomes of node 0 kept
/// backlogged with its head-of-line packet at phase 0.
struct EventFrequencies {
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double se0 = 0.0;
  double se1 = 0.0;
  double se2 = 0.0;
  std::int64_t slots = 0;
};

EventFrequencies single_slot_event_frequencies(const NetworkConfig& cfg, std::int64_t slots, std::uint64_t seed);

/// Fraction of node-slots spent in each queue state over `slots` slots that
/// follow `warmup` discarded slots, pooled over all nodes and recorded at the
/// start of each slot.
std::vector<double> queue_occupancy(const NetworkConfig& cfg, std::int64_t slots, std::int64_t warmup,
                                    std::uint64_t seed);

/// Worker cap: QBD_MANET_THREADS if set and positive, else hardware threads.
int worker_count();

}  // namespace srcdelay

#endif  // SRCDELAY_SIMULATOR_HPP
