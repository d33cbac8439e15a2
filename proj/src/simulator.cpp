#include "srcdelay/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace srcdelay {

namespace {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

int torus_diff(int a, int b, int m) {
  const int d = std::abs(a - b);
  return std::min(d, m - d);
}

}  // namespace

World::World(const NetworkConfig& cfg, std::uint64_t seed, std::uint64_t stream)
    : cfg_(validate_config(cfg)),
      alpha_(compute_alpha(cfg.m, cfg.delta)),
      cells_(static_cast<std::size_t>(cfg.n), 0),
      queues_(static_cast<std::size_t>(cfg.n)),
      rng_(make_stream(seed, stream)),
      occupants_(static_cast<std::size_t>(cfg.m) * cfg.m) {}

QueueState World::queue_state(int node) const {
  const auto& q = queue(node);
  if (q.empty()) return {0, 0};
  return {static_cast<int>(q.size()), q.front().dispatches};
}

void World::set_queue(int node, std::deque<Packet> packets) {
  if (static_cast<int>(packets.size()) > cfg_.M) throw std::invalid_argument("queue longer than M");
  if (!packets.empty() && (packets.front().dispatches < 0 || packets.front().dispatches >= cfg_.f)) {
    throw std::invalid_argument("head-of-line dispatch count outside 0..f-1");
  }
  queues_.at(static_cast<std::size_t>(node)) = std::move(packets);
}

int World::ec_of_cell(int cell) const {
  const int row = cell / cfg_.m;
  const int col = cell % cfg_.m;
  return (row % alpha_) * alpha_ + (col % alpha_);
}

bool World::in_range(int cell_a, int cell_b) const {
  const int m = cfg_.m;
  return torus_diff(cell_a / m, cell_b / m, m) <= 1 && torus_diff(cell_a % m, cell_b % m, m) <= 1;
}

SlotEvents World::step() {
  SlotEvents events;
  step(events);
  return events;
}

void World::step(SlotEvents& events) {
  events.slot = slot_;
  events.active_ec = static_cast<int>(slot_ % (static_cast<std::int64_t>(alpha_) * alpha_));
  events.nodes.assign(static_cast<std::size_t>(cfg_.n), NodeEvents{});
  events.transmitters.clear();
  events.removals.clear();
  events.interference_violations = 0;

  place_nodes();
  select_transmitters(events);

  for (auto& e : events.nodes) e.idle = true;
  for (int node : events.transmitters) run_dispatch(node, events);
  if (check_interference_) events.interference_violations = count_interference(events.transmitters);

  generate(events);
  ++slot_;
}

void World::place_nodes() {
  std::uniform_int_distribution<int> pick(0, cfg_.m * cfg_.m - 1);
  for (auto& cell : cells_) cell = pick(rng_);
}

void World::select_transmitters(SlotEvents& events) {
  for (int cell : touched_) occupants_[static_cast<std::size_t>(cell)].clear();
  touched_.clear();
  for (int node = 0; node < cfg_.n; ++node) {
    const int cell = cells_[static_cast<std::size_t>(node)];
    if (ec_of_cell(cell) != events.active_ec) continue;
    auto& bucket = occupants_[static_cast<std::size_t>(cell)];
    if (bucket.empty()) touched_.push_back(cell);
    bucket.push_back(node);
  }
  for (int cell : touched_) {
    const auto& bucket = occupants_[static_cast<std::size_t>(cell)];
    std::uniform_int_distribution<std::size_t> pick(0, bucket.size() - 1);
    events.transmitters.push_back(bucket[pick(rng_)]);
  }
}

void World::run_dispatch(int node, SlotEvents& events) {
  auto& q = queues_[static_cast<std::size_t>(node)];
  auto& e = events.nodes[static_cast<std::size_t>(node)];
  if (q.empty()) return;  // remains idle

  const int dest = destination(node);
  bool remove = false;
  if (in_range(cells_[static_cast<std::size_t>(node)], cells_[static_cast<std::size_t>(dest)])) {
    e.source_destination = true;
    remove = true;
  } else {
    std::bernoulli_distribution coin(cfg_.q);
    if (!coin(rng_)) return;
    e.dispatch = true;
    remove = ++q.front().dispatches >= cfg_.f;
  }
  e.idle = false;
  if (remove) {
    events.removals.push_back({node, q.front().inserted_slot, slot_});
    q.pop_front();
  }
}

void World::generate(SlotEvents& events) {
  if (cfg_.lambda <= 0.0) {
    for (int node = 0; node < cfg_.n; ++node) {
      auto& e = events.nodes[static_cast<std::size_t>(node)];
      e.acceptable = static_cast<int>(queues_[static_cast<std::size_t>(node)].size()) < cfg_.M;
    }
    return;
  }
  std::bernoulli_distribution coin(cfg_.lambda);
  for (int node = 0; node < cfg_.n; ++node) {
    auto& q = queues_[static_cast<std::size_t>(node)];
    auto& e = events.nodes[static_cast<std::size_t>(node)];
    e.acceptable = static_cast<int>(q.size()) < cfg_.M;
    e.generated = coin(rng_);
    if (e.generated && e.acceptable) {
      e.accepted = true;
      q.push_back({slot_, 0});
    }
  }
}

int World::count_interference(const std::vector<int>& transmitters) const {
  const int m = cfg_.m;
  const double guard = (1.0 + cfg_.delta) * std::sqrt(8.0) / m;
  int violations = 0;
  for (int s : transmitters) {
    const int s_cell = cells_[static_cast<std::size_t>(s)];
    for (int w : transmitters) {
      if (w == s) continue;
      const int w_cell = cells_[static_cast<std::size_t>(w)];
      // Smallest distance from W's cell to any cell a receiver of S can occupy.
      double nearest = std::numeric_limits<double>::infinity();
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int r_row = ((s_cell / m + dr) % m + m) % m;
          const int r_col = ((s_cell % m + dc) % m + m) % m;
          const int gr = std::max(0, torus_diff(r_row, w_cell / m, m) - 1);
          const int gc = std::max(0, torus_diff(r_col, w_cell % m, m) - 1);
          nearest = std::min(nearest, std::hypot(gr, gc) / m);
        }
      }
      if (nearest < guard - 1e-12) ++violations;
    }
  }
  return violations;
}

EmpiricalDelay run(const NetworkConfig& cfg, std::int64_t slots, std::int64_t warmup, std::uint64_t seed,
                   std::uint64_t replica) {
  if (warmup < 0 || slots <= warmup) throw std::invalid_argument("need slots > warmup >= 0");
  World world(cfg, seed, replica);
  EmpiricalDelay out;
  out.seed = seed;
  out.slots_run = slots;
  SlotEvents events;
  for (std::int64_t t = 0; t < slots; ++t) {
    world.step(events);
    for (const auto& r : events.removals) {
      if (r.inserted_slot >= warmup) out.samples.push_back(r.delay());
    }
    if (t < warmup) continue;
    out.node_slots += cfg.n;
    for (const auto& e : events.nodes) {
      if (!e.generated) continue;
      ++out.generated;
      if (e.accepted) {
        ++out.accepted;
      } else {
        ++out.dropped;
      }
    }
  }
  return out;
}

int worker_count() {
  if (const char* env = std::getenv("QBD_MANET_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0) return cap;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

EmpiricalDelay run_replicas(const NetworkConfig& cfg, const SimulationOptions& options) {
  if (options.replicas < 1) throw std::invalid_argument("replicas >= 1 required");
  validate_config(cfg);
  const auto count = static_cast<std::size_t>(options.replicas);
  std::vector<EmpiricalDelay> parts(count);
  const int threads = std::min<int>(options.threads > 0 ? options.threads : worker_count(), options.replicas);

  std::vector<std::exception_ptr> errors(count);
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < count; i += static_cast<std::size_t>(threads)) {
      try {
        parts[i] = run(cfg, options.slots, options.warmup, options.seed, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, static_cast<std::size_t>(t));
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EmpiricalDelay merged;
  merged.seed = options.seed;
  merged.slots_run = options.slots;
  merged.replicas = options.replicas;
  for (auto& p : parts) {
    merged.samples.insert(merged.samples.end(), p.samples.begin(), p.samples.end());
    merged.generated += p.generated;
    merged.accepted += p.accepted;
    merged.dropped += p.dropped;
    merged.node_slots += p.node_slots;
  }
  return merged;
}

EventFrequencies single_slot_event_frequencies(const NetworkConfig& cfg, std::int64_t slots, std::uint64_t seed) {
  if (slots <= 0) throw std::invalid_argument("slots > 0 required");
  World world(cfg, seed);
  std::int64_t counts[3] = {0, 0, 0};
  SlotEvents events;
  for (std::int64_t t = 0; t < slots; ++t) {
    world.set_queue(0, {Packet{world.slot(), 0}});
    world.step(events);
    const auto& e = events.nodes[0];
    if (e.source_destination) {
      ++counts[0];
    } else if (e.dispatch) {
      ++counts[1];
    } else {
      ++counts[2];
    }
  }
  EventFrequencies out;
  out.slots = slots;
  const double n = static_cast<double>(slots);
  out.p0 = static_cast<double>(counts[0]) / n;
  out.p1 = static_cast<double>(counts[1]) / n;
  out.p2 = static_cast<double>(counts[2]) / n;
  out.se0 = std::sqrt(out.p0 * (1.0 - out.p0) / n);
  out.se1 = std::sqrt(out.p1 * (1.0 - out.p1) / n);
  out.se2 = std::sqrt(out.p2 * (1.0 - out.p2) / n);
  return out;
}

std::vector<double> queue_occupancy(const NetworkConfig& cfg, std::int64_t slots, std::int64_t warmup,
                                    std::uint64_t seed) {
  if (warmup < 0 || slots <= 0) throw std::invalid_argument("need slots > 0 and warmup >= 0");
  World world(cfg, seed);
  const StateIndexing indexing(cfg.M, cfg.f);
  std::vector<double> counts(indexing.size(), 0.0);
  SlotEvents events;
  for (std::int64_t t = 0; t < warmup; ++t) world.step(events);
  for (std::int64_t t = 0; t < slots; ++t) {
    for (int node = 0; node < cfg.n; ++node) counts[indexing.index(world.queue_state(node))] += 1.0;
    world.step(events);
  }
  const double total = static_cast<double>(slots) * cfg.n;
  for (auto& c : counts) c /= total;
  return counts;
}

}  // namespace srcdelay
