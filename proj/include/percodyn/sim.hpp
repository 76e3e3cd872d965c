#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "percodyn/common.hpp"
#include "percodyn/profile.hpp"
#include "percodyn/rng.hpp"
#include "percodyn/stats.hpp"

/// Event-driven simulation of refresh dynamics on a depth-truncated
/// spherically symmetric tree, tracking {root <-> T_n} over [0, T].
namespace percodyn::sim {

inline constexpr std::int64_t kMaxEdges = std::int64_t{1} << 26;

struct SimConfig {
  TreeProfile profile;
  int depth = 1;          // target level n
  double horizon = 1.0;   // T
  std::int64_t replicas = 1000;
  std::uint64_t seed = 0;
  bool record_events = false;
};

/// Exact edge count of the first `depth` levels, saturating at kMaxEdges + 1.
std::int64_t edge_count(const TreeProfile& profile, int depth);

/// Explicit vertex arrays for levels 0..depth in breadth-first order; edge
/// e is the edge above vertex e + 1.
class TruncatedTree {
 public:
  TruncatedTree(const TreeProfile& profile, int depth);

  int depth() const { return depth_; }
  std::int64_t vertex_count() const { return static_cast<std::int64_t>(parent_.size()); }
  std::int64_t edge_count() const { return vertex_count() - 1; }
  std::int32_t parent(std::int64_t v) const { return parent_[v]; }
  int level(std::int64_t v) const { return level_[v]; }
  double level_prob(int level) const { return level_prob_[level]; }
  std::int64_t level_begin(int level) const { return level_begin_[level]; }

 private:
  int depth_;
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> level_;
  std::vector<double> level_prob_;        // p_level, index 0 unused
  std::vector<std::int64_t> level_begin_;  // first vertex of each level, plus end
};

struct Event {
  double time;
  std::int64_t edge;
  bool old_state;
  bool new_state;
  bool pivotal;
};

struct Interval {
  double begin;
  double end;
};

struct Timeline {
  double horizon = 0.0;
  bool initially_on = false;
  std::int64_t initial_w = 0;
  std::vector<Event> events;           // state changes, kept when recorded
  std::vector<Interval> on_intervals;  // closed maximal intervals of {root <-> T_n}
  std::int64_t refreshes = 0;
  std::int64_t switches = 0;
  std::int64_t opening_flips = 0;  // pivotal switch creating the connection
  std::int64_t closing_flips = 0;  // pivotal switch breaking it
  std::vector<std::int64_t> switches_per_level;
  std::vector<std::int64_t> flips_per_level;
  std::int64_t w_min = 0;
  std::int64_t w_max = 0;

  /// Every pivotal switch; the on-set is closed, so the root connects at
  /// the switch instant and each one is a flip time.
  std::int64_t flips() const { return opening_flips + closing_flips; }
};

/// Rebuilds intervals and flip counters from an event list whose pivotal
/// flags are trusted. Per-level counters and W extremes are left empty.
Timeline assemble_timeline(double horizon, bool initially_on, std::vector<Event> events);

/// Time reversal t -> T - t of a recorded timeline.
Timeline reverse_timeline(const Timeline& timeline);

/// Reusable per-thread simulator over a shared truncated tree.
class Simulator {
 public:
  Simulator(std::shared_ptr<const TruncatedTree> tree, double horizon, std::uint64_t seed,
            bool record_events);

  Timeline run(std::uint64_t replica);

 private:
  std::shared_ptr<const TruncatedTree> tree_;
  double horizon_;
  std::uint64_t seed_;
  bool record_events_;
  std::vector<std::uint8_t> open_;
  std::vector<std::int64_t> reach_;  // level-n descendants reached inside the subtree
};

Timeline simulate_timeline(const SimConfig& config, std::uint64_t replica_index);

struct ReplicaStats {
  double flips = 0;
  double opening_flips = 0;
  double closing_flips = 0;
  double switches = 0;
  double refreshes = 0;
  double components = 0;
  double boundary = 0;
  double full_interval = 0;
  double on_fraction = 0;
  double initially_on = 0;
  double w_min = 0;
  double w_max = 0;
};

ReplicaStats timeline_stats(const Timeline& timeline);

struct SimStats {
  std::int64_t replicas = 0;
  Estimate flips, opening_flips, closing_flips, switches, refreshes, components, boundary,
      full_interval, on_fraction, initially_on, w_min, w_max;
  std::vector<ReplicaStats> per_replica;
};

/// Runs config.replicas independent replicas; replica k draws from stream
/// (seed, k) and results are reduced in replica order, so the output does
/// not depend on scheduling.
SimStats monte_carlo(const SimConfig& config, Exec exec = Exec::parallel);

}  // namespace percodyn::sim
