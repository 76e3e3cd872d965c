#include "percodyn/sim.hpp"

#include <algorithm>
#include <cmath>

namespace percodyn::sim {

std::int64_t edge_count(const TreeProfile& profile, int depth) {
  if (depth < 1 || depth > profile.depth()) throw Error("simulation depth out of range");
  std::int64_t level_size = 1;
  std::int64_t total = 0;
  for (int k = 0; k < depth; ++k) {
    level_size *= profile.degree(k);
    total += level_size;
    if (level_size > kMaxEdges || total > kMaxEdges) return kMaxEdges + 1;
  }
  return total;
}

TruncatedTree::TruncatedTree(const TreeProfile& profile, int depth) : depth_(depth) {
  const std::int64_t edges = sim::edge_count(profile, depth);
  if (edges > kMaxEdges)
    throw Error("tree truncated at depth " + std::to_string(depth) + " exceeds 2^26 edges");
  parent_.reserve(edges + 1);
  level_.reserve(edges + 1);
  parent_.push_back(0);
  level_.push_back(0);
  level_begin_ = {0, 1};
  level_prob_.assign(depth + 1, 0.0);
  for (int k = 0; k < depth; ++k) {
    level_prob_[k + 1] = profile.prob(k + 1);
    for (std::int64_t v = level_begin_[k]; v < level_begin_[k + 1]; ++v) {
      for (int c = 0; c < profile.degree(k); ++c) {
        parent_.push_back(static_cast<std::int32_t>(v));
        level_.push_back(k + 1);
      }
    }
    level_begin_.push_back(static_cast<std::int64_t>(parent_.size()));
  }
}

namespace {

void add_flip(Timeline& tl, double time, bool now_on) {
  if (now_on) {
    ++tl.opening_flips;
    tl.on_intervals.push_back({time, time});
  } else {
    ++tl.closing_flips;
    tl.on_intervals.back().end = time;
  }
}

/// Intervals are opened as [t, t] and closed by the next closing flip; an
/// interval still open at the end extends to the horizon.
void finish_intervals(Timeline& tl, bool on_at_end) {
  if (on_at_end) tl.on_intervals.back().end = tl.horizon;
}

}  // namespace

Timeline assemble_timeline(double horizon, bool initially_on, std::vector<Event> events) {
  Timeline tl;
  tl.horizon = horizon;
  tl.initially_on = initially_on;
  if (initially_on) tl.on_intervals.push_back({0.0, 0.0});
  bool on = initially_on;
  for (const Event& ev : events) {
    if (ev.old_state == ev.new_state) {
      ++tl.refreshes;
      continue;
    }
    ++tl.refreshes;
    ++tl.switches;
    if (ev.pivotal) {
      on = !on;
      add_flip(tl, ev.time, on);
    }
  }
  finish_intervals(tl, on);
  tl.events = std::move(events);
  return tl;
}

Timeline reverse_timeline(const Timeline& timeline) {
  bool on = timeline.initially_on;
  for (const Event& ev : timeline.events)
    if (ev.pivotal && ev.old_state != ev.new_state) on = !on;
  std::vector<Event> reversed;
  reversed.reserve(timeline.events.size());
  for (auto it = timeline.events.rbegin(); it != timeline.events.rend(); ++it)
    reversed.push_back({timeline.horizon - it->time, it->edge, it->new_state, it->old_state,
                        it->pivotal});
  Timeline out = assemble_timeline(timeline.horizon, on, std::move(reversed));
  out.refreshes = timeline.refreshes;
  return out;
}

Simulator::Simulator(std::shared_ptr<const TruncatedTree> tree, double horizon,
                     std::uint64_t seed, bool record_events)
    : tree_(std::move(tree)), horizon_(horizon), seed_(seed), record_events_(record_events) {
  if (!(horizon_ >= 0.0)) throw Error("simulation horizon must be >= 0");
  open_.resize(tree_->edge_count());
  reach_.resize(tree_->vertex_count());
}

Timeline Simulator::run(std::uint64_t replica) {
  const TruncatedTree& tree = *tree_;
  const int depth = tree.depth();
  const std::int64_t vertices = tree.vertex_count();
  const std::int64_t edges = tree.edge_count();
  Rng rng(seed_, replica);

  // stationary start
  for (std::int64_t e = 0; e < edges; ++e)
    open_[e] = rng.bernoulli(tree.level_prob(tree.level(e + 1)));
  std::fill(reach_.begin(), reach_.end(), 0);
  for (std::int64_t v = tree.level_begin(depth); v < vertices; ++v) reach_[v] = 1;
  for (std::int64_t v = vertices - 1; v >= 1; --v)
    if (open_[v - 1]) reach_[tree.parent(v)] += reach_[v];

  Timeline tl;
  tl.horizon = horizon_;
  tl.initial_w = reach_[0];
  tl.w_min = tl.w_max = reach_[0];
  tl.initially_on = reach_[0] > 0;
  tl.switches_per_level.assign(depth + 1, 0);
  tl.flips_per_level.assign(depth + 1, 0);
  if (tl.initially_on) tl.on_intervals.push_back({0.0, 0.0});

  // superposition of rate-1 refresh clocks: one rate-|E| stream with a
  // uniformly chosen edge per mark
  const double rate = static_cast<double>(edges);
  double t = 0.0;
  while (true) {
    t += rng.exponential(rate);
    if (t > horizon_) break;
    const std::int64_t e = static_cast<std::int64_t>(rng.below(edges));
    const std::int64_t child = e + 1;
    const int level = tree.level(child);
    ++tl.refreshes;
    const bool next = rng.bernoulli(tree.level_prob(level));
    const bool prev = open_[e] != 0;
    if (next == prev) continue;
    open_[e] = next;
    ++tl.switches;
    ++tl.switches_per_level[level];

    bool pivotal = false;
    const std::int64_t carried = reach_[child];
    if (carried != 0) {
      const bool before = reach_[0] > 0;
      const std::int64_t delta = next ? carried : -carried;
      // counts above a closed edge do not see this subtree
      for (std::int64_t v = tree.parent(child);; v = tree.parent(v)) {
        reach_[v] += delta;
        if (v == 0 || !open_[v - 1]) break;
      }
      const bool after = reach_[0] > 0;
      pivotal = before != after;
      tl.w_min = std::min(tl.w_min, reach_[0]);
      tl.w_max = std::max(tl.w_max, reach_[0]);
      if (pivotal) {
        ++tl.flips_per_level[level];
        add_flip(tl, t, after);
      }
    }
    if (record_events_) tl.events.push_back({t, e, prev, next, pivotal});
  }
  finish_intervals(tl, reach_[0] > 0);
  return tl;
}

Timeline simulate_timeline(const SimConfig& config, std::uint64_t replica_index) {
  auto tree = std::make_shared<const TruncatedTree>(config.profile, config.depth);
  Simulator sim(std::move(tree), config.horizon, config.seed, config.record_events);
  return sim.run(replica_index);
}

ReplicaStats timeline_stats(const Timeline& tl) {
  ReplicaStats s;
  s.flips = static_cast<double>(tl.flips());
  s.opening_flips = static_cast<double>(tl.opening_flips);
  s.closing_flips = static_cast<double>(tl.closing_flips);
  s.switches = static_cast<double>(tl.switches);
  s.refreshes = static_cast<double>(tl.refreshes);
  s.components = static_cast<double>(tl.on_intervals.size());
  double on_time = 0.0;
  for (const Interval& iv : tl.on_intervals) {
    if (iv.begin > 0.0 && iv.begin < tl.horizon) ++s.boundary;
    if (iv.end > 0.0 && iv.end < tl.horizon) ++s.boundary;
    on_time += iv.end - iv.begin;
  }
  s.full_interval = tl.on_intervals.size() == 1 && tl.on_intervals[0].begin == 0.0 &&
                            tl.on_intervals[0].end == tl.horizon
                        ? 1.0
                        : 0.0;
  s.on_fraction = tl.horizon > 0.0 ? on_time / tl.horizon : (tl.initially_on ? 1.0 : 0.0);
  s.initially_on = tl.initially_on ? 1.0 : 0.0;
  s.w_min = static_cast<double>(tl.w_min);
  s.w_max = static_cast<double>(tl.w_max);
  return s;
}

SimStats monte_carlo(const SimConfig& config, Exec exec) {
  if (config.replicas < 2) throw Error("monte_carlo needs at least 2 replicas");
  auto tree = std::make_shared<const TruncatedTree>(config.profile, config.depth);
  SimStats out;
  out.replicas = config.replicas;
  out.per_replica.resize(config.replicas);
  const std::int64_t count = config.replicas;

  if (exec == Exec::serial) {
    Simulator sim(tree, config.horizon, config.seed, false);
    for (std::int64_t r = 0; r < count; ++r) out.per_replica[r] = timeline_stats(sim.run(r));
  } else {
#pragma omp parallel
    {
      Simulator sim(tree, config.horizon, config.seed, false);
#pragma omp for schedule(dynamic, 64)
      for (std::int64_t r = 0; r < count; ++r) out.per_replica[r] = timeline_stats(sim.run(r));
    }
  }

  auto column = [&](double ReplicaStats::*field) {
    std::vector<double> values(count);
    for (std::int64_t r = 0; r < count; ++r) values[r] = out.per_replica[r].*field;
    return summarize(values);
  };
  out.flips = column(&ReplicaStats::flips);
  out.opening_flips = column(&ReplicaStats::opening_flips);
  out.closing_flips = column(&ReplicaStats::closing_flips);
  out.switches = column(&ReplicaStats::switches);
  out.refreshes = column(&ReplicaStats::refreshes);
  out.components = column(&ReplicaStats::components);
  out.boundary = column(&ReplicaStats::boundary);
  out.full_interval = column(&ReplicaStats::full_interval);
  out.on_fraction = column(&ReplicaStats::on_fraction);
  out.initially_on = column(&ReplicaStats::initially_on);
  out.w_min = column(&ReplicaStats::w_min);
  out.w_max = column(&ReplicaStats::w_max);
  return out;
}

}  // namespace percodyn::sim
