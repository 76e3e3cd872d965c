#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "percodyn/common.hpp"
#include "percodyn/profile.hpp"

/// Exhaustive-enumeration ground truth on tiny trees. Test harness only.
namespace percodyn::brute {

using Config = std::uint32_t;  // bit e set <=> edge e open

/// Rooted tree with vertex 0 as root; edge e joins parent[e] to child e+1,
/// with parents listed before children.
struct TinyTree {
  std::vector<int> parent;   // parent of vertex e+1
  std::vector<double> prob;  // open probability of edge e

  int edge_count() const { return static_cast<int>(parent.size()); }
  int vertex_count() const { return edge_count() + 1; }
  std::vector<int> levels() const;
};

inline constexpr int kMaxStaticEdges = 16;
inline constexpr int kMaxTwoTimeEdges = 10;

/// Expands the first `depth` levels of a spherically symmetric profile.
TinyTree expand(const TreeProfile& profile, int depth);

/// Number of level-`level` vertices connected to the root in `config`.
int connected_at_level(const TinyTree& tree, Config config, int level);

using Event = std::function<bool(Config)>;
using Event2 = std::function<bool(Config, Config)>;

/// Predicate {root <-> T_level}.
Event root_reaches(const TinyTree& tree, int level);

double static_prob(const TinyTree& tree, const Event& event, Exec exec = Exec::serial);

/// E[g(config)] for a real-valued observable.
double static_expectation(const TinyTree& tree, const std::function<double(Config)>& g,
                          Exec exec = Exec::serial);

/// Sum over the 4^|E| joint states (x0, xt) weighted by the per-edge joint
/// law of stationary refresh dynamics at lag t.
double two_time_prob(const TinyTree& tree, double t, const Event2& event,
                     Exec exec = Exec::serial);

/// P(toggling `edge` changes `event`).
double pivotal_prob(const TinyTree& tree, int edge, const Event& event);

}  // namespace percodyn::brute
