#include "percodyn/brute.hpp"

#include <algorithm>
#include <array>

#include "percodyn/exact.hpp"

namespace percodyn::brute {

namespace {

constexpr int kChunks = 64;

struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

/// Sums term(i) for i in [0, count) in kChunks fixed chunks, each Kahan
/// summed, then reduced in chunk order. Serial and parallel agree bitwise.
template <class Term>
double chunked_sum(std::uint64_t count, Exec exec, const Term& term) {
  std::array<Kahan, kChunks> partial{};
  const std::uint64_t step = (count + kChunks - 1) / kChunks;
  auto run = [&](int c) {
    const std::uint64_t lo = c * step;
    const std::uint64_t hi = std::min(count, lo + step);
    for (std::uint64_t i = lo; i < hi; ++i) partial[c].add(term(i));
  };
  if (exec == Exec::serial) {
    for (int c = 0; c < kChunks; ++c) run(c);
  } else {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < kChunks; ++c) run(c);
  }
  Kahan total;
  for (const Kahan& k : partial) {
    total.add(k.sum);
    total.add(-k.carry);
  }
  return total.sum;
}

double weight(const TinyTree& tree, Config config, int skip = -1) {
  double w = 1.0;
  for (int e = 0; e < tree.edge_count(); ++e)
    if (e != skip) w *= (config >> e) & 1u ? tree.prob[e] : 1.0 - tree.prob[e];
  return w;
}

void check_size(const TinyTree& tree, int limit) {
  if (tree.edge_count() > limit)
    throw Error("brute oracle: tree has " + std::to_string(tree.edge_count()) +
                " edges, limit is " + std::to_string(limit));
}

}  // namespace

std::vector<int> TinyTree::levels() const {
  std::vector<int> level(vertex_count(), 0);
  for (int e = 0; e < edge_count(); ++e) level[e + 1] = level[parent[e]] + 1;
  return level;
}

TinyTree expand(const TreeProfile& profile, int depth) {
  if (depth < 1 || depth > profile.depth()) throw Error("expand: depth out of range");
  TinyTree tree;
  std::vector<int> frontier{0};
  int next = 1;
  for (int level = 0; level < depth; ++level) {
    std::vector<int> children;
    for (int v : frontier) {
      for (int c = 0; c < profile.degree(level); ++c) {
        tree.parent.push_back(v);
        tree.prob.push_back(profile.prob(level + 1));
        children.push_back(next++);
        if (tree.edge_count() > kMaxStaticEdges) throw Error("expand: tree too large for oracle");
      }
    }
    frontier = std::move(children);
  }
  return tree;
}

int connected_at_level(const TinyTree& tree, Config config, int level) {
  std::array<bool, kMaxStaticEdges + 1> reach{};
  std::array<int, kMaxStaticEdges + 1> depth{};
  reach[0] = true;
  int count = level == 0 ? 1 : 0;
  for (int e = 0; e < tree.edge_count(); ++e) {
    const int v = e + 1;
    depth[v] = depth[tree.parent[e]] + 1;
    reach[v] = reach[tree.parent[e]] && ((config >> e) & 1u);
    if (reach[v] && depth[v] == level) ++count;
  }
  return count;
}

Event root_reaches(const TinyTree& tree, int level) {
  return [tree, level](Config config) { return connected_at_level(tree, config, level) > 0; };
}

double static_prob(const TinyTree& tree, const Event& event, Exec exec) {
  check_size(tree, kMaxStaticEdges);
  const std::uint64_t count = std::uint64_t{1} << tree.edge_count();
  return chunked_sum(count, exec, [&](std::uint64_t i) {
    const auto config = static_cast<Config>(i);
    return event(config) ? weight(tree, config) : 0.0;
  });
}

double static_expectation(const TinyTree& tree, const std::function<double(Config)>& g,
                          Exec exec) {
  check_size(tree, kMaxStaticEdges);
  const std::uint64_t count = std::uint64_t{1} << tree.edge_count();
  return chunked_sum(count, exec, [&](std::uint64_t i) {
    const auto config = static_cast<Config>(i);
    return weight(tree, config) * g(config);
  });
}

double two_time_prob(const TinyTree& tree, double t, const Event2& event, Exec exec) {
  check_size(tree, kMaxTwoTimeEdges);
  const int edges = tree.edge_count();
  // law[e][2*x0 + xt]
  std::vector<std::array<double, 4>> law(edges);
  for (int e = 0; e < edges; ++e) {
    const exact::EdgeJoint j = exact::two_time_edge_joint(tree.prob[e], t);
    law[e] = {j.p00, j.p01, j.p10, j.p11};
  }
  const std::uint64_t per_time = std::uint64_t{1} << edges;
  return chunked_sum(per_time * per_time, exec, [&](std::uint64_t i) {
    const auto x0 = static_cast<Config>(i / per_time);
    const auto xt = static_cast<Config>(i % per_time);
    if (!event(x0, xt)) return 0.0;
    double w = 1.0;
    for (int e = 0; e < edges; ++e) w *= law[e][2 * ((x0 >> e) & 1u) + ((xt >> e) & 1u)];
    return w;
  });
}

double pivotal_prob(const TinyTree& tree, int edge, const Event& event) {
  check_size(tree, kMaxStaticEdges);
  if (edge < 0 || edge >= tree.edge_count()) throw Error("pivotal_prob: edge out of range");
  const Config bit = Config{1} << edge;
  const std::uint64_t count = std::uint64_t{1} << tree.edge_count();
  Kahan total;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto config = static_cast<Config>(i);
    if (config & bit) continue;  // enumerate the other edges once
    if (event(config) == event(config | bit)) continue;
    total.add(weight(tree, config, edge));
  }
  return total.sum;
}

}  // namespace percodyn::brute
