#include "percodyn/gadget.hpp"

#include <cmath>
#include <numeric>

#include "percodyn/rng.hpp"

namespace percodyn::gadget {

namespace {

int anchor_count(int j) { return 9 * (1 << j); }

void append_block_edges(const Block& block, int base, std::vector<std::pair<int, int>>& edges) {
  for (int y = block.y_min; y <= block.y_max; ++y) {
    for (int x = block.x_min; x <= block.x_max; ++x) {
      const int v = base + block.index(x, y);
      for (int c = 0; c < block.multiplicity; ++c) {
        if (x < block.x_max) edges.emplace_back(v, base + block.index(x + 1, y));
        if (y < block.y_max) edges.emplace_back(v, base + block.index(x, y + 1));
      }
    }
  }
}

std::vector<std::pair<int, int>> block_edges(const Block& block) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(block.edge_count);
  append_block_edges(block, 0, edges);
  return edges;
}

template <class Body>
std::vector<double> per_replica(std::int64_t replicas, Exec exec, const Body& body) {
  std::vector<double> values(replicas);
  if (exec == Exec::serial) {
    for (std::int64_t r = 0; r < replicas; ++r) values[r] = body(r);
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t r = 0; r < replicas; ++r) values[r] = body(r);
  }
  return values;
}

void check_replicas(std::int64_t replicas, std::int64_t minimum) {
  if (replicas < minimum)
    throw Error("need at least " + std::to_string(minimum) + " replicas");
}

}  // namespace

Block make_block(int j, int multiplicity, int radius) {
  if (j < 1) throw Error("gadget index j must be >= 1");
  if (multiplicity < 1) throw Error("edge multiplicity must be >= 1");
  if (radius < 1) throw Error("box radius too small to hold A_j");
  Block b;
  b.radius = radius;
  b.multiplicity = multiplicity;
  b.x_min = -radius;
  b.x_max = anchor_count(j) + radius;
  b.y_min = -radius;
  b.y_max = radius;
  const int width = b.x_max - b.x_min + 1;
  const int height = b.y_max - b.y_min + 1;
  b.vertex_count = width * height;
  b.edge_count = multiplicity * ((width - 1) * height + width * (height - 1));
  return b;
}

std::pair<int, int> gadget_size(int j, int multiplicity, int radius) {
  const Block b = make_block(j, multiplicity, radius);
  const int bridges = anchor_count(j);
  return {2 * b.vertex_count + bridges * (j - 1), 2 * b.edge_count + bridges * j};
}

GadgetGraph build_gadget(int j, int multiplicity, int radius) {
  GadgetGraph g;
  g.j = j;
  g.block = make_block(j, multiplicity, radius);
  const int copy = g.block.vertex_count;
  g.edges.reserve(2 * g.block.edge_count + anchor_count(j) * j);
  append_block_edges(g.block, 0, g.edges);
  append_block_edges(g.block, copy, g.edges);

  int next_vertex = 2 * copy;
  for (int i = 1; i <= anchor_count(j); ++i) {
    const int from = g.block.index(i, 0);
    const int to = copy + g.block.index(i, 0);
    Bridge bridge{i, static_cast<int>(g.edges.size()), j};
    int prev = from;
    for (int step = 1; step < j; ++step) {
      g.edges.emplace_back(prev, next_vertex);
      prev = next_vertex++;
    }
    g.edges.emplace_back(prev, to);
    g.bridges.push_back(bridge);
  }
  g.vertex_count = next_vertex;
  g.x = g.block.index(0, 0);
  g.y = copy + g.block.index(0, 0);
  return g;
}

Adjacency make_adjacency(int vertex_count, const std::vector<std::pair<int, int>>& edges) {
  Adjacency adj;
  adj.offset.assign(vertex_count + 1, 0);
  for (const auto& [u, v] : edges) {
    ++adj.offset[u + 1];
    ++adj.offset[v + 1];
  }
  std::partial_sum(adj.offset.begin(), adj.offset.end(), adj.offset.begin());
  adj.neighbor.resize(adj.offset.back());
  adj.edge.resize(adj.offset.back());
  std::vector<int> fill(adj.offset.begin(), adj.offset.end() - 1);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const auto [u, v] = edges[e];
    adj.neighbor[fill[u]] = v;
    adj.edge[fill[u]++] = e;
    adj.neighbor[fill[v]] = u;
    adj.edge[fill[v]++] = e;
  }
  return adj;
}

UnionFind::UnionFind(int n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

int UnionFind::find(int x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void UnionFind::unite(int a, int b) {
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
}

Estimate connect_estimate(const GadgetGraph& graph, double p, std::int64_t replicas,
                          std::uint64_t seed, Exec exec) {
  check_replicas(replicas, 100);
  const auto values = per_replica(replicas, exec, [&](std::int64_t r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    UnionFind uf(graph.vertex_count);
    for (const auto& [u, v] : graph.edges)
      if (rng.uniform() < p) uf.unite(u, v);
    return uf.connected(graph.x, graph.y) ? 1.0 : 0.0;
  });
  return summarize(values);
}

namespace {

/// Refresh dynamics sampled lazily: an edge's state is only materialized
/// when a traversal looks at it, using P(no refresh in (s, t]) = e^{-(t-s)}.
class LazyDynamics {
 public:
  LazyDynamics(const GadgetGraph& graph, const Adjacency& adj, double p, Rng& rng)
      : graph_(graph), adj_(adj), p_(p), rng_(rng), open_(graph.edge_count()),
        seen_(graph.edge_count(), 0.0), parent_edge_(graph.vertex_count),
        mark_(graph.vertex_count, 0) {
    // same draws, in the same order, as connect_estimate
    for (int e = 0; e < graph.edge_count(); ++e) open_[e] = rng_.uniform() < p_;
  }

  bool is_open(int e, double t) {
    if (t > seen_[e]) {
      if (rng_.uniform() >= std::exp(-(t - seen_[e]))) open_[e] = rng_.uniform() < p_;
      seen_[e] = t;
    }
    return open_[e] != 0;
  }

  void set(int e, bool state, double t) {
    open_[e] = state;
    seen_[e] = t;
  }

  /// Breadth-first search for an open x-y path at time t; fills `path`.
  bool find_path(double t, std::vector<int>& path) {
    ++stamp_;
    std::vector<int> queue{graph_.x};
    mark_[graph_.x] = stamp_;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int u = queue[head];
      if (u == graph_.y) {
        path.clear();
        for (int v = u; v != graph_.x;) {
          const int e = parent_edge_[v];
          path.push_back(e);
          v = graph_.edges[e].first == v ? graph_.edges[e].second : graph_.edges[e].first;
        }
        return true;
      }
      for (int k = adj_.offset[u]; k < adj_.offset[u + 1]; ++k) {
        const int v = adj_.neighbor[k];
        if (mark_[v] == stamp_) continue;
        if (!is_open(adj_.edge[k], t)) continue;
        mark_[v] = stamp_;
        parent_edge_[v] = adj_.edge[k];
        queue.push_back(v);
      }
    }
    return false;
  }

 private:
  const GadgetGraph& graph_;
  const Adjacency& adj_;
  double p_;
  Rng& rng_;
  std::vector<std::uint8_t> open_;
  std::vector<double> seen_;
  std::vector<int> parent_edge_;
  std::vector<int> mark_;
  int stamp_ = 0;
};

}  // namespace

Estimate persistence_estimate(const GadgetGraph& graph, double p, double epsilon,
                              std::int64_t replicas, std::uint64_t seed, Exec exec) {
  check_replicas(replicas, 2);
  if (!(epsilon > 0.0)) throw Error("persistence window must be positive");
  const Adjacency adj = make_adjacency(graph.vertex_count, graph.edges);

  const auto values = per_replica(replicas, exec, [&](std::int64_t r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    LazyDynamics dyn(graph, adj, p, rng);
    std::vector<int> witness;
    if (!dyn.find_path(0.0, witness)) return 0.0;
    double t = 0.0;
    // only a refresh that closes a witness edge can break the connection
    while (true) {
      t += rng.exponential(static_cast<double>(witness.size()));
      if (t > epsilon) return 1.0;
      const int e = witness[rng.below(witness.size())];
      if (rng.uniform() < p) {
        dyn.set(e, true, t);
        continue;
      }
      for (int f : witness) dyn.set(f, true, t);
      dyn.set(e, false, t);
      if (!dyn.find_path(t, witness)) return 0.0;
    }
  });
  return summarize(values);
}

Estimate block_one_arm(const Block& block, double p, std::int64_t replicas, std::uint64_t seed,
                       Exec exec) {
  check_replicas(replicas, 2);
  const auto edges = block_edges(block);
  const int boundary = block.vertex_count;  // virtual vertex glued to the box boundary
  const auto values = per_replica(replicas, exec, [&](std::int64_t r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    UnionFind uf(block.vertex_count + 1);
    for (int y = block.y_min; y <= block.y_max; ++y)
      for (int x = block.x_min; x <= block.x_max; ++x)
        if (x == block.x_min || x == block.x_max || y == block.y_min || y == block.y_max)
          uf.unite(block.index(x, y), boundary);
    for (const auto& [u, v] : edges)
      if (rng.uniform() < p) uf.unite(u, v);
    return uf.connected(block.index(0, 0), boundary) ? 1.0 : 0.0;
  });
  return summarize(values);
}

Estimate block_anchor_connection(int j, const Block& block, double p, std::int64_t replicas,
                                 std::uint64_t seed, Exec exec) {
  check_replicas(replicas, 2);
  const auto edges = block_edges(block);
  const int anchors = anchor_count(j);
  const auto values = per_replica(replicas, exec, [&](std::int64_t r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    UnionFind uf(block.vertex_count);
    for (const auto& [u, v] : edges)
      if (rng.uniform() < p) uf.unite(u, v);
    int hits = 0;
    for (int i = 1; i <= anchors; ++i) hits += uf.connected(block.index(0, 0), block.index(i, 0));
    return static_cast<double>(hits) / anchors;
  });
  return summarize(values);
}

MultiplicityChoice select_multiplicity(int j, int radius, double threshold,
                                       std::int64_t replicas, std::uint64_t seed, int m_max) {
  MultiplicityChoice choice;
  for (int m = 1; m <= m_max; ++m) {
    choice.multiplicity = m;
    choice.one_arm = block_one_arm(make_block(j, m, radius), 0.5, replicas, seed);
    if (choice.one_arm.mean >= threshold) return choice;
  }
  return choice;
}

}  // namespace percodyn::gadget
