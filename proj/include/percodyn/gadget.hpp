#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "percodyn/common.hpp"
#include "percodyn/stats.hpp"

/// Two multi-edge square-lattice blocks joined by 9 * 2^j bridge paths of
/// length j, with one terminal per block.
namespace percodyn::gadget {

struct Block {
  int radius = 0;     // margin around the segment {(i, 0) : 0 <= i <= 9 * 2^j}
  int x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  int multiplicity = 1;
  int vertex_count = 0;
  int edge_count = 0;  // with multiplicity

  int index(int x, int y) const { return (y - y_min) * (x_max - x_min + 1) + (x - x_min); }
};

/// Lattice block containing v_0 = (0,0) and A_j = {(i,0) : 1 <= i <= 9 * 2^j}.
Block make_block(int j, int multiplicity, int radius);

struct Bridge {
  int anchor;          // i such that the bridge joins the two copies of v_i
  int first_edge;      // edges first_edge .. first_edge + length - 1
  int length;
};

struct GadgetGraph {
  int j = 0;
  Block block;
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<Bridge> bridges;
  int x = 0;  // v_0 in the first copy
  int y = 0;  // v_0 in the second copy

  int edge_count() const { return static_cast<int>(edges.size()); }
};

GadgetGraph build_gadget(int j, int multiplicity, int radius);

/// Closed-form vertex and edge counts of build_gadget(j, m, radius).
std::pair<int, int> gadget_size(int j, int multiplicity, int radius);

/// Sparse adjacency for repeated traversals.
struct Adjacency {
  std::vector<int> offset;
  std::vector<int> neighbor;
  std::vector<int> edge;
};

Adjacency make_adjacency(int vertex_count, const std::vector<std::pair<int, int>>& edges);

class UnionFind {
 public:
  explicit UnionFind(int n);
  int find(int x);
  void unite(int a, int b);
  bool connected(int a, int b) { return find(a) == find(b); }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

/// P_p(x <-> y) by independent static samples. Replica r gives every edge
/// one uniform from stream (seed, r) and opens it iff uniform < p, so the
/// estimate is monotone in p replica by replica.
Estimate connect_estimate(const GadgetGraph& graph, double p, std::int64_t replicas,
                          std::uint64_t seed, Exec exec = Exec::parallel);

/// P(x <-> y at every time of [0, epsilon]) under stationary refresh
/// dynamics.
Estimate persistence_estimate(const GadgetGraph& graph, double p, double epsilon,
                              std::int64_t replicas, std::uint64_t seed,
                              Exec exec = Exec::parallel);

/// P_p(v_0 <-> boundary of one block).
Estimate block_one_arm(const Block& block, double p, std::int64_t replicas, std::uint64_t seed,
                       Exec exec = Exec::parallel);

/// P_p(v_0 <-> v_i within one block), averaged over the anchors of A_j.
Estimate block_anchor_connection(int j, const Block& block, double p, std::int64_t replicas,
                                 std::uint64_t seed, Exec exec = Exec::parallel);

struct MultiplicityChoice {
  int multiplicity = 1;
  Estimate one_arm;
};

/// Smallest m in [1, m_max] whose block one-arm estimate at p = 1/2 reaches
/// `threshold`.
MultiplicityChoice select_multiplicity(int j, int radius, double threshold,
                                       std::int64_t replicas, std::uint64_t seed,
                                       int m_max = 8);

}  // namespace percodyn::gadget
