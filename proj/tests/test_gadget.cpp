#include <doctest.h>

#include <cmath>

#include "percodyn/gadget.hpp"

using namespace percodyn;
using namespace percodyn::gadget;

TEST_CASE("j = 1 gadget by hand count") {
  const auto g = build_gadget(1, 1, 12);
  // block: x in [-12, 30], y in [-12, 12] -> 43 x 25 vertices
  const int bv = 43 * 25;
  const int be = 42 * 25 + 43 * 24;
  CHECK(g.block.vertex_count == bv);
  CHECK(g.block.edge_count == be);
  CHECK(g.bridges.size() == 18);
  CHECK(g.vertex_count == 2 * bv);
  CHECK(g.edge_count() == 2 * be + 18);
  const auto [v, e] = gadget_size(1, 1, 12);
  CHECK(v == g.vertex_count);
  CHECK(e == g.edge_count());
}

TEST_CASE("j = 2 bridges carry one interior vertex each") {
  const auto g = build_gadget(2, 3, 4);
  CHECK(g.bridges.size() == 36);
  for (const auto& b : g.bridges) CHECK(b.length == 2);
  CHECK(g.vertex_count - 2 * g.block.vertex_count == 36);
  CHECK(g.block.edge_count % 3 == 0);
  const auto [v, e] = gadget_size(2, 3, 4);
  CHECK(v == g.vertex_count);
  CHECK(e == g.edge_count());
}

TEST_CASE("invalid gadget parameters") {
  CHECK_THROWS_AS(build_gadget(0, 1, 4), Error);
  CHECK_THROWS_AS(build_gadget(1, 0, 4), Error);
  CHECK_THROWS_AS(build_gadget(1, 1, 0), Error);
}

TEST_CASE("union-find") {
  UnionFind uf(5);
  uf.unite(0, 1);
  uf.unite(3, 4);
  CHECK(uf.connected(0, 1));
  CHECK_FALSE(uf.connected(1, 3));
  uf.unite(1, 4);
  CHECK(uf.connected(0, 3));
}

TEST_CASE("static connection at the extremes") {
  for (int j : {1, 2}) {
    const auto g = build_gadget(j, 1, 2);
    const auto full = connect_estimate(g, 1.0, 100, 1);
    CHECK(full.mean == 1.0);
    CHECK(full.se == 0.0);
    CHECK(connect_estimate(g, 0.0, 100, 1).mean == 0.0);
  }
  CHECK_THROWS_AS(connect_estimate(build_gadget(1, 1, 2), 0.5, 99, 1), Error);
}

TEST_CASE("common random numbers make connection monotone in p") {
  const auto g = build_gadget(1, 1, 3);
  double prev = -1.0;
  for (double p : {0.3, 0.4, 0.45, 0.5, 0.55, 0.7}) {
    const double c = connect_estimate(g, p, 400, 8).mean;
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("persistence over a vanishing window equals static connection") {
  const auto g = build_gadget(1, 2, 3);
  const auto s = connect_estimate(g, 0.5, 2000, 12);
  const auto d = persistence_estimate(g, 0.5, 1e-6, 2000, 12);
  CHECK(std::abs(d.mean - s.mean) <= 3 * std::hypot(s.se, d.se) + 1e-12);
  CHECK(d.mean <= s.mean);
}

TEST_CASE("persistence never exceeds connection") {
  const auto g = build_gadget(2, 2, 3);
  const auto s = connect_estimate(g, 0.5, 500, 31);
  const auto d = persistence_estimate(g, 0.5, 0.5, 500, 31);
  CHECK(d.mean <= s.mean);
  CHECK_THROWS_AS(persistence_estimate(g, 0.5, 0.0, 500, 31), Error);
}

TEST_CASE("persistence of a lone edge") {
  GadgetGraph g;
  g.vertex_count = 2;
  g.edges = {{0, 1}};
  g.x = 0;
  g.y = 1;
  const double exact = 0.5 * std::exp(-0.5);
  CHECK(exact == doctest::Approx(0.3033).epsilon(1e-4));
  const auto d = persistence_estimate(g, 0.5, 1.0, 100000, 2);
  CHECK(std::abs(d.mean - exact) <= 3 * d.se);
}

TEST_CASE("estimates are schedule-independent") {
  const auto g = build_gadget(1, 2, 4);
  const auto a = persistence_estimate(g, 0.5, 0.5, 300, 77, Exec::parallel);
  const auto b = persistence_estimate(g, 0.5, 0.5, 300, 77, Exec::serial);
  CHECK(a.mean == b.mean);
  CHECK(a.se == b.se);
}

TEST_CASE("block one-arm grows with multiplicity") {
  const double m1 = block_one_arm(make_block(1, 1, 6), 0.5, 1000, 3).mean;
  const double m3 = block_one_arm(make_block(1, 3, 6), 0.5, 1000, 3).mean;
  CHECK(m3 > m1);
  const auto choice = select_multiplicity(1, 6, 0.95, 1000, 3);
  CHECK(choice.one_arm.mean >= 0.95);
  if (choice.multiplicity > 1)
    CHECK(block_one_arm(make_block(1, choice.multiplicity - 1, 6), 0.5, 1000, 3).mean < 0.95);
}
