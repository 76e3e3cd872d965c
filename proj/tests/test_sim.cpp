#include <doctest.h>

#include <cmath>

#include "percodyn/exact.hpp"
#include "percodyn/sim.hpp"

using namespace percodyn;

namespace {

TreeProfile binary(double p, int depth) {
  return TreeProfile(std::vector<int>(depth, 2), std::vector<double>(depth, p));
}

sim::SimConfig config(TreeProfile profile, int depth, std::int64_t replicas, std::uint64_t seed) {
  return {std::move(profile), depth, 1.0, replicas, seed, false};
}

bool same(const Estimate& a, const Estimate& b) {
  return a.mean == b.mean && a.se == b.se && a.count == b.count;
}

}  // namespace

TEST_CASE("tree layout") {
  const sim::TruncatedTree tree(binary(0.5, 3), 3);
  CHECK(tree.vertex_count() == 15);
  CHECK(tree.level_begin(3) == 7);
  CHECK(tree.parent(1) == 0);
  CHECK(tree.parent(14) == 6);
  CHECK(tree.level(14) == 3);
  CHECK(sim::edge_count(binary(0.5, 3), 3) == 14);
  CHECK(sim::edge_count(binary(0.5, 40), 40) == sim::kMaxEdges + 1);
  CHECK_THROWS_AS(sim::TruncatedTree(binary(0.5, 40), 40), Error);
}

TEST_CASE("single edge: every switch is a flip") {
  const auto stats = sim::monte_carlo(config(TreeProfile({1}, {0.5}), 1, 100000, 3));
  CHECK(std::abs(stats.switches.mean - 0.5) <= 3 * stats.switches.se);
  CHECK(stats.flips.mean == stats.switches.mean);
  CHECK(std::abs(stats.flips.mean - 0.5) <= 3 * stats.flips.se);
}

TEST_CASE("binary depth 1 flips match the influence sum") {
  const auto profile = binary(0.5, 1);
  const double exact = exact::influence_table(profile, 1).flip_intensity;
  CHECK(exact == doctest::Approx(0.5));
  const auto stats = sim::monte_carlo(config(profile, 1, 100000, 4));
  CHECK(std::abs(stats.flips.mean - exact) <= 3 * stats.flips.se);
}

TEST_CASE("binary depth 8 boundary and on-fraction match exact values") {
  const auto profile = binary(0.55, 8);
  const auto stats = sim::monte_carlo(config(profile, 8, 20000, 5));
  const double boundary = exact::influence_table(profile, 8).boundary_expectation;
  const double on = exact::survival_and_moments(profile, 8).p_positive;
  CHECK(std::abs(stats.boundary.mean - boundary) <= 4 * stats.boundary.se);
  CHECK(std::abs(stats.on_fraction.mean - on) <= 4 * stats.on_fraction.se);
}

TEST_CASE("zero horizon") {
  auto cfg = config(binary(0.5, 4), 4, 1, 9);
  cfg.horizon = 0.0;
  cfg.record_events = true;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto tl = sim::simulate_timeline(cfg, r);
    CHECK(tl.events.empty());
    CHECK(tl.on_intervals.size() == (tl.initially_on ? 1u : 0u));
    if (tl.initially_on) CHECK(tl.on_intervals[0].end == 0.0);
  }
}

TEST_CASE("timeline statistics") {
  SUBCASE("no events, initially connected") {
    const auto tl = sim::assemble_timeline(1.0, true, {});
    const auto s = sim::timeline_stats(tl);
    CHECK(s.components == 1);
    CHECK(s.boundary == 0);
    CHECK(s.full_interval == 1);
  }
  SUBCASE("close at 0.4, reopen at 0.7") {
    const auto tl = sim::assemble_timeline(1.0, true, {{0.4, 0, true, false, true},
                                                       {0.7, 0, false, true, true}});
    const auto s = sim::timeline_stats(tl);
    CHECK(s.components == 2);
    CHECK(s.boundary == 2);
    CHECK(tl.on_intervals[0].end == 0.4);
    CHECK(tl.on_intervals[1].begin == 0.7);
    CHECK(tl.on_intervals[1].end == 1.0);
    CHECK(s.on_fraction == doctest::Approx(0.7));
    CHECK(tl.opening_flips == 1);
    CHECK(tl.closing_flips == 1);
  }
}

TEST_CASE("time reversal mirrors the on-set") {
  auto cfg = config(binary(0.55, 6), 6, 1, 21);
  cfg.record_events = true;
  for (std::uint64_t r = 0; r < 50; ++r) {
    const auto tl = sim::simulate_timeline(cfg, r);
    const auto rev = sim::reverse_timeline(tl);
    REQUIRE(rev.on_intervals.size() == tl.on_intervals.size());
    const std::size_t k = tl.on_intervals.size();
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(rev.on_intervals[i].begin == doctest::Approx(1.0 - tl.on_intervals[k - 1 - i].end));
      CHECK(rev.on_intervals[i].end == doctest::Approx(1.0 - tl.on_intervals[k - 1 - i].begin));
    }
    CHECK(rev.opening_flips == tl.closing_flips);
    CHECK(rev.closing_flips == tl.opening_flips);
  }
}

TEST_CASE("components never exceed boundary / 2 + 1") {
  const auto stats = sim::monte_carlo(config(binary(0.55, 8), 8, 2000, 13));
  for (const auto& r : stats.per_replica) REQUIRE(r.components <= r.boundary / 2 + 1);
}

TEST_CASE("recorded events reproduce the counters") {
  auto cfg = config(binary(0.6, 7), 7, 1, 17);
  cfg.record_events = true;
  for (std::uint64_t r = 0; r < 30; ++r) {
    const auto tl = sim::simulate_timeline(cfg, r);
    const auto again = sim::assemble_timeline(tl.horizon, tl.initially_on, tl.events);
    CHECK(again.switches == tl.switches);
    CHECK(again.flips() == tl.flips());
    CHECK(again.on_intervals.size() == tl.on_intervals.size());
  }
}

TEST_CASE("monte carlo is deterministic and schedule-independent") {
  const auto cfg = config(binary(0.55, 9), 9, 3000, 99);
  const auto a = sim::monte_carlo(cfg, Exec::parallel);
  const auto b = sim::monte_carlo(cfg, Exec::parallel);
  const auto c = sim::monte_carlo(cfg, Exec::serial);
  CHECK(same(a.flips, b.flips));
  CHECK(same(a.flips, c.flips));
  CHECK(same(a.components, c.components));
  CHECK(same(a.on_fraction, c.on_fraction));
  CHECK_THROWS_AS(sim::monte_carlo(config(binary(0.5, 2), 2, 1, 0)), Error);
}
