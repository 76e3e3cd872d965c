#include <doctest.h>

#include <cmath>
#include <numbers>

#include "percodyn/brute.hpp"

using namespace percodyn;
using brute::Config;

TEST_CASE("expand lays out parents before children") {
  const auto tree = brute::expand(TreeProfile({2, 2}, {0.5, 0.5}), 2);
  CHECK(tree.edge_count() == 6);
  CHECK(tree.parent == std::vector<int>{0, 0, 1, 1, 2, 2});
  CHECK(tree.levels() == std::vector<int>{0, 1, 1, 2, 2, 2, 2});
}

TEST_CASE("static probabilities") {
  const auto one = brute::expand(TreeProfile({2}, {0.5}), 1);
  CHECK(brute::static_prob(one, brute::root_reaches(one, 1)) == doctest::Approx(0.75));
  CHECK(brute::static_prob(one, [](Config) { return true; }) == 1.0);

  const auto two = brute::expand(TreeProfile({2, 2}, {0.5, 0.5}), 2);
  CHECK(brute::static_prob(two, brute::root_reaches(two, 2)) == doctest::Approx(39.0 / 64.0));
}

TEST_CASE("static enumeration is identical in both execution modes") {
  const auto tree = brute::expand(TreeProfile({2, 3}, {0.3, 0.65}), 2);
  const auto event = brute::root_reaches(tree, 2);
  CHECK(brute::static_prob(tree, event, Exec::serial) == brute::static_prob(tree, event, Exec::parallel));
}

TEST_CASE("two-time probabilities") {
  const auto edge = brute::expand(TreeProfile({1}, {0.5}), 1);
  const auto both = [](Config a, Config b) { return (a & 1u) && (b & 1u); };
  CHECK(brute::two_time_prob(edge, std::numbers::ln2, both) == doctest::Approx(0.375));

  const auto bin = brute::expand(TreeProfile({2}, {0.5}), 1);
  const auto reach = brute::root_reaches(bin, 1);
  const auto reach_both = [&](Config a, Config b) { return reach(a) && reach(b); };
  CHECK(brute::two_time_prob(bin, std::numbers::ln2, reach_both) == doctest::Approx(41.0 / 64.0));
  // some single branch open at both times: 2 (3/8) - (3/8)^2
  const auto branch_both = [](Config a, Config b) { return (a & b) != 0u; };
  CHECK(brute::two_time_prob(bin, std::numbers::ln2, branch_both) == doctest::Approx(0.609375));
  CHECK(brute::two_time_prob(bin, 0.0, reach_both) == doctest::Approx(brute::static_prob(bin, reach)));
}

TEST_CASE("two-time law is symmetric in time") {
  const auto tree = brute::expand(TreeProfile({2, 2}, {0.4, 0.7}), 2);
  const auto reach = brute::root_reaches(tree, 2);
  const auto on_off = [&](Config a, Config b) { return reach(a) && !reach(b); };
  const auto off_on = [&](Config a, Config b) { return !reach(a) && reach(b); };
  CHECK(brute::two_time_prob(tree, 0.3, on_off) == doctest::Approx(brute::two_time_prob(tree, 0.3, off_on)).epsilon(1e-14));
}

TEST_CASE("pivotal probabilities") {
  const auto edge = brute::expand(TreeProfile({1}, {0.3}), 1);
  CHECK(brute::pivotal_prob(edge, 0, brute::root_reaches(edge, 1)) == doctest::Approx(1.0));

  const auto bin = brute::expand(TreeProfile({2}, {0.5}), 1);
  CHECK(brute::pivotal_prob(bin, 0, brute::root_reaches(bin, 1)) == doctest::Approx(0.5));

  const auto path = brute::expand(TreeProfile({1, 1}, {0.5, 0.8}), 2);
  CHECK(brute::pivotal_prob(path, 0, brute::root_reaches(path, 2)) == doctest::Approx(0.8));
}

TEST_CASE("oversized trees are rejected") {
  CHECK_THROWS_AS(brute::expand(TreeProfile({2, 2, 2, 2}, {0.5, 0.5, 0.5, 0.5}), 4), Error);
  const auto three = brute::expand(TreeProfile({2, 2, 2}, {0.5, 0.5, 0.5}), 3);
  CHECK(three.edge_count() == 14);
  CHECK_THROWS_AS(brute::two_time_prob(three, 1.0, [](Config, Config) { return true; }), Error);
}
