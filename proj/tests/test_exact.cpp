#include <doctest.h>

#include <cmath>
#include <numbers>

#include "percodyn/brute.hpp"
#include "percodyn/exact.hpp"

using namespace percodyn;

namespace {

TreeProfile binary(double p, int depth) {
  return TreeProfile(std::vector<int>(depth, 2), std::vector<double>(depth, p));
}

}  // namespace

TEST_CASE("connect table on small trees") {
  CHECK(exact::subtree_connect_table(binary(0.5, 1), 1).a[0] == doctest::Approx(0.75));

  const auto two = exact::subtree_connect_table(binary(0.5, 2), 2);
  CHECK(two.a[1] == doctest::Approx(0.75));
  CHECK(two.a[0] == doctest::Approx(39.0 / 64.0).epsilon(1e-15));

  const TreeProfile path({1, 1, 1}, {0.7, 0.7, 0.7});
  CHECK(exact::subtree_connect_table(path, 3).a[0] == doctest::Approx(0.343).epsilon(1e-15));
}

TEST_CASE("1 - (1-x)^d is accurate for tiny x") {
  CHECK(exact::one_minus_pow_complement(1e-20, 3) == doctest::Approx(3e-20));
  CHECK(exact::one_minus_pow_complement(0.5, 2) == doctest::Approx(0.75));
  CHECK(exact::one_minus_pow_complement(1.0, 5) == 1.0);
}

TEST_CASE("moments of W_1 on the binary tree") {
  const auto t = exact::survival_and_moments(binary(0.5, 1), 1);
  CHECK(t.p_positive == doctest::Approx(0.75));
  CHECK(t.p_single == doctest::Approx(0.5));
  CHECK(std::exp(t.log_p_single) == doctest::Approx(0.5));
  CHECK(t.ratio2 == doctest::Approx(1.5));
  // energy bounds 2/3 <= 3/4 <= 4/3
  CHECK(1.0 / t.ratio2 <= t.p_positive);
  CHECK(t.p_positive <= 2.0 / t.ratio2);
  // E[W] P(W=1) = 0.5 <= 0.5625
  CHECK(std::exp(t.log_w) * t.p_single == doctest::Approx(0.5));
}

TEST_CASE("single edge moments") {
  for (double p : {0.1, 0.5, 0.9}) {
    const auto t = exact::survival_and_moments(TreeProfile({1}, {p}), 1);
    CHECK(t.p_single == doctest::Approx(p));
    CHECK(t.ratio2 == doctest::Approx(1.0 / p));
  }
}

TEST_CASE("exact moments agree with enumeration on a mixed tree") {
  const TreeProfile profile({2, 3}, {0.35, 0.6});
  const auto tree = brute::expand(profile, 2);
  const auto t = exact::survival_and_moments(profile, 2);
  const double w = std::exp(t.log_w);
  const double second = brute::static_expectation(tree, [&](brute::Config c) {
    const double k = brute::connected_at_level(tree, c, 2);
    return k * k;
  });
  const double single = brute::static_prob(tree, [&](brute::Config c) {
    return brute::connected_at_level(tree, c, 2) == 1;
  });
  CHECK(t.p_positive == doctest::Approx(brute::static_prob(tree, brute::root_reaches(tree, 2))).epsilon(1e-13));
  CHECK(t.p_single == doctest::Approx(single).epsilon(1e-13));
  CHECK(t.ratio2 == doctest::Approx(second / (w * w)).epsilon(1e-13));
}

TEST_CASE("survival sweep is identical in both execution modes") {
  const auto profile = binary(0.55, 300);
  std::vector<int> targets;
  for (int n = 1; n <= 300; n += 7) targets.push_back(n);
  const auto a = exact::survival_sweep(profile, targets, Exec::serial);
  const auto b = exact::survival_sweep(profile, targets, Exec::parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].p_positive == b[i].p_positive);
    CHECK(a[i].log_p_single == b[i].log_p_single);
    CHECK(a[i].ratio2 == b[i].ratio2);
  }
}

TEST_CASE("Lyons ratio on homogeneous trees") {
  // independent oracle: iterate a <- 1 - (1 - 0.6 a)^2 from a = 1, and sum 1.2^-k
  double a = 1.0, inv = 0.0;
  for (int k = 1; k <= 50; ++k) {
    a = 1.0 - (1.0 - 0.6 * a) * (1.0 - 0.6 * a);
    inv += std::pow(1.2, -k);
  }
  const auto super = exact::lyons_check(binary(0.6, 60), {50});
  CHECK(super[0].survival == doctest::Approx(a).epsilon(1e-14));
  CHECK(super[0].ratio == doctest::Approx(a * inv).epsilon(1e-13));
  CHECK(super[0].ratio == doctest::Approx(25.0 / 9.0).epsilon(1e-3));
  const auto critical = exact::lyons_check(binary(0.5, 1000), {10, 100, 1000});
  for (const auto& pt : critical) {
    CHECK(pt.ratio >= 0.5);
    CHECK(pt.ratio <= 4.0);
  }
}

TEST_CASE("one-arm converges to the fixed point 5/9") {
  const auto profile = binary(0.6, 4096);
  const auto oa = exact::one_arm(profile, 0, 4096, 1e-9);
  CHECK(oa.value == doctest::Approx(5.0 / 9.0).epsilon(1e-9));
  CHECK(oa.converged);

  const auto step = exact::one_arm(profile, 10, 11);
  CHECK(step.value == doctest::Approx(1.0 - 0.4 * 0.4));
}

TEST_CASE("edge joint law") {
  const auto j0 = exact::two_time_edge_joint(0.5, 0.0);
  CHECK(j0.p11 == doctest::Approx(0.5));
  CHECK(j0.p10 == doctest::Approx(0.0));
  const auto jl = exact::two_time_edge_joint(0.5, std::numbers::ln2);
  CHECK(jl.p11 == doctest::Approx(0.375));
  const auto jinf = exact::two_time_edge_joint(0.5, 50.0);
  CHECK(jinf.p11 == doctest::Approx(0.25));
  CHECK(jl.p11 + jl.p10 + jl.p01 + jl.p00 == doctest::Approx(1.0));
}

TEST_CASE("two-time survival limits") {
  const auto profile = binary(0.55, 40);
  const auto t0 = exact::two_time_survival(profile, 3, 40, 0.0);
  CHECK(t0.q_t == doctest::Approx(t0.q).epsilon(1e-15));
  CHECK(t0.q_tilde_t == doctest::Approx(t0.q_tilde).epsilon(1e-15));
  const auto t50 = exact::two_time_survival(profile, 3, 40, 50.0);
  CHECK(std::abs(t50.q_t - t50.q * t50.q) <= 1e-9);

  double prev = t0.q_t;
  for (double t : {0.01, 0.1, 0.5, 1.0, 3.0, 10.0}) {
    const double q_t = exact::two_time_survival(profile, 3, 40, t).q_t;
    CHECK(q_t <= prev);
    CHECK(q_t >= t0.q * t0.q);
    prev = q_t;
  }

  const auto small = exact::two_time_survival(binary(0.5, 1), 0, 1, std::numbers::ln2);
  // 1 - P(off at 0) - P(off at t) + P(off at both) = 1 - 2 (1/4) + (3/8)^2
  CHECK(small.q_t == doctest::Approx(41.0 / 64.0).epsilon(1e-15));
}

TEST_CASE("correlation ratio is at least one at t = 1") {
  const auto profile = binary(0.52, 200);
  const auto c = exact::correlation_ratio(profile, 20, 200, {0.05, 0.5, 1.0});
  CHECK(c.points.back().ratio >= 1.0);
  CHECK(c.max_ratio >= c.points.back().ratio);
}

TEST_CASE("leftmost-child probability") {
  const auto b = exact::leftmost_child_prob(binary(0.6, 4096), 0, 4096, 1e-9);
  CHECK(b.b == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

  const TreeProfile path({1, 1, 1, 1}, {0.9, 0.8, 0.7, 0.6});
  CHECK(exact::leftmost_child_prob(path, 1, 4).b == doctest::Approx(0.8 * 0.7 * 0.6));
}

TEST_CASE("influences on small trees") {
  const auto single = exact::influence_table(TreeProfile({1}, {0.3}), 1);
  CHECK(single.influence[1] == doctest::Approx(1.0));
  CHECK(single.u[1] == doctest::Approx(1.0));
  CHECK(single.boundary_expectation == doctest::Approx(2 * 0.3 * 0.7));

  const auto bin = exact::influence_table(binary(0.5, 1), 1);
  CHECK(bin.influence[1] == doctest::Approx(0.5));
  CHECK(bin.u[1] == doctest::Approx(1.0));
  CHECK(bin.boundary_expectation == doctest::Approx(0.5));
  CHECK(bin.flip_intensity == doctest::Approx(0.5));

  const auto path = exact::influence_table(TreeProfile({1, 1}, {0.5, 0.8}), 2);
  CHECK(path.influence[1] == doctest::Approx(0.8));
  CHECK(path.influence[2] == doctest::Approx(0.5));
  CHECK(path.flip_intensity == doctest::Approx(0.56));
}

TEST_CASE("influences match pivotal enumeration") {
  const TreeProfile profile({2, 2, 2}, {0.45, 0.7, 0.3});
  const auto tree = brute::expand(profile, 3);
  const auto levels = tree.levels();
  const auto inf = exact::influence_table(profile, 3);
  const auto event = brute::root_reaches(tree, 3);
  for (int e = 0; e < tree.edge_count(); ++e)
    CHECK(inf.influence[levels[e + 1]] == doctest::Approx(brute::pivotal_prob(tree, e, event)).epsilon(1e-13));
}

TEST_CASE("expected components on the lone edge") {
  // P(open at 0) + p(1-p) T
  CHECK(exact::expected_components(TreeProfile({1}, {0.5}), 1, 1.0) == doctest::Approx(0.75));
  CHECK(exact::expected_components(TreeProfile({1}, {0.5}), 1, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("dyadic block test") {
  std::vector<double> harmonic(1025, 0.0), squares(1025, 0.0);
  for (int k = 1; k <= 1024; ++k) {
    harmonic[k] = harmonic[k - 1] + 1.0 / k;
    squares[k] = squares[k - 1] + 1.0 / (double(k) * k);
  }
  CHECK(exact::dyadic_test(harmonic, 1024) == exact::SeriesBehaviour::divergent);
  CHECK(exact::dyadic_test(squares, 1024) == exact::SeriesBehaviour::convergent);
}
