#include <doctest.h>

#include <cmath>

#include "percodyn/fit.hpp"
#include "percodyn/profile.hpp"

using namespace percodyn;

namespace {

ProfileSpec homogeneous(int d, double p, int depth) {
  ProfileSpec s;
  s.kind = ProfileSpec::Kind::homogeneous;
  s.degree = d;
  s.prob = p;
  s.depth = depth;
  return s;
}

ProfileSpec target(GrowthFamily family, double exponent, int depth) {
  ProfileSpec s;
  s.kind = ProfileSpec::Kind::target_growth;
  s.target = {family, exponent, 1.0};
  s.depth = depth;
  return s;
}

}  // namespace

TEST_CASE("homogeneous profiles have w_n = (dp)^n") {
  const auto critical = build_profile(homogeneous(2, 0.5, 3)).profile;
  for (int n = 0; n <= 3; ++n) CHECK(critical.w(n) == doctest::Approx(1.0).epsilon(1e-15));

  const auto super = build_profile(homogeneous(2, 0.6, 3)).profile;
  CHECK(super.w(1) == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(super.w(2) == doctest::Approx(1.44).epsilon(1e-14));
  CHECK(super.w(3) == doctest::Approx(1.728).epsilon(1e-14));
}

TEST_CASE("explicit single level") {
  const TreeProfile p({2}, {0.5});
  CHECK(p.depth() == 1);
  CHECK(p.w(1) == doctest::Approx(1.0));
  CHECK(p.log_level_size(1) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("profile validation") {
  CHECK_THROWS_AS(TreeProfile({0}, {0.5}), Error);
  CHECK_THROWS_AS(TreeProfile({2}, {1.5}), Error);
  CHECK_THROWS_AS(TreeProfile({2, 2}, {0.5}), Error);
}

TEST_CASE("exponential growth stays finite in log space") {
  const auto p = build_profile(homogeneous(64, 0.9, 400)).profile;
  CHECK(std::isfinite(p.log_w(400)));
  CHECK(p.log_w(400) == doctest::Approx(400 * std::log(64 * 0.9)));
}

TEST_CASE("truncation keeps the leading levels") {
  const auto p = build_profile(homogeneous(3, 0.4, 10)).profile;
  const auto t = p.truncated(4);
  CHECK(t.depth() == 4);
  for (int n = 0; n <= 4; ++n) CHECK(t.log_w(n) == p.log_w(n));
}

TEST_CASE("synthesis tracks n (log n)^2 within 5% from n = 16") {
  const auto r = build_profile(target(GrowthFamily::log_power, 2.0, 10000));
  CHECK(r.max_rel_deviation <= 0.05);
  CHECK(r.profile.min_prob() >= 0.3);
  CHECK(r.profile.max_prob() <= 0.7);
}

TEST_CASE("synthesis tracks n^3 within 5% from n = 16") {
  const auto r = build_profile(target(GrowthFamily::power, 3.0, 10000));
  CHECK(r.profile.min_prob() >= 0.3);
  CHECK(r.profile.max_prob() <= 0.7);
  for (int n = 16; n <= 10000; ++n) {
    const double ratio = std::exp(r.profile.log_w(n) - 3.0 * std::log(n));
    REQUIRE(ratio >= 0.95);
    REQUIRE(ratio <= 1.05);
  }
}

TEST_CASE("a geometric target with a pinned probability factorizes exactly") {
  ProfileSpec s = target(GrowthFamily::geometric, 1.2, 20);
  s.range = {0.6, 0.6};
  s.degree_cap = 2;
  const auto r = build_profile(s);
  CHECK(r.max_rel_deviation < 1e-12);
  for (int k = 0; k < 20; ++k) {
    CHECK(r.profile.degree(k) == 2);
    CHECK(r.profile.prob(k + 1) == 0.6);
  }
}

TEST_CASE("greedy synthesis is prefix-stable") {
  const auto deep = build_profile(target(GrowthFamily::power, 1.5, 2000)).profile;
  const auto shallow = build_profile(target(GrowthFamily::power, 1.5, 500)).profile;
  for (int n = 0; n <= 500; ++n) CHECK(shallow.log_w(n) == deep.log_w(n));
}

TEST_CASE("static regime labels") {
  const auto critical = regime_label(build_profile(homogeneous(2, 0.5, 1000)).profile);
  CHECK(critical.regime == Regime::subcritical);
  CHECK(critical.inverse_w_sum == doctest::Approx(1000.0));

  const auto log3 = regime_label(build_profile(target(GrowthFamily::log_power, 3.0, 10000)).profile);
  CHECK(log3.regime == Regime::percolating);
  CHECK(log3.log_exponent == doctest::Approx(3.0).epsilon(0.1));

  const auto linear = regime_label(build_profile(target(GrowthFamily::power, 1.0, 10000)).profile);
  CHECK(linear.regime == Regime::subcritical);

  CHECK_THROWS_AS(regime_label(build_profile(homogeneous(2, 0.5, 50)).profile), Error);
}

TEST_CASE("least squares recovers an exact line") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 - 0.5 * v);
  const auto fit = least_squares({std::vector<double>(5, 1.0), x}, y);
  CHECK(fit.coef[0] == doctest::Approx(2.0));
  CHECK(fit.coef[1] == doctest::Approx(-0.5));
  CHECK(fit.rms_residual < 1e-12);

  std::vector<double> sq;
  for (double v : x) sq.push_back(3.0 * v * v);
  CHECK(log_log_slope(x, sq) == doctest::Approx(2.0));
}
