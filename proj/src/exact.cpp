#include "percodyn/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "percodyn/fit.hpp"

namespace percodyn::exact {

namespace {

constexpr double kLogGuard = 1e6;

void check_level(const TreeProfile& profile, int n, const char* what) {
  if (n < 0 || n > profile.depth())
    throw Error(std::string(what) + ": level " + std::to_string(n) + " outside [0, depth]");
}

void guard_log(double value) {
  if (!(std::abs(value) <= kLogGuard))
    throw Error("log-magnitude guard exceeded; profile is malformed");
}

/// A(from) for target level `target`, without materializing the table.
double connect_value(const TreeProfile& profile, int from, int target) {
  double a = 1.0;
  for (int k = target - 1; k >= from; --k)
    a = one_minus_pow_complement(profile.prob(k + 1) * a, profile.degree(k));
  return a;
}

}  // namespace

double one_minus_pow_complement(double x, int d) {
  if (d == 1) return x;
  return -std::expm1(d * std::log1p(-x));
}

ConnectTable subtree_connect_table(const TreeProfile& profile, int n) {
  return subtree_connect_table(profile, 0, n);
}

ConnectTable subtree_connect_table(const TreeProfile& profile, int from, int target) {
  check_level(profile, target, "subtree_connect_table");
  if (from < 0 || from > target) throw Error("subtree_connect_table: from must lie in [0, target]");
  ConnectTable table{from, target, std::vector<double>(target + 1, 0.0)};
  table.a[target] = 1.0;
  for (int k = target - 1; k >= from; --k)
    table.a[k] = one_minus_pow_complement(profile.prob(k + 1) * table.a[k + 1], profile.degree(k));
  return table;
}

StaticTable survival_and_moments(const TreeProfile& profile, int n) {
  check_level(profile, n, "survival_and_moments");
  StaticTable out;
  out.n = n;
  out.a = subtree_connect_table(profile, n).a;
  out.p_positive = out.a[0];

  // exactly one level-n descendant: one child branch carries it, the
  // other d_k - 1 branches reach nothing
  double log_single = 0.0;
  for (int k = n - 1; k >= 0; --k) {
    const int d = profile.degree(k);
    const double p = profile.prob(k + 1);
    log_single += std::log(static_cast<double>(d)) + std::log(p) +
                  (d - 1) * std::log1p(-p * out.a[k + 1]);
    guard_log(log_single);
  }
  out.log_p_single = log_single;
  out.p_single = std::exp(log_single);
  out.log_w = profile.log_w(n);
  guard_log(out.log_w);

  // ordered pairs of level-n vertices whose last common ancestor sits at
  // level k contribute (1 - 1/d_k) / w_k after normalizing by w_n^2
  double ratio = std::exp(-out.log_w);
  for (int k = 0; k < n; ++k)
    ratio += (1.0 - 1.0 / profile.degree(k)) * std::exp(-profile.log_w(k));
  out.ratio2 = ratio;
  return out;
}

double SurvivalPoint::energy_bound_violation() const {
  const double lower = 1.0 / ratio2;
  const double upper = 2.0 / ratio2;
  return std::max(lower - p_positive, p_positive - upper);
}

double SurvivalPoint::product_bound_violation() const {
  return std::exp(log_w + log_p_single) - p_positive * p_positive;
}

namespace {

struct LevelCache {
  std::vector<double> ratio2_prefix;   // sum_{k<n} (1-1/d_k)/w_k
  std::vector<double> inverse_prefix;  // sum_{k=1}^{n} 1/w_k
};

LevelCache build_cache(const TreeProfile& profile, int max_target) {
  LevelCache cache;
  cache.ratio2_prefix.assign(max_target + 1, 0.0);
  cache.inverse_prefix.assign(max_target + 1, 0.0);
  for (int n = 1; n <= max_target; ++n) {
    cache.ratio2_prefix[n] = cache.ratio2_prefix[n - 1] +
                             (1.0 - 1.0 / profile.degree(n - 1)) * std::exp(-profile.log_w(n - 1));
    cache.inverse_prefix[n] = cache.inverse_prefix[n - 1] + std::exp(-profile.log_w(n));
  }
  return cache;
}

SurvivalPoint survival_point(const TreeProfile& profile, const LevelCache& cache, int n) {
  SurvivalPoint pt;
  pt.n = n;
  double a = 1.0;
  double log_single = 0.0;
  for (int k = n - 1; k >= 0; --k) {
    const int d = profile.degree(k);
    const double pa = profile.prob(k + 1) * a;
    log_single += std::log(static_cast<double>(d)) + std::log(profile.prob(k + 1)) +
                  (d - 1) * std::log1p(-pa);
    a = one_minus_pow_complement(pa, d);
  }
  guard_log(log_single);
  pt.p_positive = a;
  pt.log_p_single = log_single;
  pt.log_w = profile.log_w(n);
  pt.ratio2 = std::exp(-pt.log_w) + cache.ratio2_prefix[n];
  pt.inverse_w_sum = cache.inverse_prefix[n];
  return pt;
}

}  // namespace

std::vector<SurvivalPoint> survival_sweep(const TreeProfile& profile,
                                          const std::vector<int>& targets, Exec exec) {
  int max_target = 0;
  for (int n : targets) {
    check_level(profile, n, "survival_sweep");
    max_target = std::max(max_target, n);
  }
  const LevelCache cache = build_cache(profile, max_target);
  std::vector<SurvivalPoint> out(targets.size());
  const auto count = static_cast<std::int64_t>(targets.size());
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < count; ++i) out[i] = survival_point(profile, cache, targets[i]);
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < count; ++i) out[i] = survival_point(profile, cache, targets[i]);
  }
  return out;
}

std::vector<LyonsPoint> lyons_check(const TreeProfile& profile, const std::vector<int>& n_grid,
                                    Exec exec) {
  for (int n : n_grid)
    if (n < 1) throw Error("lyons_check: grid must lie in [1, depth]");
  std::vector<LyonsPoint> out;
  for (const SurvivalPoint& pt : survival_sweep(profile, n_grid, exec))
    out.push_back({pt.n, pt.p_positive, pt.inverse_w_sum, pt.lyons_ratio()});
  return out;
}

OneArm one_arm(const TreeProfile& profile, int n, int N, double tol) {
  if (!(0 <= n && n < N && N <= profile.depth())) throw Error("one_arm: need 0 <= n < N <= depth");
  std::vector<int> ladder;
  for (int span = 1; span < N - n; span *= 2) ladder.push_back(n + span);
  ladder.push_back(N);

  std::vector<double> values;
  values.reserve(ladder.size());
  for (int target : ladder) values.push_back(connect_value(profile, n, target));

  OneArm out;
  out.n = n;
  out.target = N;
  out.tol = tol;
  out.value = values.back();
  out.stop_target = N;
  if (values.size() >= 2) {
    const double prev = values[values.size() - 2];
    out.rel_change = std::abs(out.value - prev) / out.value;
    out.converged = out.rel_change <= tol;
    for (std::size_t i = values.size() - 1; i >= 1; --i) {
      if (std::abs(values[i] - values[i - 1]) > tol * values[i]) break;
      out.stop_target = ladder[i - 1];
    }
  } else {
    out.rel_change = std::abs(out.value - 1.0) / out.value;
    out.converged = false;
  }
  return out;
}

EdgeJoint two_time_edge_joint(double p, double t) {
  const double decay = std::exp(-t);
  const double mixed = p * (1.0 - p);
  const double off = mixed * -std::expm1(-t);
  return {p * p + mixed * decay, off, off, (1.0 - p) * (1.0 - p) + mixed * decay};
}

TwoTimeTable two_time_survival(const TreeProfile& profile, int n, int N, double t) {
  if (!(0 <= n && n < N && N <= profile.depth()))
    throw Error("two_time_survival: need 0 <= n < N <= depth");
  if (!(t >= 0.0)) throw Error("two_time_survival: t must be >= 0");

  TwoTimeTable out;
  out.n = n;
  out.target = N;
  out.t = t;
  out.edge_law.reserve(N - n);

  // a: reaches target at one time, s: at both times, y: log P(fails at both)
  double a = 1.0;
  double s = 1.0;
  double y = -std::numeric_limits<double>::infinity();
  for (int k = N - 1; k >= n; --k) {
    const double p = profile.prob(k + 1);
    const int d = profile.degree(k);
    const EdgeJoint law = two_time_edge_joint(p, t);
    out.edge_law.push_back(law);
    const double branch_one = p * a;
    const double branch_both = law.p11 * s;
    const double x = d * std::log1p(-branch_one);
    y = d * std::log1p(-2.0 * branch_one + branch_both);
    a = -std::expm1(x);
    s = -2.0 * std::expm1(x) + std::expm1(y);
    if (s < -1e-12) throw Error("two_time_survival: negative probability (numeric pathology)");
    s = std::clamp(s, 0.0, a);
  }
  std::reverse(out.edge_law.begin(), out.edge_law.end());
  out.q = a;
  out.q_t = s;
  out.q_tilde = 1.0 - a;
  out.q_tilde_t = std::exp(y);
  return out;
}

std::vector<double> default_t_grid(int n) {
  return {1.0 / n, 2.0 / n, 0.01, 0.1, 0.5, 1.0};
}

CorrelationRatio correlation_ratio(const TreeProfile& profile, int n, int N,
                                   const std::vector<double>& t_grid) {
  CorrelationRatio out;
  out.n = n;
  out.target = N;
  for (double t : t_grid) {
    if (!(t > 0.0 && t <= 1.0)) throw Error("correlation_ratio: t-grid must lie in (0, 1]");
    const TwoTimeTable tt = two_time_survival(profile, n, N, t);
    out.q = tt.q;
    const double q2 = tt.q * tt.q;
    CorrelationPoint pt{t, tt.q_t, tt.q_t * t / q2,
                        (tt.q_t - q2) / ((1.0 - tt.q) * (1.0 - tt.q)) * t / q2};
    if (pt.ratio > out.max_ratio) {
      out.max_ratio = pt.ratio;
      out.argmax_t = t;
    }
    out.max_tilde_ratio = std::max(out.max_tilde_ratio, pt.tilde_ratio);
    out.points.push_back(pt);
  }
  return out;
}

LeftmostChild leftmost_child_prob(const TreeProfile& profile, int j, int N, double tol) {
  if (!(0 <= j && j + 1 < N && N <= profile.depth()))
    throw Error("leftmost_child_prob: need j + 1 < N <= depth");
  const OneArm arm = one_arm(profile, j + 1, N, tol);
  return {j, N, profile.prob(j + 1) * arm.value, arm.converged};
}

LeftmostTable leftmost_table(const TreeProfile& profile, int n_max, int N) {
  if (!(1 <= n_max && n_max < N && N <= profile.depth()))
    throw Error("leftmost_table: need 1 <= n_max < N <= depth");
  const ConnectTable table = subtree_connect_table(profile, N);

  LeftmostTable out;
  out.target = N;
  out.b.resize(n_max);
  for (int j = 0; j < n_max; ++j) out.b[j] = profile.prob(j + 1) * table.a[j + 1];

  std::vector<double> tail(N + 2, 0.0);
  for (int m = N; m >= 0; --m) tail[m] = tail[m + 1] + std::exp(-profile.log_w(m));

  out.log_sibling_product.assign(n_max + 1, 0.0);
  out.tail_squared.assign(n_max + 1, 0.0);
  out.sibling_ratio.assign(n_max + 1, 0.0);
  out.expected_u.assign(n_max + 1, 0.0);
  out.single_u_times_expected.assign(n_max + 1, 0.0);
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0)
      out.log_sibling_product[n] =
          out.log_sibling_product[n - 1] + (profile.degree(n - 1) - 1) * std::log1p(-out.b[n - 1]);
    out.tail_squared[n] = tail[n] * tail[n];
    out.sibling_ratio[n] = std::exp(out.log_sibling_product[n]) / out.tail_squared[n];
    if (n > 0) {
      const double log_eu = std::log(out.b[n - 1]) + profile.log_w(n - 1) +
                            std::log(static_cast<double>(profile.degree(n - 1)));
      out.expected_u[n] = std::exp(log_eu);
      out.single_u_times_expected[n] = std::exp(2.0 * log_eu + out.log_sibling_product[n]);
    }
  }
  return out;
}

InfluenceTable influence_table(const TreeProfile& profile, int n) {
  return influence_table(profile, n, n);
}

InfluenceTable influence_table(const TreeProfile& profile, int n, int target) {
  check_level(profile, target, "influence_table");
  if (n < 1 || n > target) throw Error("influence_table: need 1 <= n <= target");
  const ConnectTable table = subtree_connect_table(profile, target);

  InfluenceTable out;
  out.n = n;
  out.target = target;
  out.log_influence.assign(n + 1, 0.0);
  out.influence.assign(n + 1, 0.0);
  out.u.assign(n + 1, 0.0);

  // The edge into v_m is pivotal iff the path root..v_{m-1} is open, v_m
  // reaches the target, and no sibling branch off the path does.
  double log_path = 0.0;      // sum_{i<m} log p_i
  double log_siblings = 0.0;  // sum_{j<m} (d_j - 1) log(1 - p_{j+1} A(j+1))
  for (int m = 1; m <= n; ++m) {
    const int d = profile.degree(m - 1);
    const double p = profile.prob(m);
    log_siblings += (d - 1) * std::log1p(-p * table.a[m]);
    const double log_a = std::log(table.a[m]);
    out.log_influence[m] = log_path + log_a + log_siblings;
    guard_log(out.log_influence[m]);
    out.influence[m] = std::exp(out.log_influence[m]);
    // |T_m| p_1..p_{m-1} = w_{m-1} d_{m-1}
    out.u[m] = std::exp(profile.log_w(m - 1) + std::log(static_cast<double>(d)) + log_a +
                        log_siblings);
    out.boundary_expectation += 2.0 * p * (1.0 - p) * out.u[m];
    out.flip_intensity +=
        2.0 * std::exp(profile.log_level_size(m) + out.log_influence[m]) * p * (1.0 - p);
    log_path += std::log(p);
  }
  return out;
}

double expected_components(const TreeProfile& profile, int n, double horizon) {
  const InfluenceTable table = influence_table(profile, n);
  return connect_value(profile, 0, n) + 0.5 * horizon * table.boundary_expectation;
}

std::vector<double> boundary_sweep(const TreeProfile& profile, const std::vector<int>& targets,
                                   Exec exec) {
  for (int n : targets) {
    check_level(profile, n, "boundary_sweep");
    if (n < 1) throw Error("boundary_sweep: targets must be >= 1");
  }
  std::vector<double> out(targets.size());
  const auto count = static_cast<std::int64_t>(targets.size());
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < count; ++i)
      out[i] = influence_table(profile, targets[i]).boundary_expectation;
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < count; ++i)
      out[i] = influence_table(profile, targets[i]).boundary_expectation;
  }
  return out;
}

SeriesBehaviour dyadic_test(const std::vector<double>& partial, int n, double* block_ratio) {
  if (n < 8 || n >= static_cast<int>(partial.size())) throw Error("dyadic_test: n out of range");
  const double recent = partial[n] - partial[n / 2];
  const double before = partial[n / 2] - partial[n / 4];
  const double ratio = before > 0.0 ? recent / before : 0.0;
  if (block_ratio) *block_ratio = ratio;
  return ratio < 0.9 ? SeriesBehaviour::convergent : SeriesBehaviour::divergent;
}

std::string to_string(DynamicRegime regime) {
  switch (regime) {
    case DynamicRegime::finite_components: return "finite-components";
    case DynamicRegime::many_flips: return "many-flips";
    case DynamicRegime::gap: return "gap";
  }
  return "?";
}

RegimeReport regime_report(const TreeProfile& profile, const std::vector<int>& n_grid) {
  if (n_grid.empty()) throw Error("regime_report: empty grid");
  const int depth = profile.depth();
  const int n_max = *std::max_element(n_grid.begin(), n_grid.end());
  if (n_max >= depth || *std::min_element(n_grid.begin(), n_grid.end()) < 1)
    throw Error("regime_report: grid must lie in [1, depth)");

  std::vector<double> inv(depth + 1);
  for (int k = 0; k <= depth; ++k) inv[k] = std::exp(-profile.log_w(k));
  std::vector<double> tail(depth + 2, 0.0);  // sum_{i=k}^{depth} 1/w_i
  for (int k = depth; k >= 0; --k) tail[k] = tail[k + 1] + inv[k];

  std::vector<double> kw(n_max + 1, 0.0), harmonic(n_max + 1, 0.0), ex(n_max + 1, 0.0),
      sibling(n_max + 1, 0.0), tail_sum(n_max + 1, 0.0), inv_prefix(n_max + 1, 0.0);
  sibling[0] = std::exp(-2.0 * (profile.log_w(0) + std::log(tail[1])));
  tail_sum[0] = 1.0 / (tail[0] * tail[0]);
  for (int n = 1; n <= n_max; ++n) {
    kw[n] = kw[n - 1] + n * inv[n];
    harmonic[n] = harmonic[n - 1] + 1.0 / n;
    ex[n] = ex[n - 1] + tail[n];
    inv_prefix[n] = inv_prefix[n - 1] + inv[n];
    sibling[n] = sibling[n - 1] + std::exp(-2.0 * (profile.log_w(n) + std::log(tail[n + 1])));
    tail_sum[n] = tail_sum[n - 1] +
              std::exp(-(std::log(n + 1.0) + profile.log_w(n) + 2.0 * std::log(tail[n])));
  }

  RegimeReport report;
  std::vector<double> xs, ex_values;
  double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = 0.0;
  for (int n : n_grid) {
    report.rows.push_back({n, kw[n], harmonic[n], ex[n], harmonic[n] / ex[n], sibling[n], tail_sum[n]});
    xs.push_back(n);
    ex_values.push_back(ex[n]);
    if (n > 1) {
      const double r = ex[n] / std::log(double(n));
      ratio_min = std::min(ratio_min, r);
      ratio_max = std::max(ratio_max, r);
    }
  }
  report.ex_over_log_min = ratio_min;
  report.ex_over_log_max = ratio_max;
  if (xs.size() >= 2) report.ex_growth_exponent = log_log_slope(xs, ex_values);

  if (n_max >= 8) {
    report.sum_k_over_w_converges = dyadic_test(kw, n_max) == SeriesBehaviour::convergent;
    report.sibling_converges = dyadic_test(sibling, n_max) == SeriesBehaviour::convergent;
    report.tail_converges = dyadic_test(tail_sum, n_max) == SeriesBehaviour::convergent;
    const bool ex_bounded = dyadic_test(ex, n_max) == SeriesBehaviour::convergent;
    report.ex_growth = ex_bounded ? "bounded" : (report.ex_growth_exponent > 0.3 ? "power" : "log");
    const double ratio_now = harmonic[n_max] / ex[n_max];
    const double ratio_before = harmonic[n_max / 4] / ex[n_max / 4];
    report.ratio_bounded = ratio_now <= 1.1 * ratio_before;
  }
  report.inverse_w_converges =
      depth >= 100 ? regime_label(profile).regime == Regime::percolating
                   : dyadic_test(inv_prefix, n_max) == SeriesBehaviour::convergent;

  if (report.sum_k_over_w_converges) {
    report.regime = DynamicRegime::finite_components;
  } else if (report.inverse_w_converges && report.ratio_bounded && report.sibling_converges &&
             report.tail_converges) {
    report.regime = DynamicRegime::many_flips;
  } else {
    report.regime = DynamicRegime::gap;
  }
  return report;
}

}  // namespace percodyn::exact
