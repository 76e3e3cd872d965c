#pragma once

#include <vector>

#include "percodyn/common.hpp"
#include "percodyn/profile.hpp"

/// Exact level-recursive evaluation of static and two-time quantities on
/// spherically symmetric trees. Everything here is a pure function of the
/// profile and its arguments.
namespace percodyn::exact {

/// 1 - (1 - x)^d without cancellation for small x.
double one_minus_pow_complement(double x, int d);

/// a[k] = P(a level-k vertex connects to level `target` inside its subtree),
/// for k = from..target (indices below `from` are left at 0).
struct ConnectTable {
  int from = 0;
  int target = 0;
  std::vector<double> a;
};

ConnectTable subtree_connect_table(const TreeProfile& profile, int n);
ConnectTable subtree_connect_table(const TreeProfile& profile, int from, int target);

struct StaticTable {
  int n = 0;
  std::vector<double> a;      // A(k), k = 0..n
  double p_positive = 0.0;    // P(W_n > 0) = A(0)
  double log_p_single = 0.0;  // log P(W_n = 1)
  double p_single = 0.0;      // may underflow; log form is authoritative
  double log_w = 0.0;         // log E[W_n]
  double ratio2 = 0.0;        // E[W_n^2] / w_n^2
};

StaticTable survival_and_moments(const TreeProfile& profile, int n);

/// Reduced per-target record used by the sweep kernels.
struct SurvivalPoint {
  int n = 0;
  double p_positive = 0.0;
  double log_p_single = 0.0;
  double log_w = 0.0;
  double ratio2 = 0.0;
  double inverse_w_sum = 0.0;  // sum_{k=1}^{n} 1/w_k

  /// w_n^2 / E[W_n^2] <= P(W_n>0) <= 2 w_n^2 / E[W_n^2], returned as the
  /// worst violation (<= 0 when both hold).
  double energy_bound_violation() const;
  /// E[W_n] P(W_n=1) - P(W_n>0)^2 (<= 0 when the product bound holds).
  double product_bound_violation() const;
  /// P(root <-> T_n) * sum_{k<=n} 1/w_k.
  double lyons_ratio() const { return p_positive * inverse_w_sum; }
};

/// Survival quantities for every target in `targets`. O(sum of targets);
/// targets are independent, so the parallel kernel splits them.
std::vector<SurvivalPoint> survival_sweep(const TreeProfile& profile,
                                          const std::vector<int>& targets,
                                          Exec exec = Exec::parallel);

struct LyonsPoint {
  int n;
  double survival;
  double inverse_w_sum;
  double ratio;
};

std::vector<LyonsPoint> lyons_check(const TreeProfile& profile, const std::vector<int>& n_grid,
                                    Exec exec = Exec::parallel);

struct OneArm {
  int n = 0;
  int target = 0;        // deepest truncation evaluated
  int stop_target = 0;   // smallest ladder target after which every doubling is within tol
  double value = 0.0;    // P(level-n vertex reaches level `target` in its subtree)
  double rel_change = 0.0;  // |q(target) - q(midpoint)| / q(target)
  double tol = 0.0;
  bool converged = false;
};

/// Percolation of a level-n vertex "to infinity", approximated by a
/// doubling ladder of truncation targets up to N, with a relative Cauchy
/// certificate on the final doubling.
OneArm one_arm(const TreeProfile& profile, int n, int N, double tol = 1e-6);

struct EdgeJoint {
  double p11, p10, p01, p00;
};

/// Joint law of one edge's state at times 0 and t under stationary dynamics.
EdgeJoint two_time_edge_joint(double p, double t);

struct TwoTimeTable {
  int n = 0;
  int target = 0;
  double t = 0.0;
  double q = 0.0;          // q_n: reaches target at time 0
  double q_t = 0.0;        // q_n(t): reaches target at both times
  double q_tilde = 0.0;    // 1 - q_n
  double q_tilde_t = 0.0;  // fails at both times
  std::vector<EdgeJoint> edge_law;  // per level n+1..target
};

TwoTimeTable two_time_survival(const TreeProfile& profile, int n, int N, double t);

std::vector<double> default_t_grid(int n);

struct CorrelationPoint {
  double t;
  double q_t;
  double ratio;        // q_n(t) t / q_n^2
  double tilde_ratio;  // (q~_n(t)/q~_n^2 - 1) t / q_n^2
};

struct CorrelationRatio {
  int n = 0;
  int target = 0;
  double q = 0.0;
  double max_ratio = 0.0;
  double argmax_t = 0.0;
  double max_tilde_ratio = 0.0;
  std::vector<CorrelationPoint> points;
};

CorrelationRatio correlation_ratio(const TreeProfile& profile, int n, int N,
                                   const std::vector<double>& t_grid);

struct LeftmostChild {
  int j = 0;
  int target = 0;
  double b = 0.0;
  bool converged = false;
};

/// b_j: probability a level-j vertex percolates (to truncation N) through
/// its leftmost child.
LeftmostChild leftmost_child_prob(const TreeProfile& profile, int j, int N, double tol = 1e-6);

/// b_j for j < n_max and the per-level comparisons built from them, all
/// against one truncation target.
struct LeftmostTable {
  int target = 0;
  std::vector<double> b;             // b_j, j = 0..n_max-1
  std::vector<double> log_sibling_product;  // n -> sum_{i<n} (d_i - 1) log(1 - b_i)
  std::vector<double> tail_squared;  // n -> (sum_{m=n}^{target} 1/w_m)^2
  std::vector<double> sibling_ratio; // product / tail_squared
  std::vector<double> expected_u;    // n -> E[U_n] = b_{n-1} w_{n-1} d_{n-1}
  std::vector<double> single_u_times_expected;  // n -> P(U_n = 1) E[U_n]
};

LeftmostTable leftmost_table(const TreeProfile& profile, int n_max, int N);

struct InfluenceTable {
  int n = 0;        // edges of levels 1..n are tabulated
  int target = 0;   // event {root <-> T_target}
  std::vector<double> log_influence;  // index m = 1..n (0 unused)
  std::vector<double> influence;
  std::vector<double> u;              // |T_m| I(m)
  double boundary_expectation = 0.0;  // sum_m 2 p_m (1-p_m) u(m, n)
  double flip_intensity = 0.0;        // 2 sum_e I(e) p_e (1-p_e), per-edge route
};

InfluenceTable influence_table(const TreeProfile& profile, int n);
InfluenceTable influence_table(const TreeProfile& profile, int n, int target);

/// Expected components of {t in [0,T] : root <-> T_n}: P(on at 0) plus the
/// expected number of off->on switches, which is half the boundary rate.
double expected_components(const TreeProfile& profile, int n, double horizon = 1.0);

/// E|dZ_n| for every n in `targets`.
std::vector<double> boundary_sweep(const TreeProfile& profile, const std::vector<int>& targets,
                                   Exec exec = Exec::parallel);

enum class SeriesBehaviour { convergent, divergent };

/// Dyadic block test on a partial-sum sequence: the series is taken as
/// convergent when the increment over (n/2, n] is below 0.9 times the
/// increment over (n/4, n/2].
SeriesBehaviour dyadic_test(const std::vector<double>& partial, int n, double* block_ratio = nullptr);

enum class DynamicRegime { finite_components, many_flips, gap };

std::string to_string(DynamicRegime regime);

struct RegimeRow {
  int n;
  double sum_k_over_w;   // sum_{k<=n} k / w_k
  double harmonic;       // sum_{m<=n} 1/m
  double ex_proxy;       // sum_{m<=n} sum_{k>=m} 1/w_k
  double harmonic_ratio;     // harmonic / ex_proxy
  double sibling_partial;   // sum_{j<=n} (sum_{m>j} w_j/w_m)^-2
  double tail_partial;   // sum_{k<=n} ((k+1) w_k (sum_{i>=k} 1/w_i)^2)^-1
};

struct RegimeReport {
  std::vector<RegimeRow> rows;
  double ex_growth_exponent = 0.0;   // slope of log EX_proxy vs log n
  double ex_over_log_min = 0.0;      // min/max of EX_proxy(n)/ln n on the grid
  double ex_over_log_max = 0.0;
  std::string ex_growth;             // "bounded", "log", or "power"
  bool sum_k_over_w_converges = false;
  bool ratio_bounded = false;
  bool sibling_converges = false;
  bool tail_converges = false;
  bool inverse_w_converges = false;
  DynamicRegime regime = DynamicRegime::gap;
};

/// Series tails sum_{k>=m} 1/w_k are truncated at the profile depth, so
/// the grid should stay well inside it.
RegimeReport regime_report(const TreeProfile& profile, const std::vector<int>& n_grid);

}  // namespace percodyn::exact
