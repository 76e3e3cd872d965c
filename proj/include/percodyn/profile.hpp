#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "percodyn/common.hpp"

namespace percodyn {

struct ProbabilityRange {
  double lo = 0.3;
  double hi = 0.7;
};

/// A spherically symmetric tree truncated at `depth` levels.
///
/// Level k has |T_k| = d_0 ... d_{k-1} vertices; every edge from level n-1
/// to level n is open with probability p_n. All level products are held in
/// log space; linear w_n is derived and may overflow to +inf for
/// exponentially growing profiles, in which case callers must use log_w().
class TreeProfile {
 public:
  /// `degrees` holds d_0..d_{D-1}, `edge_probs` holds p_1..p_D.
  TreeProfile(std::vector<int> degrees, std::vector<double> edge_probs);

  int depth() const { return static_cast<int>(degrees_.size()); }

  /// d_level for level in [0, depth).
  int degree(int level) const { return degrees_[level]; }
  /// p_level for level in [1, depth].
  double prob(int level) const { return probs_[level - 1]; }

  /// w_0 = 1 and w_n = |T_n| p_1 ... p_n for n in [0, depth].
  double w(int n) const { return w_[n]; }
  double log_w(int n) const { return log_w_[n]; }
  /// log |T_n| for n in [0, depth].
  double log_level_size(int n) const { return log_size_[n]; }

  std::span<const int> degrees() const { return degrees_; }
  std::span<const double> edge_probs() const { return probs_; }

  double min_prob() const;
  double max_prob() const;

  /// Copy of the first `depth` levels.
  TreeProfile truncated(int depth) const;

 private:
  std::vector<int> degrees_;
  std::vector<double> probs_;
  std::vector<double> w_;
  std::vector<double> log_w_;
  std::vector<double> log_size_;
};

enum class GrowthFamily {
  log_power,  // c * n * ln(n+2)^alpha
  power,      // c * n^theta
  geometric,  // c * gamma^n
};

std::string to_string(GrowthFamily family);
GrowthFamily growth_family_from_string(const std::string& name);

/// Target growth law for w_n.
struct GrowthTarget {
  GrowthFamily family = GrowthFamily::log_power;
  double exponent = 2.0;  // alpha, theta or gamma depending on family
  double scale = 1.0;

  double operator()(int n) const;
};

struct ProfileSpec {
  enum class Kind { explicit_levels, homogeneous, target_growth };

  Kind kind = Kind::homogeneous;
  int depth = 1;
  ProbabilityRange range{};

  // homogeneous
  int degree = 2;
  double prob = 0.5;

  // explicit_levels
  std::vector<int> degrees;
  std::vector<double> edge_probs;

  // target_growth
  GrowthTarget target{};
  int degree_cap = 64;
};

struct SynthesisResult {
  TreeProfile profile;
  /// max over n >= deviation_from of |w_n / f(n) - 1|.
  double max_rel_deviation = 0.0;
  int deviation_from = 16;
};

/// Validates `spec` and expands it. Target-growth specs are synthesized.
SynthesisResult build_profile(const ProfileSpec& spec);

/// Greedy level-by-level fit of w_n to `target`: at each level pick the
/// integer degree d in [1, degree_cap] and p in `range` minimizing
/// |w_{n-1} d p - f(n)|; among exact fits the p nearest the middle of
/// `range` wins, then the smaller d.
SynthesisResult synthesize_profile(const std::function<double(int)>& target,
                                   int depth, ProbabilityRange range,
                                   int degree_cap = 64,
                                   int deviation_from = 16);

enum class Regime { subcritical, critical_boundary, percolating, undetermined };

std::string to_string(Regime regime);

struct RegimeLabel {
  Regime regime = Regime::undetermined;
  double inverse_w_sum = 0.0;     // sum_{k=1}^{D} 1/w_k
  double tail_increment = 0.0;    // relative increment over the last half
  double power_exponent = 0.0;    // a in log w ~ c + a ln n + alpha ln ln(n+2)
  double log_exponent = 0.0;      // alpha
  double fit_residual = 0.0;      // rms residual of the fit
};

/// Classifies a profile from the partial sums of 1/w_k and a least-squares
/// fit of log w_n. Requires depth >= 100.
RegimeLabel regime_label(const TreeProfile& profile);

}  // namespace percodyn
