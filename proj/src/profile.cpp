#include "percodyn/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "percodyn/fit.hpp"

namespace percodyn {

TreeProfile::TreeProfile(std::vector<int> degrees, std::vector<double> edge_probs)
    : degrees_(std::move(degrees)), probs_(std::move(edge_probs)) {
  if (degrees_.empty()) throw Error("profile depth must be at least 1");
  if (degrees_.size() != probs_.size())
    throw Error("profile needs one edge probability per level");
  for (int d : degrees_)
    if (d < 1) throw Error("profile degrees must be >= 1");
  for (double p : probs_)
    if (!(p > 0.0 && p < 1.0)) throw Error("edge probabilities must lie in (0,1)");

  const int depth = this->depth();
  w_.resize(depth + 1);
  log_w_.resize(depth + 1);
  log_size_.resize(depth + 1);
  w_[0] = 1.0;
  log_w_[0] = 0.0;
  log_size_[0] = 0.0;
  for (int n = 1; n <= depth; ++n) {
    const double log_d = std::log(static_cast<double>(degrees_[n - 1]));
    log_size_[n] = log_size_[n - 1] + log_d;
    log_w_[n] = log_w_[n - 1] + log_d + std::log(probs_[n - 1]);
    w_[n] = w_[n - 1] * degrees_[n - 1] * probs_[n - 1];
  }
}

double TreeProfile::min_prob() const { return *std::min_element(probs_.begin(), probs_.end()); }
double TreeProfile::max_prob() const { return *std::max_element(probs_.begin(), probs_.end()); }

TreeProfile TreeProfile::truncated(int depth) const {
  if (depth < 1 || depth > this->depth()) throw Error("truncation depth out of range");
  return TreeProfile({degrees_.begin(), degrees_.begin() + depth},
                     {probs_.begin(), probs_.begin() + depth});
}

std::string to_string(GrowthFamily family) {
  switch (family) {
    case GrowthFamily::log_power: return "log_power";
    case GrowthFamily::power: return "power";
    case GrowthFamily::geometric: return "geometric";
  }
  return "?";
}

GrowthFamily growth_family_from_string(const std::string& name) {
  if (name == "log_power") return GrowthFamily::log_power;
  if (name == "power") return GrowthFamily::power;
  if (name == "geometric") return GrowthFamily::geometric;
  throw Error("unknown growth family: " + name);
}

double GrowthTarget::operator()(int n) const {
  const double x = n;
  switch (family) {
    case GrowthFamily::log_power: return scale * x * std::pow(std::log(x + 2.0), exponent);
    case GrowthFamily::power: return scale * std::pow(x, exponent);
    case GrowthFamily::geometric: return scale * std::pow(exponent, x);
  }
  return 0.0;
}

namespace {

void check_range(ProbabilityRange range) {
  if (!(range.lo > 0.0 && range.lo <= range.hi && range.hi < 1.0))
    throw Error("probability range must satisfy 0 < lo <= hi < 1");
}

}  // namespace

SynthesisResult synthesize_profile(const std::function<double(int)>& target, int depth,
                                   ProbabilityRange range, int degree_cap,
                                   int deviation_from) {
  check_range(range);
  if (depth < 1) throw Error("profile depth must be at least 1");
  if (degree_cap < 1) throw Error("degree cap must be >= 1");

  const double mid = 0.5 * (range.lo + range.hi);
  std::vector<int> degrees(depth);
  std::vector<double> probs(depth);
  double w = 1.0;
  for (int n = 1; n <= depth; ++n) {
    const double f = target(n);
    if (!(f > 0.0) || !std::isfinite(f)) throw Error("target must be positive and finite");
    const double ratio = f / w;
    if (ratio > degree_cap * range.hi * (1.0 + 1e-12))
      throw Error("target grows faster than degree_cap * p_hi allows at level " +
                  std::to_string(n));

    int best_d = 1;
    double best_p = range.lo;
    double best_err = std::numeric_limits<double>::infinity();
    for (int d = 1; d <= degree_cap; ++d) {
      const double p = std::clamp(ratio / d, range.lo, range.hi);
      const double err = std::abs(w * d * p - f);
      const double tie = 1e-12 * f;
      if (err < best_err - tie) {
        best_d = d, best_p = p, best_err = err;
      } else if (err <= best_err + tie && std::abs(p - mid) < std::abs(best_p - mid)) {
        best_d = d, best_p = p, best_err = std::min(err, best_err);
      }
      if (d * range.lo > ratio) break;  // larger d only overshoots further
    }
    degrees[n - 1] = best_d;
    probs[n - 1] = best_p;
    w *= best_d * best_p;
  }

  SynthesisResult out{TreeProfile(std::move(degrees), std::move(probs)), 0.0,
                      std::min(deviation_from, depth)};
  for (int n = out.deviation_from; n <= depth; ++n)
    out.max_rel_deviation =
        std::max(out.max_rel_deviation, std::abs(out.profile.w(n) / target(n) - 1.0));
  return out;
}

SynthesisResult build_profile(const ProfileSpec& spec) {
  switch (spec.kind) {
    case ProfileSpec::Kind::explicit_levels: {
      TreeProfile profile(spec.degrees, spec.edge_probs);
      return {std::move(profile), 0.0, 1};
    }
    case ProfileSpec::Kind::homogeneous: {
      if (spec.depth < 1) throw Error("profile depth must be at least 1");
      TreeProfile profile(std::vector<int>(spec.depth, spec.degree),
                          std::vector<double>(spec.depth, spec.prob));
      return {std::move(profile), 0.0, 1};
    }
    case ProfileSpec::Kind::target_growth: {
      if (!std::isfinite(spec.target.exponent)) throw Error("target exponent must be finite");
      return synthesize_profile(spec.target, spec.depth, spec.range, spec.degree_cap);
    }
  }
  throw Error("unknown profile kind");
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::subcritical: return "subcritical";
    case Regime::critical_boundary: return "critical-boundary";
    case Regime::percolating: return "percolating";
    case Regime::undetermined: return "undetermined";
  }
  return "?";
}

RegimeLabel regime_label(const TreeProfile& profile) {
  const int depth = profile.depth();
  if (depth < 100) throw Error("regime_label needs depth >= 100");

  // partial[n] = sum_{k<=n} 1/w_k
  std::vector<double> partial(depth + 1, 0.0);
  for (int k = 1; k <= depth; ++k) partial[k] = partial[k - 1] + std::exp(-profile.log_w(k));

  RegimeLabel label;
  label.inverse_w_sum = partial[depth];
  label.tail_increment = (partial[depth] - partial[depth / 2]) / partial[depth];

  // log-spaced sample of levels >= 16 for the growth-law fit
  std::vector<double> ones, log_n, log_log_n, y;
  int last = -1;
  const int first = std::min(16, depth / 2);
  for (int i = 0; i <= 2000; ++i) {
    const int n = static_cast<int>(std::lround(first * std::pow(double(depth) / first, i / 2000.0)));
    if (n == last) continue;
    last = n;
    ones.push_back(1.0);
    log_n.push_back(std::log(double(n)));
    log_log_n.push_back(std::log(std::log(n + 2.0)));
    y.push_back(profile.log_w(n));
  }
  if (label.tail_increment < 1e-6) {
    label.regime = Regime::percolating;
  }

  // a geometric component dominates when it moves log w by more than a
  // couple of units across the profile
  std::vector<double> levels(log_n.size());
  for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = std::exp(log_n[i]);
  const LinearFit with_geometric = least_squares({ones, log_n, log_log_n, levels}, y);
  const double geometric_drift = with_geometric.coef[3] * depth;

  const LinearFit fit = least_squares({ones, log_n, log_log_n}, y);
  label.power_exponent = fit.coef[1];
  label.log_exponent = fit.coef[2];
  label.fit_residual = fit.rms_residual;

  if (label.regime == Regime::percolating) return label;
  if (std::abs(geometric_drift) > 2.0) {
    label.regime = geometric_drift > 0 ? Regime::percolating : Regime::subcritical;
    return label;
  }
  if (fit.rms_residual > 0.25) return label;  // undetermined
  const double a = label.power_exponent;
  const double alpha = label.log_exponent;
  if (a > 1.05) label.regime = Regime::percolating;
  else if (a < 0.95) label.regime = Regime::subcritical;
  else if (alpha > 1.25) label.regime = Regime::percolating;
  else if (alpha < 0.75) label.regime = Regime::subcritical;
  else label.regime = Regime::critical_boundary;
  return label;
}

}  // namespace percodyn
