#include "percodyn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>

#include "percodyn/brute.hpp"
#include "percodyn/exact.hpp"
#include "percodyn/fit.hpp"
#include "percodyn/gadget.hpp"
#include "percodyn/rng.hpp"
#include "percodyn/sim.hpp"

namespace percodyn::exp {

namespace {

constexpr int kDeep = 1 << 20;

json target_spec(const char* family, double exponent, int depth, double lo = 0.3,
                 double hi = 0.7) {
  return json{{"kind", "target"}, {"family", family}, {"exponent", exponent},
              {"scale", 1.0},     {"depth", depth},   {"p_lo", lo},
              {"p_hi", hi}};
}

json homogeneous_spec(int d, double p, int depth) {
  return json{{"kind", "homogeneous"}, {"d", d}, {"p", p}, {"depth", depth}};
}

json explicit_spec(std::vector<int> degrees, std::vector<double> probs) {
  return json{{"kind", "explicit"}, {"degrees", degrees}, {"edge_probs", probs}};
}

/// The seven profiles of the static inequality sweeps.
json static_profiles(int depth) {
  json p;
  p["alpha1.5"] = target_spec("log_power", 1.5, depth);
  p["alpha2"] = target_spec("log_power", 2.0, depth);
  p["alpha3"] = target_spec("log_power", 3.0, depth);
  p["theta1.5"] = target_spec("power", 1.5, depth);
  p["theta3"] = target_spec("power", 3.0, depth);
  p["binary0.5"] = homogeneous_spec(2, 0.5, depth);
  p["binary0.6"] = homogeneous_spec(2, 0.6, depth);
  return p;
}

// ---- assertions ------------------------------------------------------------

Assertion at_most(std::string group, std::string name, double value, double limit,
                  std::string note = {}) {
  return {std::move(group), std::move(name), value <= limit, value, "<=", limit, 0.0,
          std::move(note)};
}

Assertion at_least(std::string group, std::string name, double value, double limit,
                   std::string note = {}) {
  return {std::move(group), std::move(name), value >= limit, value, ">=", limit, 0.0,
          std::move(note)};
}

Assertion within(std::string group, std::string name, double value, double lo, double hi,
                 std::string note = {}) {
  return {std::move(group), std::move(name), value >= lo && value <= hi, value, "in", lo, hi,
          std::move(note)};
}

Assertion holds(std::string group, std::string name, bool ok, std::string note = {}) {
  return {std::move(group), std::move(name), ok, ok ? 1.0 : 0.0, "true", 1.0, 0.0,
          std::move(note)};
}

/// Ratio of the largest to the smallest entry; inf if any entry is not
/// positive and finite.
double spread(const std::vector<double>& v) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) return std::numeric_limits<double>::infinity();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi / lo;
}

double z_diff(const Estimate& a, const Estimate& b) {
  const double se = std::sqrt(a.se * a.se + b.se * b.se);
  const double gap = b.mean - a.mean;
  if (se == 0.0) return gap == 0.0 ? 0.0 : std::copysign(INFINITY, gap);
  return gap / se;
}

std::vector<int> grid_from(const json& g) {
  if (g.is_array()) return g.get<std::vector<int>>();
  return log_grid(g.at("lo").get<int>(), g.at("hi").get<int>(), g.at("per_decade").get<int>());
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t s = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  return splitmix64(s);
}

struct Context {
  const json& cfg;
  std::filesystem::path base_dir;
  Exec exec;
  Report& report;

  const TreeProfile& profile(const json& spec) const {
    return cached_profile(spec, base_dir).profile;
  }
};

// ---- oracle-suite ----------------------------------------------------------

TreeProfile random_tiny_profile(Rng& rng, int max_depth, int max_edges, double lo, double hi) {
  while (true) {
    const int depth = 1 + static_cast<int>(rng.below(max_depth));
    std::vector<int> degrees(depth);
    std::vector<double> probs(depth);
    int level_size = 1, edges = 0;
    for (int k = 0; k < depth; ++k) {
      degrees[k] = 1 + static_cast<int>(rng.below(3));
      probs[k] = lo + (hi - lo) * rng.uniform();
      level_size *= degrees[k];
      edges += level_size;
    }
    if (edges <= max_edges) return TreeProfile(degrees, probs);
  }
}

void oracle_suite(Context& ctx) {
  const json& cfg = ctx.cfg;
  const int trees = cfg.at("trees").get<int>();
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const int max_depth = cfg.at("max_depth").get<int>();
  const int max_edges = cfg.at("max_edges").get<int>();
  const auto p_range = cfg.at("p_range").get<std::vector<double>>();
  const auto t_values = cfg.at("t_values").get<std::vector<double>>();
  const double tol = cfg.at("tolerance").get<double>();
  if (max_edges > brute::kMaxTwoTimeEdges) throw Error("oracle-suite: max_edges too large");

  io::CsvTable shapes({"tree", "depth", "edges", "degrees", "edge_probs"});
  io::CsvTable deltas({"tree", "quantity", "exact", "brute", "abs_delta"});
  std::map<std::string, double> worst;
  auto compare = [&](int tree, const std::string& group, const std::string& what, double exact,
                     double brute) {
    const double delta = std::abs(exact - brute);
    deltas.add_row({std::int64_t{tree}, what, exact, brute, delta});
    worst[group] = std::max(worst[group], std::isnan(delta) ? INFINITY : delta);
  };

  for (int i = 0; i < trees; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    const TreeProfile profile = random_tiny_profile(rng, max_depth, max_edges, p_range[0], p_range[1]);
    const int depth = profile.depth();
    const brute::TinyTree tree = brute::expand(profile, depth);
    std::string degree_text, prob_text;
    for (int k = 0; k < depth; ++k) {
      degree_text += (k ? ";" : "") + std::to_string(profile.degree(k));
      prob_text += (k ? ";" : "") + io::format_double(profile.prob(k + 1));
    }
    shapes.add_row({std::int64_t{i}, std::int64_t{depth}, std::int64_t{tree.edge_count()},
                    degree_text, prob_text});

    const auto reaches = brute::root_reaches(tree, depth);
    const exact::StaticTable st = exact::survival_and_moments(profile, depth);
    compare(i, "survival", "P(W>0)", st.p_positive, brute::static_prob(tree, reaches, ctx.exec));
    const double single = brute::static_prob(
        tree, [&](brute::Config c) { return brute::connected_at_level(tree, c, depth) == 1; },
        ctx.exec);
    compare(i, "single", "P(W=1)", std::exp(st.log_p_single), single);
    const double second = brute::static_expectation(
        tree,
        [&](brute::Config c) {
          const double k = brute::connected_at_level(tree, c, depth);
          return k * k;
        },
        ctx.exec);
    compare(i, "second-moment", "E[W^2]/w^2", st.ratio2, second / (profile.w(depth) * profile.w(depth)));

    const exact::InfluenceTable inf = exact::influence_table(profile, depth);
    const std::vector<int> level = tree.levels();
    for (int e = 0; e < tree.edge_count(); ++e)
      compare(i, "influence", "I(edge " + std::to_string(e) + ")", inf.influence[level[e + 1]],
              brute::pivotal_prob(tree, e, reaches));

    for (double t : t_values) {
      const double q_t = exact::two_time_survival(profile, 0, depth, t).q_t;
      const double b = brute::two_time_prob(
          tree, t, [&](brute::Config a, brute::Config c) { return reaches(a) && reaches(c); },
          ctx.exec);
      compare(i, "two-time", "q(t=" + io::format_double(t) + ")", q_t, b);
    }
  }

  json summary;
  for (const auto& [group, delta] : worst) {
    summary[group] = delta;
    ctx.report.assertions.push_back(at_most("oracle-agreement", group, delta, tol));
  }
  ctx.report.results["max_abs_delta"] = summary;
  ctx.report.tables.emplace_back("trees", std::move(shapes));
  ctx.report.tables.emplace_back("deltas", std::move(deltas));
}

// ---- lyons-ratio -----------------------------------------------------------

void lyons_ratio(Context& ctx) {
  const json& cfg = ctx.cfg;
  const int n_max_cfg = cfg.at("n_max").get<int>();
  const double tol = cfg.at("tolerance").get<double>();
  const auto window = cfg.at("ratio_window").get<std::vector<int>>();
  const double max_spread = cfg.at("max_spread").get<double>();
  const std::vector<int> report_grid = log_grid(1, n_max_cfg, cfg.at("rows_per_decade").get<int>());

  io::CsvTable table({"profile", "n", "log_w", "p_positive", "log_p_single", "ratio2",
                      "inverse_w_sum", "energy_violation", "product_violation", "lyons_ratio"});
  for (const auto& [label, spec] : cfg.at("profiles").items()) {
    const TreeProfile& profile = ctx.profile(spec);
    const int n_max = std::min(n_max_cfg, profile.depth());
    std::vector<int> targets(n_max);
    for (int n = 1; n <= n_max; ++n) targets[n - 1] = n;
    const auto points = exact::survival_sweep(profile, targets, ctx.exec);

    double energy = -INFINITY, product = -INFINITY;
    std::vector<double> ratios;
    for (const auto& pt : points) {
      energy = std::max(energy, pt.energy_bound_violation());
      product = std::max(product, pt.product_bound_violation());
      if (pt.n >= window[0] && pt.n <= window[1]) ratios.push_back(pt.lyons_ratio());
    }
    for (int n : report_grid) {
      if (n > n_max) break;
      const auto& pt = points[n - 1];
      table.add_row({label, std::int64_t{n}, pt.log_w, pt.p_positive, pt.log_p_single, pt.ratio2,
                     pt.inverse_w_sum, pt.energy_bound_violation(), pt.product_bound_violation(),
                     pt.lyons_ratio()});
    }
    const double ratio_spread = spread(ratios);
    ctx.report.results[label] = {{"n_max", n_max},
                                 {"max_energy_violation", energy},
                                 {"max_product_violation", product},
                                 {"ratio_min", *std::min_element(ratios.begin(), ratios.end())},
                                 {"ratio_max", *std::max_element(ratios.begin(), ratios.end())},
                                 {"ratio_spread", ratio_spread}};
    ctx.report.assertions.push_back(at_most("energy-bounds", label, energy, tol,
                                            "worst of w^2/E[W^2] - P and P - 2w^2/E[W^2]"));
    ctx.report.assertions.push_back(at_most("product-bound", label, product, tol,
                                            "E[W] P(W=1) - P(W>0)^2"));
    ctx.report.assertions.push_back(at_most("survival-ratio", label, ratio_spread, max_spread,
                                            "max/min of P(W>0) sum 1/w_k"));
  }
  ctx.report.tables.emplace_back("sweep", std::move(table));
}

// ---- one-arm-scaling -------------------------------------------------------

void one_arm_scaling(Context& ctx) {
  const json& cfg = ctx.cfg;
  const TreeProfile& profile = ctx.profile(cfg.at("profile"));
  const int N = std::min(cfg.at("truncation").get<int>(), profile.depth());
  const double tol = cfg.at("tolerance").get<double>();

  io::CsvTable table({"n", "q", "q_n_log_n", "truncation", "stop_target", "rel_change",
                      "converged"});
  std::vector<double> scaled;
  for (int n : cfg.at("n_grid").get<std::vector<int>>()) {
    const exact::OneArm oa = exact::one_arm(profile, n, N, tol);
    const double s = oa.value * n * std::log(static_cast<double>(n));
    scaled.push_back(s);
    table.add_row({std::int64_t{n}, oa.value, s, std::int64_t{oa.target},
                   std::int64_t{oa.stop_target}, oa.rel_change, std::int64_t{oa.converged}});
    ctx.report.assertions.push_back(
        {"one-arm-certificate", "n=" + std::to_string(n), oa.converged, oa.rel_change, "<=", tol,
         0.0, "relative change over the last doubling of the truncation"});
  }
  const double s = spread(scaled);
  ctx.report.results["scaled_spread"] = s;
  ctx.report.assertions.push_back(
      at_most("one-arm-scaling", "spread of q_n n ln n", s, cfg.at("max_spread").get<double>()));
  ctx.report.tables.emplace_back("one_arm", std::move(table));
}

// ---- correlation-bound -----------------------------------------------------

void correlation_bound(Context& ctx) {
  const json& cfg = ctx.cfg;
  const TreeProfile& profile = ctx.profile(cfg.at("profile"));
  const int N = std::min(cfg.at("truncation").get<int>(), profile.depth());

  io::CsvTable table({"n", "t", "q", "q_t", "ratio", "tilde_ratio"});
  std::vector<double> constants;
  json per_n = json::object();
  for (int n : cfg.at("n_grid").get<std::vector<int>>()) {
    const std::vector<double> grid = cfg.at("t_grid").is_array()
                                         ? cfg.at("t_grid").get<std::vector<double>>()
                                         : exact::default_t_grid(n);
    const exact::CorrelationRatio cr = exact::correlation_ratio(profile, n, N, grid);
    bool bracketed = true;
    for (const auto& pt : cr.points) {
      table.add_row({std::int64_t{n}, pt.t, cr.q, pt.q_t, pt.ratio, pt.tilde_ratio});
      const double slack = 1e-12 * cr.q;
      bracketed = bracketed && pt.q_t >= cr.q * cr.q - slack && pt.q_t <= cr.q + slack;
    }
    constants.push_back(cr.max_ratio);
    per_n[std::to_string(n)] = {{"C_emp", cr.max_ratio},
                                {"argmax_t", cr.argmax_t},
                                {"max_tilde_ratio", cr.max_tilde_ratio},
                                {"q", cr.q}};
    const std::string name = "n=" + std::to_string(n);
    ctx.report.assertions.push_back(holds("two-time-bounds", name, bracketed, "q^2 <= q(t) <= q"));
    ctx.report.assertions.push_back(at_most("correlation-constant", name, cr.max_ratio,
                                            cfg.at("max_constant").get<double>(),
                                            "max over t of q(t) t / q^2"));
  }
  const double drift = spread(constants);
  per_n["drift"] = drift;
  ctx.report.results = per_n;
  ctx.report.assertions.push_back(at_most("correlation-drift", "max/min of C_emp over n", drift,
                                          cfg.at("max_drift").get<double>()));
  ctx.report.tables.emplace_back("correlation", std::move(table));
}

// ---- flip-identity ---------------------------------------------------------

void flip_identity(Context& ctx) {
  const json& cfg = ctx.cfg;
  const double horizon = cfg.at("horizon").get<double>();
  const auto replicas = cfg.at("replicas").get<std::int64_t>();
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const double z_max = cfg.at("z_max").get<double>();

  io::CsvTable table({"profile", "depth", "edges", "metric", "exact", "mc_mean", "mc_se", "z"});
  std::uint64_t k = 0;
  for (const auto& [label, entry] : cfg.at("profiles").items()) {
    const TreeProfile& profile = ctx.profile(entry.at("spec"));
    const int depth = profile.depth();
    const exact::InfluenceTable inf = exact::influence_table(profile, depth);
    const double a0 = exact::survival_and_moments(profile, depth).p_positive;

    sim::SimConfig sc{profile, depth, horizon, replicas, sub_seed(seed, k++), false};
    const sim::SimStats stats = sim::monte_carlo(sc, ctx.exec);
    const auto edges = static_cast<std::int64_t>(sim::edge_count(profile, depth));

    struct Row {
      const char* metric;
      const char* group;
      double exact;
      const Estimate& est;
    };
    const Row rows[] = {
        {"flips", "flip-identity", horizon * inf.flip_intensity, stats.flips},
        {"boundary", "boundary-identity", horizon * inf.boundary_expectation, stats.boundary},
        {"on_fraction", "stationarity", a0, stats.on_fraction},
        {"components", "components", exact::expected_components(profile, depth, horizon),
         stats.components},
    };
    json res;
    for (const Row& r : rows) {
      const double z = z_score(r.est, r.exact);
      table.add_row({label, std::int64_t{depth}, edges, std::string(r.metric), r.exact,
                     r.est.mean, r.est.se, z});
      res[r.metric] = {{"exact", r.exact}, {"mean", r.est.mean}, {"se", r.est.se}, {"z", z}};
      if (std::string(r.group) != "components")
        ctx.report.assertions.push_back(at_most(r.group, label, z, z_max, "standard errors"));
    }
    res["opening_flips"] = io::estimate_to_json(stats.opening_flips);
    res["closing_flips"] = io::estimate_to_json(stats.closing_flips);
    ctx.report.results[label] = res;

    const double gap = std::abs(inf.flip_intensity - inf.boundary_expectation);
    ctx.report.assertions.push_back(
        at_most("identity-consistency", label, gap, 1e-12 * std::max(1.0, inf.flip_intensity),
                "per-edge and per-level routes"));
    if (entry.contains("exact_rate"))
      ctx.report.assertions.push_back(at_most(
          "exact-rate", label, std::abs(inf.flip_intensity - entry.at("exact_rate").get<double>()),
          1e-15, "flip intensity against its closed form"));
  }
  ctx.report.tables.emplace_back("flips", std::move(table));
}

// ---- component-transition --------------------------------------------------

void component_transition(Context& ctx) {
  const json& cfg = ctx.cfg;
  const double horizon = cfg.at("horizon").get<double>();
  const auto replicas = cfg.at("replicas").get<std::int64_t>();
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const auto depths = cfg.at("depths").get<std::vector<int>>();
  const double z_crit = cfg.at("z_one_sided").get<double>();

  io::CsvTable mc({"profile", "depth", "edges", "components_mean", "components_se",
                   "components_exact", "boundary_mean", "boundary_se", "boundary_exact"});
  std::uint64_t k = 0;
  for (const auto& [label, entry] : cfg.at("sim_profiles").items()) {
    const TreeProfile& profile = ctx.profile(entry.at("spec"));
    const std::string expect = entry.at("expect").get<std::string>();
    const auto reps = entry.value("replicas", replicas);
    std::vector<Estimate> comps;
    json res = json::array();
    for (int depth : depths) {
      sim::SimConfig sc{profile, depth, horizon, reps, sub_seed(seed, k++), false};
      const sim::SimStats stats = sim::monte_carlo(sc, ctx.exec);
      const double exact_comp = exact::expected_components(profile, depth, horizon);
      const double exact_bd = horizon * exact::influence_table(profile, depth).boundary_expectation;
      mc.add_row({label, std::int64_t{depth}, sim::edge_count(profile, depth),
                  stats.components.mean, stats.components.se, exact_comp, stats.boundary.mean,
                  stats.boundary.se, exact_bd});
      res.push_back({{"depth", depth},
                     {"components", io::estimate_to_json(stats.components)},
                     {"components_exact", exact_comp}});
      comps.push_back(stats.components);
    }
    for (std::size_t i = 1; i < comps.size(); ++i) {
      const double z = z_diff(comps[i - 1], comps[i]);
      const std::string name =
          label + " " + std::to_string(depths[i - 1]) + "->" + std::to_string(depths[i]);
      if (expect == "increasing")
        ctx.report.assertions.push_back(
            at_least("mc-component-trend", name, z, z_crit, "one-sided increase"));
      else
        ctx.report.assertions.push_back(
            at_most("mc-component-trend", name, z, z_crit, "no significant increase"));
    }
    ctx.report.results["mc"][label] = res;
  }

  const std::vector<int> grid = grid_from(cfg.at("exact_grid"));
  const auto window = cfg.at("fit_window").get<std::vector<int>>();
  io::CsvTable ex({"profile", "n", "boundary_expectation"});
  for (const auto& [label, entry] : cfg.at("exact_profiles").items()) {
    const TreeProfile& profile = ctx.profile(entry.at("spec"));
    const std::string expect = entry.at("expect").get<std::string>();
    const std::vector<double> values = exact::boundary_sweep(profile, grid, ctx.exec);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      ex.add_row({label, std::int64_t{grid[i]}, values[i]});
      if (grid[i] >= window[0] && grid[i] <= window[1]) {
        xs.push_back(grid[i]);
        ys.push_back(values[i]);
      }
    }
    const double slope = log_log_slope(xs, ys);
    // dyadic increments at the top of the grid
    const int n = grid.back();
    const auto dyadic = exact::boundary_sweep(profile, {n / 4, n / 2, n}, ctx.exec);
    const double block_ratio = (dyadic[2] - dyadic[1]) / (dyadic[1] - dyadic[0]);
    ctx.report.results["exact"][label] = {{"fitted_exponent", slope},
                                          {"dyadic_block_ratio", block_ratio},
                                          {"value_at_max", dyadic[2]}};
    if (expect == "bounded") {
      ctx.report.assertions.push_back(at_most("exact-boundary-trend", label, block_ratio, 0.9,
                                              "dyadic increment ratio (Cauchy)"));
    } else {
      const double target = entry.at("exponent").get<double>();
      const double tol = entry.at("exponent_tol").get<double>();
      ctx.report.assertions.push_back(within("exact-boundary-trend", label, slope, target - tol,
                                             target + tol, "log-log slope of E|dZ_n|"));
      ctx.report.assertions.push_back(at_least("exact-boundary-divergence", label, block_ratio,
                                               0.9, "dyadic increment ratio"));
    }
  }
  ctx.report.tables.emplace_back("mc", std::move(mc));
  ctx.report.tables.emplace_back("exact", std::move(ex));
}

// ---- regime-classify -------------------------------------------------------

void regime_classify(Context& ctx) {
  const json& cfg = ctx.cfg;
  const std::vector<int> grid = grid_from(cfg.at("n_grid"));
  io::CsvTable rows({"profile", "n", "sum_k_over_w", "harmonic", "ex_proxy", "ex_over_log_n",
                     "harmonic_over_ex", "sibling_sum", "tail_sum"});
  io::CsvTable labels({"profile", "static", "inverse_w_sum", "tail_increment", "power_exponent",
                       "log_exponent", "fit_residual", "dynamic", "ex_growth",
                       "ex_growth_exponent"});
  for (const auto& [label, entry] : cfg.at("profiles").items()) {
    const TreeProfile& profile = ctx.profile(entry.at("spec"));
    const RegimeLabel lab = regime_label(profile);
    const exact::RegimeReport rep = exact::regime_report(profile, grid);
    for (const auto& r : rep.rows)
      rows.add_row({label, std::int64_t{r.n}, r.sum_k_over_w, r.harmonic, r.ex_proxy,
                    r.ex_proxy / std::log(static_cast<double>(r.n)), r.harmonic_ratio,
                    r.sibling_partial, r.tail_partial});
    labels.add_row({label, to_string(lab.regime), lab.inverse_w_sum, lab.tail_increment,
                    lab.power_exponent, lab.log_exponent, lab.fit_residual,
                    exact::to_string(rep.regime), rep.ex_growth, rep.ex_growth_exponent});
    ctx.report.results[label] = {{"static", to_string(lab.regime)},
                                 {"power_exponent", lab.power_exponent},
                                 {"log_exponent", lab.log_exponent},
                                 {"dynamic", exact::to_string(rep.regime)},
                                 {"ex_growth", rep.ex_growth},
                                 {"ex_growth_exponent", rep.ex_growth_exponent},
                                 {"ex_over_log_min", rep.ex_over_log_min},
                                 {"ex_over_log_max", rep.ex_over_log_max},
                                 {"sum_k_over_w_converges", rep.sum_k_over_w_converges},
                                 {"ratio_bounded", rep.ratio_bounded},
                                 {"sibling_sum_converges", rep.sibling_converges},
                                 {"tail_sum_converges", rep.tail_converges}};
    if (entry.contains("static"))
      ctx.report.assertions.push_back(holds("static-regime", label,
                                            to_string(lab.regime) == entry.at("static"),
                                            "got " + to_string(lab.regime)));
    if (entry.contains("dynamic"))
      ctx.report.assertions.push_back(holds("dynamic-regime", label,
                                            exact::to_string(rep.regime) == entry.at("dynamic"),
                                            "got " + exact::to_string(rep.regime)));
    if (entry.contains("ex_over_log")) {
      const auto range = entry.at("ex_over_log").get<std::vector<double>>();
      ctx.report.assertions.push_back(
          at_least("ex-log-growth", label + " min", rep.ex_over_log_min, range[0]));
      ctx.report.assertions.push_back(
          at_most("ex-log-growth", label + " max", rep.ex_over_log_max, range[1]));
    }
  }

  if (cfg.contains("leftmost")) {
    const json& lm = cfg.at("leftmost");
    const TreeProfile& profile = ctx.profile(cfg.at("profiles").at(lm.at("profile").get<std::string>()).at("spec"));
    const auto ns = lm.at("n_values").get<std::vector<int>>();
    const int n_max = *std::max_element(ns.begin(), ns.end());
    const int N = std::min(lm.at("truncation").get<int>(), profile.depth());
    const exact::LeftmostTable lt = exact::leftmost_table(profile, n_max, N);
    io::CsvTable t({"n", "b_n_minus_1", "sibling_product", "tail_squared", "sibling_ratio",
                    "expected_u", "single_u_times_expected"});
    for (int n : ns)
      t.add_row({std::int64_t{n}, lt.b[n - 1], std::exp(lt.log_sibling_product[n]),
                 lt.tail_squared[n], lt.sibling_ratio[n], lt.expected_u[n],
                 lt.single_u_times_expected[n]});
    ctx.report.tables.emplace_back("leftmost", std::move(t));
  }
  ctx.report.tables.emplace_back("labels", std::move(labels));
  ctx.report.tables.emplace_back("sums", std::move(rows));
}

// ---- gadget-suite ----------------------------------------------------------

/// Point estimates strictly decreasing and first-to-last drop beyond `z`
/// combined standard errors.
Assertion decreasing(const std::string& group, const std::vector<Estimate>& est, double z) {
  bool strict = true;
  for (std::size_t i = 1; i < est.size(); ++i) strict = strict && est[i].mean < est[i - 1].mean;
  const double drop = -z_diff(est.front(), est.back());
  Assertion a = at_least(group, "first-to-last drop", drop, z,
                         strict ? "point estimates strictly decreasing"
                                : "point estimates not strictly decreasing");
  a.pass = a.pass && strict;
  return a;
}

void gadget_suite(Context& ctx) {
  const json& cfg = ctx.cfg;
  const auto js = cfg.at("j_values").get<std::vector<int>>();
  const int radius = cfg.at("radius").get<int>();
  const auto replicas = cfg.at("replicas").get<std::int64_t>();
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const double p_high = cfg.at("p_high").get<double>();
  const double p_low = cfg.at("p_low").get<double>();
  const double eps = cfg.at("epsilon").get<double>();
  const double z = cfg.at("z").get<double>();

  io::CsvTable table({"radius", "j", "m", "vertices", "edges", "block_one_arm",
                      "anchor_connection", "connect_high", "connect_high_se", "connect_low",
                      "connect_low_se", "persistence", "persistence_se"});
  auto measure = [&](int r, bool assert_trends) {
    std::vector<Estimate> high, low, persist;
    json per_j = json::array();
    for (int j : js) {
      const auto choice = gadget::select_multiplicity(
          j, r, cfg.at("one_arm_threshold").get<double>(),
          cfg.at("selection_replicas").get<std::int64_t>(), sub_seed(seed, 100 + j),
          cfg.at("m_max").get<int>());
      const gadget::GadgetGraph g = gadget::build_gadget(j, choice.multiplicity, r);
      const Estimate anchor = gadget::block_anchor_connection(
          j, g.block, p_high, replicas, sub_seed(seed, 200 + j), ctx.exec);
      // common random numbers across p, so the p-comparison is monotone per replica
      const std::uint64_t s = sub_seed(seed, j);
      high.push_back(gadget::connect_estimate(g, p_high, replicas, s, ctx.exec));
      low.push_back(gadget::connect_estimate(g, p_low, replicas, s, ctx.exec));
      persist.push_back(gadget::persistence_estimate(g, p_high, eps, replicas, s, ctx.exec));
      table.add_row({std::int64_t{r}, std::int64_t{j}, std::int64_t{choice.multiplicity},
                     std::int64_t{g.vertex_count}, std::int64_t{g.edge_count()},
                     choice.one_arm.mean, anchor.mean, high.back().mean, high.back().se,
                     low.back().mean, low.back().se, persist.back().mean, persist.back().se});
      per_j.push_back({{"j", j},
                       {"m", choice.multiplicity},
                       {"block_one_arm", io::estimate_to_json(choice.one_arm)},
                       {"anchor_connection", io::estimate_to_json(anchor)},
                       {"connect_high", io::estimate_to_json(high.back())},
                       {"connect_low", io::estimate_to_json(low.back())},
                       {"persistence", io::estimate_to_json(persist.back())}});
      if (!assert_trends) continue;
      const std::string name = "j=" + std::to_string(j);
      ctx.report.assertions.push_back(at_least("connect-high", name, high.back().mean,
                                               cfg.at("min_connect").get<double>()));
      ctx.report.assertions.push_back(
          at_most("persistence-below-static", name,
                  persist.back().mean - high.back().mean - z * high.back().se, 0.0));
    }
    if (assert_trends) {
      ctx.report.assertions.push_back(decreasing("connect-low-trend", low, z));
      ctx.report.assertions.push_back(decreasing("persistence-trend", persist, z));
    }
    return per_j;
  };

  ctx.report.results["radius_" + std::to_string(radius)] = measure(radius, true);
  if (cfg.contains("extra_radii"))
    for (int r : cfg.at("extra_radii").get<std::vector<int>>())
      ctx.report.results["radius_" + std::to_string(r)] = measure(r, false);
  ctx.report.tables.emplace_back("gadgets", std::move(table));
}

using Recipe = std::function<void(Context&)>;

const std::map<std::string, Recipe>& recipes() {
  static const std::map<std::string, Recipe> table = {
      {"component-transition", component_transition},
      {"correlation-bound", correlation_bound},
      {"flip-identity", flip_identity},
      {"gadget-suite", gadget_suite},
      {"lyons-ratio", lyons_ratio},
      {"one-arm-scaling", one_arm_scaling},
      {"oracle-suite", oracle_suite},
      {"regime-classify", regime_classify},
  };
  return table;
}

}  // namespace

std::vector<int> log_grid(int lo, int hi, int per_decade) {
  if (lo < 1 || hi < lo || per_decade < 1) throw Error("log_grid: bad range");
  std::vector<int> out{lo};
  const double step = std::pow(10.0, 1.0 / per_decade);
  for (double x = lo * step; x < hi; x *= step) {
    const int n = static_cast<int>(std::lround(x));
    if (n > out.back() && n < hi) out.push_back(n);
  }
  if (hi > out.back()) out.push_back(hi);
  return out;
}

const SynthesisResult& cached_profile(const json& spec, const std::filesystem::path& base_dir) {
  static std::mutex mutex;
  static std::map<std::string, std::unique_ptr<SynthesisResult>> cache;
  const std::string key = base_dir.string() + "|" + spec.dump();
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<SynthesisResult>(io::resolve_profile(spec, base_dir)))
             .first;
  return *it->second;
}

bool Report::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

std::vector<Assertion> Report::group(const std::string& g) const {
  std::vector<Assertion> out;
  for (const auto& a : assertions)
    if (a.group == g) out.push_back(a);
  return out;
}

json Report::to_json() const {
  json doc;
  doc["experiment"] = experiment;
  doc["version"] = kVersion;
  doc["config"] = config;
  doc["passed"] = passed();
  json list = json::array();
  for (const auto& a : assertions) {
    json item{{"group", a.group}, {"name", a.name}, {"pass", a.pass}, {"value", a.value},
              {"relation", a.relation}, {"limit", a.limit}};
    if (a.relation == "in") item["limit_hi"] = a.limit_hi;
    if (!a.note.empty()) item["note"] = a.note;
    list.push_back(std::move(item));
  }
  doc["assertions"] = std::move(list);
  doc["results"] = results;
  json files = json::array();
  for (const auto& [name, table] : tables) files.push_back(experiment + "." + name + ".csv");
  doc["tables"] = std::move(files);
  return doc;
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& [name, recipe] : recipes()) out.push_back(name);
  return out;
}

json default_config(const std::string& name) {
  json c;
  c["experiment"] = name;
  if (name == "oracle-suite") {
    c["seed"] = 1;
    c["trees"] = 20;
    c["max_depth"] = 3;
    c["max_edges"] = 8;
    c["p_range"] = {0.2, 0.8};
    c["t_values"] = {0.0, std::log(2.0), 50.0};
    c["tolerance"] = 1e-12;
  } else if (name == "lyons-ratio") {
    c["profiles"] = static_profiles(10000);
    c["n_max"] = 10000;
    c["tolerance"] = 1e-10;
    c["ratio_window"] = {10, 10000};
    c["max_spread"] = 20.0;
    c["rows_per_decade"] = 40;
  } else if (name == "one-arm-scaling") {
    c["profile"] = target_spec("log_power", 2.0, kDeep);
    c["n_grid"] = {100, 1000, 10000};
    c["truncation"] = kDeep;
    c["tolerance"] = 1e-6;
    c["max_spread"] = 10.0;
  } else if (name == "correlation-bound") {
    c["profile"] = target_spec("log_power", 2.0, kDeep);
    c["n_grid"] = {100, 1000};
    c["truncation"] = kDeep;
    c["t_grid"] = "default";
    c["max_constant"] = 1000.0;
    c["max_drift"] = 3.0;
  } else if (name == "flip-identity") {
    c["seed"] = 7;
    c["horizon"] = 1.0;
    c["replicas"] = 10000;
    c["z_max"] = 3.0;
    c["profiles"] = {
        {"single-edge", {{"spec", explicit_spec({1}, {0.5})}, {"exact_rate", 0.5}}},
        {"binary-depth1", {{"spec", homogeneous_spec(2, 0.5, 1)}, {"exact_rate", 0.5}}},
        {"binary0.5-depth12", {{"spec", homogeneous_spec(2, 0.5, 12)}}},
        {"binary0.6-depth10", {{"spec", homogeneous_spec(2, 0.6, 10)}}},
    };
  } else if (name == "component-transition") {
    c["seed"] = 11;
    c["horizon"] = 1.0;
    c["replicas"] = 10000;
    c["depths"] = {8, 10, 12, 14};
    c["z_one_sided"] = 1.645;
    c["sim_profiles"] = {
        {"theta1.5", {{"spec", target_spec("power", 1.5, 14, 0.55, 0.95)},
                      {"expect", "increasing"},
                      {"replicas", 30000}}},
        {"theta3", {{"spec", target_spec("power", 3.0, 14, 0.85, 0.95)}, {"expect", "bounded"}}},
    };
    c["exact_profiles"] = {
        {"theta1.5",
         {{"spec", target_spec("power", 1.5, kDeep)},
          {"expect", "power"},
          {"exponent", 0.5},
          {"exponent_tol", 0.1}}},
        {"theta3", {{"spec", target_spec("power", 3.0, kDeep)}, {"expect", "bounded"}}},
    };
    c["exact_grid"] = {{"lo", 10}, {"hi", 10000}, {"per_decade", 8}};
    c["fit_window"] = {100, 10000};
  } else if (name == "regime-classify") {
    json p;
    p["alpha1.5"] = {{"spec", target_spec("log_power", 1.5, kDeep)}, {"static", "percolating"}};
    p["alpha2"] = {{"spec", target_spec("log_power", 2.0, kDeep)}, {"static", "percolating"}};
    p["alpha3"] = {{"spec", target_spec("log_power", 3.0, kDeep)}, {"static", "percolating"}};
    p["linear"] = {{"spec", target_spec("power", 1.0, kDeep)}, {"static", "subcritical"}};
    p["theta1.5"] = {{"spec", target_spec("power", 1.5, kDeep)},
                     {"static", "percolating"},
                     {"dynamic", "many-flips"}};
    p["theta2"] = {{"spec", target_spec("power", 2.0, kDeep)},
                   {"static", "percolating"},
                   {"dynamic", "gap"},
                   {"ex_over_log", {0.5, 2.0}}};
    p["theta3"] = {{"spec", target_spec("power", 3.0, kDeep)},
                   {"static", "percolating"},
                   {"dynamic", "finite-components"}};
    p["binary0.5"] = {{"spec", homogeneous_spec(2, 0.5, kDeep)}, {"static", "subcritical"}};
    p["binary0.6"] = {{"spec", homogeneous_spec(2, 0.6, kDeep)}, {"static", "percolating"}};
    c["profiles"] = p;
    c["n_grid"] = {{"lo", 100}, {"hi", 10000}, {"per_decade", 10}};
    c["leftmost"] = {{"profile", "theta3"}, {"n_values", {100, 1000}}, {"truncation", kDeep}};
  } else if (name == "gadget-suite") {
    c["seed"] = 5;
    c["j_values"] = {1, 2, 3};
    c["radius"] = 12;
    c["extra_radii"] = json::array({2});
    c["one_arm_threshold"] = 0.95;
    c["selection_replicas"] = 1000;
    c["m_max"] = 8;
    c["replicas"] = 1000;
    c["p_high"] = 0.5;
    c["p_low"] = 0.45;
    c["epsilon"] = 0.5;
    c["min_connect"] = 0.5;
    c["z"] = 3.0;
  } else {
    throw Error("unknown experiment: " + name);
  }
  return c;
}

Report run_experiment(const json& config, const std::filesystem::path& base_dir, Exec exec) {
  if (!config.is_object() || !config.contains("experiment"))
    throw Error("experiment config must be an object with an \"experiment\" field");
  const std::string name = config.at("experiment").get<std::string>();
  const auto it = recipes().find(name);
  if (it == recipes().end()) throw Error("unknown experiment: " + name);

  json merged = default_config(name);
  for (const auto& [key, value] : config.items()) merged[key] = value;

  Report report;
  report.experiment = name;
  report.config = merged;
  Context ctx{report.config, base_dir, exec, report};
  try {
    it->second(ctx);
  } catch (const json::exception& e) {
    throw Error("experiment " + name + ": bad config: " + e.what());
  }
  return report;
}

std::vector<std::filesystem::path> write_report(const Report& report,
                                                const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  const auto json_path = out_dir / (report.experiment + ".json");
  io::write_file(json_path, io::dump(report.to_json()));
  written.push_back(json_path);
  for (const auto& [name, table] : report.tables) {
    const auto path = out_dir / (report.experiment + "." + name + ".csv");
    io::write_file(path, table.str());
    written.push_back(path);
  }
  return written;
}

}  // namespace percodyn::exp
