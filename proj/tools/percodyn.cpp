// percodyn: command-line front end for the tree and gadget engines.

#include <cmath>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "percodyn/acceptance.hpp"
#include "percodyn/exact.hpp"
#include "percodyn/experiments.hpp"
#include "percodyn/gadget.hpp"
#include "percodyn/io.hpp"
#include "percodyn/sim.hpp"

using namespace percodyn;
using io::json;

namespace {

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    io::write_file(out, text);
}

TreeProfile load_profile(const std::string& path) {
  return io::profile_from_json(json::parse(io::read_file(path)));
}

// ---- profile ---------------------------------------------------------------

struct ProfileArgs {
  std::string kind = "target";
  std::optional<double> alpha, theta, gamma;
  double scale = 1.0;
  int d = 2;
  double p = 0.5;
  int depth = 1000;
  double p_lo = 0.3, p_hi = 0.7;
  int degree_cap = 64;
  std::vector<int> degrees;
  std::vector<double> probs;
  std::string out;
};

int cmd_profile(const ProfileArgs& a) {
  json spec;
  if (a.kind == "homogeneous") {
    spec = {{"kind", "homogeneous"}, {"d", a.d}, {"p", a.p}, {"depth", a.depth}};
  } else if (a.kind == "explicit") {
    spec = {{"kind", "explicit"}, {"degrees", a.degrees}, {"edge_probs", a.probs}};
  } else if (a.kind == "target") {
    const int given = a.alpha.has_value() + a.theta.has_value() + a.gamma.has_value();
    if (given != 1) throw Error("target profiles need exactly one of --alpha, --theta, --gamma");
    const char* family = a.alpha ? "log_power" : a.theta ? "power" : "geometric";
    const double exponent = a.alpha ? *a.alpha : a.theta ? *a.theta : *a.gamma;
    spec = {{"kind", "target"}, {"family", family}, {"exponent", exponent}, {"scale", a.scale},
            {"depth", a.depth}, {"p_lo", a.p_lo},   {"p_hi", a.p_hi},
            {"degree_cap", a.degree_cap}};
  } else {
    throw Error("unknown --kind " + a.kind);
  }
  const SynthesisResult res = io::resolve_profile(spec);
  json meta{{"spec", spec},
            {"max_rel_deviation", res.max_rel_deviation},
            {"deviation_from", res.deviation_from},
            {"version", kVersion}};
  if (res.profile.depth() >= 100) meta["regime"] = to_string(regime_label(res.profile).regime);
  emit(io::dump(io::profile_to_json(res.profile, meta)), a.out);
  return 0;
}

// ---- exact -----------------------------------------------------------------

struct ExactArgs {
  std::string profile;
  std::string op = "survival";
  std::vector<int> n;
  int truncation = 0;  // 0: profile depth
  std::vector<double> t_grid;
  double tol = 1e-6;
  std::string out;
};

int cmd_exact(const ExactArgs& a) {
  const TreeProfile profile = load_profile(a.profile);
  const int N = a.truncation > 0 ? a.truncation : profile.depth();
  std::vector<int> ns = a.n;
  if (ns.empty()) ns = {profile.depth()};
  std::optional<io::CsvTable> table;

  if (a.op == "connect") {
    table.emplace(std::vector<std::string>{"n", "k", "A"});
    for (int n : ns) {
      const auto t = exact::subtree_connect_table(profile, n);
      for (int k = 0; k <= n; ++k) table->add_row({std::int64_t{n}, std::int64_t{k}, t.a[k]});
    }
  } else if (a.op == "survival") {
    table.emplace(std::vector<std::string>{"n", "log_w", "p_positive", "log_p_single", "ratio2",
                                           "inverse_w_sum", "energy_violation",
                                           "product_violation", "lyons_ratio"});
    for (const auto& pt : exact::survival_sweep(profile, ns))
      table->add_row({std::int64_t{pt.n}, pt.log_w, pt.p_positive, pt.log_p_single, pt.ratio2,
                      pt.inverse_w_sum, pt.energy_bound_violation(),
                      pt.product_bound_violation(), pt.lyons_ratio()});
  } else if (a.op == "lyons") {
    table.emplace(std::vector<std::string>{"n", "survival", "inverse_w_sum", "ratio"});
    for (const auto& pt : exact::lyons_check(profile, ns))
      table->add_row({std::int64_t{pt.n}, pt.survival, pt.inverse_w_sum, pt.ratio});
  } else if (a.op == "one-arm") {
    table.emplace(std::vector<std::string>{"n", "q", "truncation", "stop_target", "rel_change",
                                           "tol", "converged"});
    for (int n : ns) {
      const auto oa = exact::one_arm(profile, n, N, a.tol);
      table->add_row({std::int64_t{n}, oa.value, std::int64_t{oa.target},
                      std::int64_t{oa.stop_target}, oa.rel_change, oa.tol,
                      std::int64_t{oa.converged}});
    }
  } else if (a.op == "two-time" || a.op == "correlation") {
    table.emplace(std::vector<std::string>{"n", "t", "q", "q_t", "q_tilde", "q_tilde_t", "ratio",
                                           "tilde_ratio"});
    for (int n : ns) {
      const auto grid = a.t_grid.empty() ? exact::default_t_grid(n) : a.t_grid;
      const auto cr = exact::correlation_ratio(profile, n, N, grid);
      for (const auto& pt : cr.points) {
        const auto tt = exact::two_time_survival(profile, n, N, pt.t);
        table->add_row({std::int64_t{n}, pt.t, tt.q, tt.q_t, tt.q_tilde, tt.q_tilde_t, pt.ratio,
                        pt.tilde_ratio});
      }
    }
  } else if (a.op == "leftmost") {
    const int n_max = *std::max_element(ns.begin(), ns.end());
    const auto lt = exact::leftmost_table(profile, n_max, N);
    table.emplace(std::vector<std::string>{"n", "b_n_minus_1", "log_sibling_product",
                                           "tail_squared", "sibling_ratio", "expected_u",
                                           "single_u_times_expected"});
    for (int n : ns)
      table->add_row({std::int64_t{n}, lt.b[n - 1], lt.log_sibling_product[n],
                      lt.tail_squared[n], lt.sibling_ratio[n], lt.expected_u[n],
                      lt.single_u_times_expected[n]});
  } else if (a.op == "influence") {
    table.emplace(std::vector<std::string>{"n", "m", "log_influence", "influence", "u",
                                           "boundary_expectation", "flip_intensity"});
    for (int n : ns) {
      const auto inf = exact::influence_table(profile, n);
      for (int m = 1; m <= n; ++m)
        table->add_row({std::int64_t{n}, std::int64_t{m}, inf.log_influence[m], inf.influence[m],
                        inf.u[m], inf.boundary_expectation, inf.flip_intensity});
    }
  } else if (a.op == "regime") {
    const auto rep = exact::regime_report(profile, ns);
    table.emplace(std::vector<std::string>{"n", "sum_k_over_w", "harmonic", "ex_proxy",
                                           "harmonic_over_ex", "sibling_sum", "tail_sum"});
    for (const auto& r : rep.rows)
      table->add_row({std::int64_t{r.n}, r.sum_k_over_w, r.harmonic, r.ex_proxy, r.harmonic_ratio,
                      r.sibling_partial, r.tail_partial});
    std::cerr << "dynamic regime: " << exact::to_string(rep.regime)
              << ", EX growth: " << rep.ex_growth << "\n";
  } else {
    throw Error("unknown --op " + a.op);
  }
  emit(table->str(), a.out);
  return 0;
}

// ---- sim -------------------------------------------------------------------

struct SimArgs {
  std::string profile;
  int depth = 0;
  double horizon = 1.0;
  std::int64_t replicas = 1000;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> dump_timeline;
  std::string timeline_out;
  std::string out;
  bool serial = false;
};

int cmd_sim(const SimArgs& a) {
  const TreeProfile profile = load_profile(a.profile);
  sim::SimConfig cfg{profile, a.depth > 0 ? a.depth : profile.depth(), a.horizon, a.replicas,
                     a.seed, false};
  const sim::SimStats stats = sim::monte_carlo(cfg, a.serial ? Exec::serial : Exec::parallel);
  json doc;
  doc["version"] = kVersion;
  doc["config"] = {{"profile", a.profile}, {"depth", cfg.depth}, {"horizon", cfg.horizon},
                   {"replicas", cfg.replicas}, {"seed", cfg.seed}};
  doc["edges"] = sim::edge_count(profile, cfg.depth);
  doc["stats"] = io::sim_stats_to_json(stats);
  emit(io::dump(doc), a.out);
  if (a.dump_timeline) {
    sim::SimConfig one = cfg;
    one.record_events = true;
    const auto tl = sim::simulate_timeline(one, static_cast<std::uint64_t>(*a.dump_timeline));
    emit(io::timeline_csv(tl).str(), a.timeline_out);
  }
  return 0;
}

// ---- gadget ----------------------------------------------------------------

struct GadgetArgs {
  int j = 1;
  int m = 0;  // 0: select empirically
  int radius = 12;
  double p = 0.5;
  double epsilon = 0.5;
  std::int64_t replicas = 1000;
  std::uint64_t seed = 0;
  double threshold = 0.95;
  std::string out;
  std::string graph_out;
};

int cmd_gadget(const GadgetArgs& a) {
  json doc;
  doc["version"] = kVersion;
  doc["config"] = {{"j", a.j}, {"m", a.m}, {"radius", a.radius}, {"p", a.p},
                   {"epsilon", a.epsilon}, {"replicas", a.replicas}, {"seed", a.seed}};
  int m = a.m;
  if (m == 0) {
    const auto choice = gadget::select_multiplicity(a.j, a.radius, a.threshold, a.replicas, a.seed);
    m = choice.multiplicity;
    doc["selection"] = {{"threshold", a.threshold},
                        {"block_one_arm", io::estimate_to_json(choice.one_arm)}};
  }
  const gadget::GadgetGraph g = gadget::build_gadget(a.j, m, a.radius);
  doc["m"] = m;
  doc["vertices"] = g.vertex_count;
  doc["edges"] = g.edge_count();
  doc["bridges"] = g.bridges.size();
  doc["connect"] = io::estimate_to_json(gadget::connect_estimate(g, a.p, a.replicas, a.seed));
  doc["persistence"] =
      io::estimate_to_json(gadget::persistence_estimate(g, a.p, a.epsilon, a.replicas, a.seed));
  doc["anchor_connection"] = io::estimate_to_json(
      gadget::block_anchor_connection(a.j, g.block, a.p, a.replicas, a.seed));
  emit(io::dump(doc), a.out);
  if (!a.graph_out.empty()) io::write_file(a.graph_out, io::dump(io::gadget_to_json(g, a.p)));
  return 0;
}

// ---- run / accept ----------------------------------------------------------

int cmd_run(const std::string& config_path, const std::string& out_dir, bool serial) {
  const std::filesystem::path path(config_path);
  json cfg;
  try {
    cfg = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw Error("cannot parse " + config_path + ": " + e.what());
  }
  const auto report =
      exp::run_experiment(cfg, path.parent_path(), serial ? Exec::serial : Exec::parallel);
  for (const auto& p : exp::write_report(report, out_dir)) std::cout << p.string() << "\n";
  for (const auto& a : report.assertions)
    if (!a.pass) std::cout << "FAILED " << a.group << " " << a.name << "\n";
  std::cout << (report.passed() ? "passed" : "failed") << "\n";
  return report.passed() ? 0 : 1;
}

int cmd_accept(const std::vector<int>& ids, bool serial) {
  bool ok = true;
  for (int id : ids) {
    const auto r = acceptance::run_criterion(id, serial ? Exec::serial : Exec::parallel);
    std::cout << acceptance::format_line(r) << std::endl;
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamical percolation on spherically symmetric trees and gadget graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "build or synthesize a tree profile");
  profile->add_option("--kind", pa.kind, "homogeneous | explicit | target")->capture_default_str();
  profile->add_option("--alpha", pa.alpha, "target w_n = c n ln(n+2)^alpha");
  profile->add_option("--theta", pa.theta, "target w_n = c n^theta");
  profile->add_option("--gamma", pa.gamma, "target w_n = c gamma^n");
  profile->add_option("--scale", pa.scale, "normalizing constant c")->capture_default_str();
  profile->add_option("--d", pa.d, "homogeneous degree")->capture_default_str();
  profile->add_option("--p", pa.p, "homogeneous edge probability")->capture_default_str();
  profile->add_option("--depth", pa.depth)->capture_default_str();
  profile->add_option("--p-lo", pa.p_lo)->capture_default_str();
  profile->add_option("--p-hi", pa.p_hi)->capture_default_str();
  profile->add_option("--degree-cap", pa.degree_cap)->capture_default_str();
  profile->add_option("--degrees", pa.degrees, "explicit d_0 .. d_{D-1}");
  profile->add_option("--edge-probs", pa.probs, "explicit p_1 .. p_D");
  profile->add_option("--out", pa.out, "output file (default stdout)");

  ExactArgs ea;
  auto* exact_cmd = app.add_subcommand("exact", "exact per-level quantities as CSV");
  exact_cmd->add_option("--profile", ea.profile)->required()->check(CLI::ExistingFile);
  exact_cmd->add_option("--op", ea.op,
                        "connect | survival | lyons | one-arm | two-time | correlation | "
                        "leftmost | influence | regime")
      ->capture_default_str();
  exact_cmd->add_option("--n", ea.n, "target levels");
  exact_cmd->add_option("--N", ea.truncation, "truncation level for 'infinity'");
  exact_cmd->add_option("--t-grid", ea.t_grid, "time offsets (default 1/n 2/n .01 .1 .5 1)");
  exact_cmd->add_option("--tol", ea.tol)->capture_default_str();
  exact_cmd->add_option("--out", ea.out, "CSV file (default stdout)");

  SimArgs sa;
  auto* sim_cmd = app.add_subcommand("sim", "Monte Carlo of the refresh dynamics");
  sim_cmd->add_option("--profile", sa.profile)->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--depth", sa.depth, "target level (default profile depth)");
  sim_cmd->add_option("--horizon", sa.horizon)->capture_default_str();
  sim_cmd->add_option("--replicas", sa.replicas)->capture_default_str();
  sim_cmd->add_option("--seed", sa.seed)->capture_default_str();
  sim_cmd->add_option("--dump-timeline", sa.dump_timeline, "write replica k's events as CSV");
  sim_cmd->add_option("--timeline-out", sa.timeline_out, "timeline CSV file (default stdout)");
  sim_cmd->add_option("--out", sa.out, "stats JSON (default stdout)");
  sim_cmd->add_flag("--serial", sa.serial, "use the serial reference kernel");

  GadgetArgs ga;
  auto* gadget_cmd = app.add_subcommand("gadget", "static and dynamical estimates on G_j");
  gadget_cmd->add_option("--j", ga.j)->capture_default_str();
  gadget_cmd->add_option("--m", ga.m, "edge multiplicity (0 selects it)")->capture_default_str();
  gadget_cmd->add_option("--radius", ga.radius)->capture_default_str();
  gadget_cmd->add_option("--p", ga.p)->capture_default_str();
  gadget_cmd->add_option("--epsilon", ga.epsilon)->capture_default_str();
  gadget_cmd->add_option("--replicas", ga.replicas)->capture_default_str();
  gadget_cmd->add_option("--seed", ga.seed)->capture_default_str();
  gadget_cmd->add_option("--threshold", ga.threshold, "block one-arm target when selecting m")
      ->capture_default_str();
  gadget_cmd->add_option("--out", ga.out, "estimates JSON (default stdout)");
  gadget_cmd->add_option("--graph-out", ga.graph_out, "write the graph as JSON");

  std::string config, out_dir = ".";
  bool run_serial = false;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config)->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir)->capture_default_str();
  run->add_flag("--serial", run_serial);

  bool all = false, accept_serial = false;
  std::vector<int> criteria;
  auto* accept = app.add_subcommand("accept", "acceptance suite");
  accept->add_flag("--all", all);
  accept->add_option("--criterion", criteria)->check(CLI::Range(1, acceptance::kCriteria));
  accept->add_flag("--serial", accept_serial);

  auto* list = app.add_subcommand("experiments", "list experiment names or print a default config");
  std::string show;
  list->add_option("--show", show, "print the default config of this experiment");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*profile) return cmd_profile(pa);
    if (*exact_cmd) return cmd_exact(ea);
    if (*sim_cmd) return cmd_sim(sa);
    if (*gadget_cmd) return cmd_gadget(ga);
    if (*run) return cmd_run(config, out_dir, run_serial);
    if (*accept) {
      if (all || criteria.empty()) {
        criteria.clear();
        for (int k = 1; k <= acceptance::kCriteria; ++k) criteria.push_back(k);
      }
      return cmd_accept(criteria, accept_serial);
    }
    if (*list) {
      if (!show.empty())
        std::cout << io::dump(exp::default_config(show));
      else
        for (const auto& n : exp::experiment_names()) std::cout << n << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "percodyn: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
