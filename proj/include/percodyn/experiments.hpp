#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "percodyn/common.hpp"
#include "percodyn/io.hpp"

/// Named experiment recipes. A recipe takes one JSON config, runs the
/// module kernels and returns a report: results, CSV tables and a list of
/// checked assertions. Reports contain no timestamps or host data, so the
/// same config and seed always give the same bytes.
namespace percodyn::exp {

using io::json;

struct Assertion {
  std::string group;     // what the check is about, e.g. "energy-bounds"
  std::string name;      // which instance, e.g. the profile label
  bool pass = false;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "in", ...
  double limit = 0.0;
  double limit_hi = 0.0;  // upper end for "in"
  std::string note;
};

struct Report {
  std::string experiment;
  json config;
  json results = json::object();
  std::vector<Assertion> assertions;
  std::vector<std::pair<std::string, io::CsvTable>> tables;

  bool passed() const;
  json to_json() const;
  /// Assertions whose group is `group`.
  std::vector<Assertion> group(const std::string& group) const;
};

std::vector<std::string> experiment_names();

/// Complete config for `name` with the documented defaults.
json default_config(const std::string& name);

/// Top-level keys of `config` override the defaults of the named recipe;
/// the merged config is echoed in the report. `base_dir` resolves profile
/// file references. `exec` does not affect the output.
Report run_experiment(const json& config, const std::filesystem::path& base_dir = {},
                      Exec exec = Exec::parallel);

/// Writes <experiment>.json and <experiment>.<table>.csv into `out_dir`;
/// returns the paths written.
std::vector<std::filesystem::path> write_report(const Report& report,
                                                const std::filesystem::path& out_dir);

/// Profile resolution with a per-process cache, since deep synthesized
/// profiles are shared between recipes.
const SynthesisResult& cached_profile(const json& spec,
                                      const std::filesystem::path& base_dir = {});

/// Roughly `per_decade` log-spaced integers in [lo, hi], always including
/// both ends.
std::vector<int> log_grid(int lo, int hi, int per_decade);

}  // namespace percodyn::exp
