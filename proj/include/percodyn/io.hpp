#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "percodyn/gadget.hpp"
#include "percodyn/profile.hpp"
#include "percodyn/sim.hpp"
#include "percodyn/stats.hpp"

namespace percodyn::io {

using json = nlohmann::ordered_json;

/// Shortest text for 17 significant digits; "inf", "-inf" and "nan" for
/// non-finite values.
std::string format_double(double x);

/// Comma-separated, header row, LF line endings, 17 significant digits.
class CsvTable {
 public:
  using Cell = std::variant<double, std::int64_t, std::string>;

  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<Cell> row);
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  void write(std::ostream& out) const;
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

/// Writes `text` verbatim (binary mode, so LF stays LF).
void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

/// Floats are dumped in their shortest round-trip form.
std::string dump(const json& doc);

json profile_to_json(const TreeProfile& profile, const json& meta = json::object());
TreeProfile profile_from_json(const json& doc);

/// Accepts
///   {"kind": "homogeneous", "d": 2, "p": 0.5, "depth": 100}
///   {"kind": "explicit", "degrees": [...], "edge_probs": [...]}
///   {"kind": "target", "family": "log_power"|"power"|"geometric",
///    "exponent": 2, "scale": 1, "depth": 10000, "p_lo": 0.3, "p_hi": 0.7,
///    "degree_cap": 64}
///   {"file": "profile.json"}   (relative to `base_dir`)
SynthesisResult resolve_profile(const json& doc,
                                const std::filesystem::path& base_dir = {});

ProfileSpec profile_spec_from_json(const json& doc);
json profile_spec_to_json(const ProfileSpec& spec);

json estimate_to_json(const Estimate& e);
json sim_stats_to_json(const sim::SimStats& stats);

/// time, edge, old, new, pivotal
CsvTable timeline_csv(const sim::Timeline& timeline);

json gadget_to_json(const gadget::GadgetGraph& graph, double p);

}  // namespace percodyn::io
