#include "percodyn/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace percodyn::io {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != header_.size()) throw Error("csv row width does not match header");
  rows_.push_back(std::move(row));
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const CsvTable::Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return quote(std::get<std::string>(cell));
}

}  // namespace

void CsvTable::write(std::ostream& out) const {
  for (std::size_t c = 0; c < header_.size(); ++c) out << (c ? "," : "") << quote(header_[c]);
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << cell_text(row[c]);
    out << '\n';
  }
}

std::string CsvTable::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json profile_to_json(const TreeProfile& profile, const json& meta) {
  json doc;
  doc["degrees"] = std::vector<int>(profile.degrees().begin(), profile.degrees().end());
  doc["edge_probs"] =
      std::vector<double>(profile.edge_probs().begin(), profile.edge_probs().end());
  doc["meta"] = meta;
  return doc;
}

TreeProfile profile_from_json(const json& doc) {
  try {
    return TreeProfile(doc.at("degrees").get<std::vector<int>>(),
                       doc.at("edge_probs").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw Error(std::string("malformed profile json: ") + e.what());
  }
}

ProfileSpec profile_spec_from_json(const json& doc) {
  ProfileSpec spec;
  try {
    const std::string kind = doc.value("kind", "target");
    spec.range.lo = doc.value("p_lo", spec.range.lo);
    spec.range.hi = doc.value("p_hi", spec.range.hi);
    if (kind == "homogeneous") {
      spec.kind = ProfileSpec::Kind::homogeneous;
      spec.degree = doc.at("d").get<int>();
      spec.prob = doc.at("p").get<double>();
      spec.depth = doc.at("depth").get<int>();
    } else if (kind == "explicit") {
      spec.kind = ProfileSpec::Kind::explicit_levels;
      spec.degrees = doc.at("degrees").get<std::vector<int>>();
      spec.edge_probs = doc.at("edge_probs").get<std::vector<double>>();
      spec.depth = static_cast<int>(spec.degrees.size());
    } else if (kind == "target") {
      spec.kind = ProfileSpec::Kind::target_growth;
      spec.target.family = growth_family_from_string(doc.at("family").get<std::string>());
      spec.target.exponent = doc.at("exponent").get<double>();
      spec.target.scale = doc.value("scale", 1.0);
      spec.depth = doc.at("depth").get<int>();
      spec.degree_cap = doc.value("degree_cap", 64);
    } else {
      throw Error("unknown profile kind: " + kind);
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed profile spec: ") + e.what());
  }
  return spec;
}

json profile_spec_to_json(const ProfileSpec& spec) {
  json doc;
  switch (spec.kind) {
    case ProfileSpec::Kind::homogeneous:
      doc["kind"] = "homogeneous";
      doc["d"] = spec.degree;
      doc["p"] = spec.prob;
      doc["depth"] = spec.depth;
      break;
    case ProfileSpec::Kind::explicit_levels:
      doc["kind"] = "explicit";
      doc["degrees"] = spec.degrees;
      doc["edge_probs"] = spec.edge_probs;
      break;
    case ProfileSpec::Kind::target_growth:
      doc["kind"] = "target";
      doc["family"] = to_string(spec.target.family);
      doc["exponent"] = spec.target.exponent;
      doc["scale"] = spec.target.scale;
      doc["depth"] = spec.depth;
      doc["p_lo"] = spec.range.lo;
      doc["p_hi"] = spec.range.hi;
      doc["degree_cap"] = spec.degree_cap;
      break;
  }
  return doc;
}

SynthesisResult resolve_profile(const json& doc, const std::filesystem::path& base_dir) {
  if (doc.contains("file")) {
    std::filesystem::path path = doc.at("file").get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    json loaded;
    try {
      loaded = json::parse(read_file(path));
    } catch (const json::exception& e) {
      throw Error("cannot parse profile " + path.string() + ": " + e.what());
    }
    SynthesisResult out{profile_from_json(loaded)};
    if (loaded.contains("meta") && loaded["meta"].contains("max_rel_deviation"))
      out.max_rel_deviation = loaded["meta"]["max_rel_deviation"].get<double>();
    return out;
  }
  return build_profile(profile_spec_from_json(doc));
}

json estimate_to_json(const Estimate& e) {
  return json{{"mean", e.mean}, {"se", e.se}, {"replicas", e.count}};
}

json sim_stats_to_json(const sim::SimStats& s) {
  json doc;
  doc["flips"] = estimate_to_json(s.flips);
  doc["opening_flips"] = estimate_to_json(s.opening_flips);
  doc["closing_flips"] = estimate_to_json(s.closing_flips);
  doc["switches"] = estimate_to_json(s.switches);
  doc["refreshes"] = estimate_to_json(s.refreshes);
  doc["components"] = estimate_to_json(s.components);
  doc["boundary"] = estimate_to_json(s.boundary);
  doc["full_interval"] = estimate_to_json(s.full_interval);
  doc["on_fraction"] = estimate_to_json(s.on_fraction);
  doc["initially_on"] = estimate_to_json(s.initially_on);
  doc["w_min"] = estimate_to_json(s.w_min);
  doc["w_max"] = estimate_to_json(s.w_max);
  return doc;
}

CsvTable timeline_csv(const sim::Timeline& timeline) {
  CsvTable table({"time", "edge", "old", "new", "pivotal"});
  for (const sim::Event& ev : timeline.events)
    table.add_row({ev.time, ev.edge, std::int64_t{ev.old_state}, std::int64_t{ev.new_state},
                   std::int64_t{ev.pivotal}});
  return table;
}

json gadget_to_json(const gadget::GadgetGraph& g, double p) {
  json doc;
  doc["j"] = g.j;
  doc["vertex_count"] = g.vertex_count;
  doc["terminals"] = {g.x, g.y};
  doc["block"] = {{"radius", g.block.radius},
                  {"x_range", {g.block.x_min, g.block.x_max}},
                  {"y_range", {g.block.y_min, g.block.y_max}},
                  {"multiplicity", g.block.multiplicity},
                  {"vertex_count", g.block.vertex_count},
                  {"edge_count", g.block.edge_count}};
  json bridges = json::array();
  for (const auto& b : g.bridges)
    bridges.push_back({{"anchor", b.anchor}, {"first_edge", b.first_edge}, {"length", b.length}});
  doc["bridges"] = std::move(bridges);
  json edges = json::array();
  for (const auto& [u, v] : g.edges) edges.push_back({u, v});
  doc["edges"] = std::move(edges);
  doc["edge_prob"] = p;
  return doc;
}

}  // namespace percodyn::io
