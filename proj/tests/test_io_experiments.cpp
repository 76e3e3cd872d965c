#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "percodyn/experiments.hpp"
#include "percodyn/io.hpp"

using namespace percodyn;
using io::json;

TEST_CASE("double formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.678}) CHECK(std::stod(io::format_double(x)) == x);
  CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(io::format_double(std::nan("")) == "nan");
}

TEST_CASE("csv dialect") {
  io::CsvTable t({"name", "n", "x"});
  t.add_row({std::string("a,b"), std::int64_t{3}, 0.5});
  t.add_row({std::string("plain"), std::int64_t{-1}, 0.1});
  CHECK(t.str() == "name,n,x\n\"a,b\",3,0.5\nplain,-1,0.10000000000000001\n");
  CHECK_THROWS_AS(t.add_row({0.0}), Error);
}

TEST_CASE("profile json round trip") {
  const TreeProfile p({2, 3, 1}, {0.5, 0.25, 0.9});
  const TreeProfile q = io::profile_from_json(io::profile_to_json(p));
  REQUIRE(q.depth() == 3);
  for (int n = 0; n <= 3; ++n) CHECK(q.log_w(n) == p.log_w(n));
}

TEST_CASE("profile spec round trip") {
  const json doc = {{"kind", "target"}, {"family", "power"}, {"exponent", 1.5}, {"depth", 300}};
  const ProfileSpec spec = io::profile_spec_from_json(doc);
  CHECK(spec.kind == ProfileSpec::Kind::target_growth);
  CHECK(spec.target.family == GrowthFamily::power);
  const ProfileSpec again = io::profile_spec_from_json(io::profile_spec_to_json(spec));
  CHECK(again.depth == 300);
  CHECK(again.target.exponent == 1.5);
  CHECK_THROWS_AS(io::profile_spec_from_json({{"kind", "nope"}}), Error);
}

TEST_CASE("profile files resolve relative to the config") {
  const auto dir = std::filesystem::temp_directory_path() / "percodyn_io_test";
  const TreeProfile p({2, 2}, {0.6, 0.4});
  io::write_file(dir / "tree.json", io::dump(io::profile_to_json(p)));
  const auto r = io::resolve_profile({{"file", "tree.json"}}, dir);
  CHECK(r.profile.w(2) == doctest::Approx(p.w(2)));
  CHECK_THROWS_AS(io::resolve_profile({{"file", "missing.json"}}, dir), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("log grid") {
  const auto g = exp::log_grid(10, 10000, 4);
  CHECK(g.front() == 10);
  CHECK(g.back() == 10000);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("experiment registry") {
  const auto names = exp::experiment_names();
  CHECK(names.size() == 8);
  for (const auto& n : names) CHECK(exp::default_config(n).at("experiment") == n);
  CHECK_THROWS_AS(exp::default_config("nope"), Error);
  CHECK_THROWS_AS(exp::run_experiment({{"experiment", "nope"}}), Error);
}

TEST_CASE("oracle suite passes and writes its report") {
  const auto report = exp::run_experiment(exp::default_config("oracle-suite"));
  CHECK(report.passed());
  CHECK(report.to_json().at("config").at("experiment") == "oracle-suite");
  const auto dir = std::filesystem::temp_directory_path() / "percodyn_report_test";
  const auto files = exp::write_report(report, dir);
  CHECK(files.size() == 1 + report.tables.size());
  for (const auto& f : files) CHECK(std::filesystem::exists(f));
  const std::string first = io::read_file(files.front());
  exp::write_report(exp::run_experiment(exp::default_config("oracle-suite")), dir);
  CHECK(io::read_file(files.front()) == first);
  std::filesystem::remove_all(dir);
}
