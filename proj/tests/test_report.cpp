#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rlab/config.hpp"
#include "rlab/error.hpp"
#include "rlab/report.hpp"

using namespace rlab;
namespace fs = std::filesystem;

namespace {

ScanReport three_rows() {
  ScanReport r;
  r.kind = "theorem1";
  r.family = Family::random_phase;
  r.seed = 7;
  r.rows = {{4, 1.0 / 3.0, 2.0, 1.0 / 6.0, 1e-3}, {8, 0.1, 3.0, 0.1 / 3.0, 2e-4}, {16, 0.01, 4.0, 0.0025, 0.0}};
  r.fit = fit_exponent({{4, 1.0 / 6.0}, {8, 0.1 / 3.0}, {16, 0.0025}});
  r.theory_slope = -1.5;
  r.wall_clock_s = 0.25;
  r.note = "n";
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rlab_test_report_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config defaults and validation") {
  const RunConfig c;
  CHECK(c.d == 3);
  CHECK(c.p == 8.0);
  CHECK(c.N == std::vector<int>{4, 8, 16});
  CHECK_NOTHROW(c.validate(ScanPurpose::theorem1));
  CHECK(c.min_p(ScanPurpose::theorem1) == 8.0);
  CHECK(c.min_p(ScanPurpose::decoupling) == 8.0);
  CHECK(c.min_p(ScanPurpose::algebraic) == 10.0);
  CHECK_THROWS_AS(c.validate(ScanPurpose::algebraic), ValidationError);

  RunConfig bad = c;
  bad.N = {4, 6};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = c;
  bad.delta = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = c;
  bad.p = 7.5;
  CHECK_NOTHROW(bad.validate());
  CHECK_THROWS_WITH_AS(bad.validate(ScanPurpose::theorem1), doctest::Contains("2d+2"), ValidationError);
}

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(R"({"d": 4, "N": [2, 4], "p": 10, "families": ["ones", "random-sign"], "seeds": [3, 5]})");
  CHECK(c.d == 4);
  CHECK(c.N == std::vector<int>{2, 4});
  CHECK(c.families == std::vector<Family>{Family::ones, Family::random_sign});
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 5});
  CHECK(c.delta == 0.1);
  CHECK_THROWS_AS(parse_config(R"({"d": 3, "colour": 1})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"d": 3,)"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"d": 2})"), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/rlab.json"), ValidationError);
}

TEST_CASE("config json round trip and hash") {
  RunConfig c;
  c.N = {2, 4, 8, 16, 32};
  c.delta = 0.05;
  const RunConfig back = parse_config(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  RunConfig other = c;
  other.p = 9.0;
  CHECK(config_hash(other) != config_hash(c));
  CHECK(config_hash(RunConfig{}) == config_hash(RunConfig{}));
  other = c;
  other.out_dir = "elsewhere";
  CHECK(config_hash(other) == config_hash(c));
}

TEST_CASE("an empty report has nothing to report") {
  ScanReport r;
  r.kind = "theorem1";
  CHECK_THROWS_WITH_AS(report_csv(r), doctest::Contains("nothing to report"), ValidationError);
  CHECK_THROWS_AS(report_svg(r), ValidationError);
}

TEST_CASE("csv has a header and one line per row") {
  const ScanReport r = three_rows();
  const std::string csv = report_csv(r);
  CHECK(count_lines(csv) == 4);
  CHECK(csv.rfind("N,lhs,rhs,ratio,lhs_std_error\n", 0) == 0);
  // Doubles are written so they read back exactly.
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line.substr(0, 2) == "4,");
  CHECK(std::stod(line.substr(2, line.find(',', 2) - 2)) == 1.0 / 3.0);
}

TEST_CASE("json round trip keeps every field") {
  const ScanReport r = three_rows();
  const ScanReport b = report_from_json(report_json(r));
  CHECK(b.kind == r.kind);
  CHECK(b.family == r.family);
  CHECK(b.seed == r.seed);
  CHECK(config_hash(b.config) == config_hash(r.config));
  REQUIRE(b.rows.size() == r.rows.size());
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    CHECK(b.rows[k].N == r.rows[k].N);
    CHECK(b.rows[k].lhs == r.rows[k].lhs);
    CHECK(b.rows[k].ratio == r.rows[k].ratio);
    CHECK(b.rows[k].lhs_std_error == r.rows[k].lhs_std_error);
  }
  CHECK(b.fit.slope == r.fit.slope);
  CHECK(b.fit.points == r.fit.points);
  CHECK(report_json(b) == report_json(r));
  CHECK_THROWS_AS(report_from_json("{\"kind\": 1}"), ValidationError);
}

TEST_CASE("svg and stem") {
  const ScanReport r = three_rows();
  const std::string svg = report_svg(r);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(report_stem(r) == "theorem1_random_s7_" + config_hash(r.config));
  CHECK(parse_format("csv") == ReportFormat::csv);
  CHECK_THROWS_AS(parse_format("xlsx"), ValidationError);
}

TEST_CASE("repeated scans give byte-identical files") {
  RunConfig c;
  c.N = {4, 8};
  c.sample_cells = 96;
  const fs::path d1 = scratch_dir("a"), d2 = scratch_dir("b");
  const auto p1 = emit_report(scan_theorem1(c, Family::random_phase, 3), d1, {ReportFormat::csv, ReportFormat::svg});
  const auto p2 = emit_report(scan_theorem1(c, Family::random_phase, 3), d2, {ReportFormat::csv, ReportFormat::svg});
  REQUIRE(p1.size() == 2);
  REQUIRE(p2.size() == 2);
  for (std::size_t k = 0; k < p1.size(); ++k) {
    CHECK(p1[k].filename() == p2[k].filename());
    CHECK(slurp(p1[k]) == slurp(p2[k]));
    CHECK(!slurp(p1[k]).empty());
  }
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("write failures name the path") {
  const fs::path d = scratch_dir("blocked");
  fs::create_directories(d);
  const fs::path file = d / "plain";
  write_text_file(file, "x");
  try {
    emit_report(three_rows(), file / "sub");
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("plain") != std::string::npos);
  }
  fs::remove_all(d);
}

TEST_CASE("tables and number formatting") {
  Table t{{"a", "b"}, {}};
  t.add({"1", "x"});
  CHECK(table_csv(t) == "a,b\n1,x\n");
  CHECK_THROWS_AS(t.add({"1"}), ValidationError);
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(2.0) == "2");
}
