#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "intgreen/format.hpp"
#include "intgreen/scan.hpp"
#include "json_schema.hpp"

using namespace intgreen;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string csv(const ScanGrid& g) {
  std::ostringstream out;
  write_scan_csv(out, g);
  return out.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("axis parsing") {
  const Axis a = parse_axis("delta2:-20:15:351");
  CHECK(a.name == Param::Delta2);
  CHECK(a.min == -20.0);
  CHECK(a.max == 15.0);
  CHECK(a.steps == 351);
  CHECK(a.value(0) == -20.0);
  CHECK(a.value(350) == 15.0);
  CHECK(a.value(200) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(parse_axis("d1:-1:1:3").name == Param::Delta1);
  CHECK(parse_axis("M:0:1:2").name == Param::M);

  for (const char* bad : {"M:0:1:1", "M:0:1", "x:0:1:5", "M:1:0:5", "M:0:1:2.5", "M:a:1:5", "M:0:1:5:6", "M:0:0:5"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_axis(bad), std::invalid_argument);
  }
}

TEST_CASE("symmetric axes give exact negatives") {
  const Axis a = parse_axis("delta1:-3:3:351");
  for (int j = 0; j < a.steps; ++j) CHECK(a.value(j) == -a.value(a.steps - 1 - j));
}

TEST_CASE("scan rejects repeated parameters") {
  const Axis x = parse_axis("M:-1:1:3");
  CHECK_THROWS_AS(run_scan(x, parse_axis("M:0:1:3"), Param::Delta1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(run_scan(x, parse_axis("delta2:0:1:3"), Param::M, 0.0), std::invalid_argument);
}

TEST_CASE("scan output is independent of thread count and bit-stable") {
  const Axis x = parse_axis("M:-20:15:41"), y = parse_axis("delta2:-20:15:37");
  ScanOptions one;
  one.threads = 1;
  ScanOptions many;
  many.threads = 4;
  const std::string a = csv(run_scan(x, y, Param::Delta1, 0.0, one));
  const std::string b = csv(run_scan(x, y, Param::Delta1, 0.0, many));
  const std::string c = csv(run_scan(x, y, Param::Delta1, 0.0, many));
  CHECK(a == b);
  CHECK(b == c);
  const auto rows = lines(a);
  CHECK(rows.front() == "x,y,class,delta1_bound,frontier_min_distance");
  CHECK(rows.size() == 1 + 41 * 37);
  CHECK(a.find('\r') == std::string::npos);
  CHECK(rows[1].rfind("-20,-20,", 0) == 0);
  CHECK(rows[2].rfind("-20," + format_double(y.value(1)) + ",", 0) == 0);
}

TEST_CASE("fig-1 column M = -1 flips at f(-1)") {
  const ScanGrid g = run_scan(parse_axis("M:-1.5:-0.5:3"), parse_axis("delta2:7.8:7.87:8"), Param::Delta1, 0.0);
  // y index 3 is 7.83, index 4 is 7.84.
  CHECK(g.cell(1, 3).cls == SignClass::StrictlyNegative);
  CHECK(g.cell(1, 4).cls == SignClass::SignChanging);
}

TEST_CASE("fig-2 column M = 1 flips at cot(1/2)") {
  const ScanGrid g = run_scan(parse_axis("M:0.5:1.5:3"), parse_axis("delta1:1.8:1.87:8"), Param::Delta2, 0.0);
  CHECK(g.cell(1, 3).cls == SignClass::StrictlyPositive);
  CHECK(g.cell(1, 4).cls == SignClass::SignChanging);
}

TEST_CASE("fig-2 class map is mirror-symmetric in delta1") {
  const ScanGrid g = run_scan(parse_axis("M:-20:15:71"), parse_axis("delta1:-4:4:81"), Param::Delta2, 0.0);
  for (int i = 0; i < g.x.steps; ++i)
    for (int j = 0; j < g.y.steps; ++j) CHECK(g.cell(i, j).cls == g.cell(i, g.y.steps - 1 - j).cls);
}

TEST_CASE("resonant cells stay in the grid") {
  // delta2 = M on the diagonal of a square (M, delta2) grid.
  const ScanGrid g = run_scan(parse_axis("M:-2:2:5"), parse_axis("delta2:-2:2:5"), Param::Delta1, 0.0);
  CHECK(g.cells.size() == 25);
  for (int i = 0; i < 5; ++i) CHECK(g.cell(i, i).cls == SignClass::NotUniquelySolvable);
  const std::string text = csv(g);
  CHECK(text.find("NotUniquelySolvable") != std::string::npos);
  // Missing frontier distance is an empty field.
  CHECK(text.find("-2,-2,NotUniquelySolvable,0,\n") != std::string::npos);
}

TEST_CASE("empirical and combined provenance") {
  ScanOptions both;
  both.provenance = Provenance::Both;
  const ScanGrid g = run_scan(parse_axis("M:-1:1:3"), parse_axis("delta2:-2:3:3"), Param::Delta1, 0.0, both);
  const std::string text = csv(g);
  CHECK(lines(text).front() == "x,y,class,delta1_bound,frontier_min_distance,empirical_class");
  for (const auto& c : g.cells) {
    REQUIRE(c.empirical.has_value());
    CHECK(*c.empirical == c.cls);
  }
  ScanOptions emp;
  emp.provenance = Provenance::Empirical;
  const ScanGrid e = run_scan(parse_axis("M:-1:1:3"), parse_axis("delta2:-2:3:3"), Param::Delta1, 0.0, emp);
  for (std::size_t i = 0; i < e.cells.size(); ++i) CHECK(e.cells[i].cls == g.cells[i].empirical);
}

TEST_CASE("scan JSON validates against the shipped schema") {
  const ScanGrid g = run_scan(parse_axis("M:-2:2:4"), parse_axis("delta2:-3:3:5"), Param::Delta1, 0.25);
  const auto doc = nlohmann::json::parse(scan_json(g));
  CHECK(schema_check::errors(doc, "scan.schema.json").empty());
  CHECK(doc["cells"].size() == 4);
  CHECK(doc["cells"][0].size() == 5);
  CHECK(doc["fixed"]["name"] == "delta1");
  nlohmann::json broken = doc;
  broken["cells"][0][0] = "Positive";
  CHECK_FALSE(schema_check::errors(broken, "scan.schema.json").empty());
}

TEST_CASE("SVG has one rect per cell and a five-entry legend") {
  const ScanGrid g = run_scan(parse_axis("M:-20:9:12"), parse_axis("delta2:-20:15:10"), Param::Delta1, 0.0);
  std::ostringstream out;
  write_scan_svg(out, g);
  const std::string svg = out.str();
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  // Background + cells + legend swatches.
  CHECK(count(svg, "<rect") == 1 + 12 * 10 + 5);
  for (const char* label : {">positive<", ">negative<", ">sign-changing<", ">frontier<", ">resonant<"})
    CHECK(svg.find(label) != std::string::npos);
  CHECK(svg.find("#2f6fd6") != std::string::npos);
  CHECK(svg.find("#d63a2f") != std::string::npos);
}

TEST_CASE("parameter names") {
  CHECK(parse_param("delta2") == Param::Delta2);
  CHECK(parse_param("d2") == Param::Delta2);
  CHECK_FALSE(parse_param("m").has_value());
  CHECK(to_string(Param::Delta1) == "delta1");
  CHECK(to_string(Provenance::Both) == "both");
}
